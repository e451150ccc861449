#include "ncg_cli/state_spec.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ncg/errors.hpp"

namespace ncg::cli {

namespace {

double number(const std::string& s, const std::string& spec) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw PreconditionError("bad number '" + s + "' in state spec '" + spec + "'");
  }
  return v;
}

State parse_simple(const std::string& spec, int trunc) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw PreconditionError("state spec '" + spec + "' lacks a kind prefix");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "pure") {
    const double m = number(arg, spec);
    if (m != static_cast<int>(m) || m < 0 || m >= trunc) {
      throw PreconditionError("pure state index must be an integer in [0, N): " + spec);
    }
    return State::pure(static_cast<int>(m), trunc);
  }
  if (kind == "psi") return State::psi(number(arg, spec), trunc);
  if (kind == "vector") {
    std::ifstream in(arg);
    if (!in) throw PreconditionError("cannot read vector file '" + arg + "'");
    std::vector<cplx> c;
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      double re = 0.0, im = 0.0;
      if (!(ls >> re)) continue;
      ls >> im;
      c.emplace_back(re, im);
    }
    if (c.empty() || static_cast<int>(c.size()) > trunc) {
      throw PreconditionError("vector file must hold between 1 and N coefficients: " + arg);
    }
    CVector v = CVector::Zero(trunc);
    for (size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
    if (v.norm() == 0.0) throw PreconditionError("vector state is zero: " + arg);
    return State::vector(v, true);
  }
  throw PreconditionError("unknown state kind '" + kind + "' in '" + spec + "'");
}

}  // namespace

State parse_state(const std::string& spec, int trunc) {
  if (spec.rfind("mix:", 0) != 0) {
    try {
      return parse_simple(spec, trunc);
    } catch (const PreconditionError&) {
      throw;
    } catch (const Error& e) {
      throw PreconditionError(std::string(e.what()) + " (state spec '" + spec + "')");
    }
  }
  std::vector<double> weights;
  std::vector<State> parts;
  std::stringstream body(spec.substr(4));
  std::string item;
  while (std::getline(body, item, ';')) {
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw PreconditionError("mixture item '" + item + "' needs weight,spec");
    weights.push_back(number(item.substr(0, comma), spec));
    const std::string sub = item.substr(comma + 1);
    if (sub.rfind("mix:", 0) == 0) throw PreconditionError("nested mixtures are not supported");
    parts.push_back(parse_state(sub, trunc));
  }
  if (parts.empty()) throw PreconditionError("empty mixture '" + spec + "'");
  try {
    return State::mixture(weights, parts);
  } catch (const Error& e) {
    throw PreconditionError(std::string(e.what()) + " (state spec '" + spec + "')");
  }
}

}  // namespace ncg::cli
