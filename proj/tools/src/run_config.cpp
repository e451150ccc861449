#include "ncg_cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "ncg/errors.hpp"

namespace ncg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigurationError("config key '" + key + "': not a number: " + v);
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigurationError("config key '" + key + "': not an integer: " + v);
  }
  return out;
}

}  // namespace

DiracParams RunConfig::params() const {
  DiracParams p;
  p.theta = theta;
  p.omega = omega;
  p.xi = xi;
  return p;
}

void RunConfig::validate() const {
  if (trunc < 8) throw DomainError("N must be at least 8");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("theta must be positive");
  if (!std::isfinite(omega) || !std::isfinite(xi)) throw DomainError("omega and xi must be finite");
  if (kind == DiracKind::D1 || kind == DiracKind::D2 || kind == DiracKind::HarmonicAbstract) {
    if (!(omega >= 0.0)) throw DomainError("omega must be nonnegative");
  }
  dirac_matrices(kind, params());
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "triple") {
      cfg.kind = dirac_kind_from_string(v);
    } else if (k == "theta") {
      cfg.theta = to_double(k, v);
    } else if (k == "omega") {
      cfg.omega = to_double(k, v);
    } else if (k == "xi") {
      cfg.xi = to_double(k, v);
    } else if (k == "N") {
      cfg.trunc = static_cast<int>(to_int(k, v));
    } else if (k == "solver") {
      cfg.solver = solver_from_string(v);
    } else if (k == "tol") {
      cfg.tol = to_double(k, v);
    } else if (k == "seed") {
      cfg.seed = static_cast<unsigned long long>(to_int(k, v));
    } else if (k == "format") {
      cfg.format = format_from_string(v);
    } else if (k == "output") {
      cfg.output = v;
    } else {
      throw ConfigurationError("unknown config key '" + k + "'");
    }
  }
}

OutputFormat format_from_string(std::string_view s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  throw ConfigurationError("unknown output format '" + std::string(s) + "'");
}

int worker_count() {
  if (const char* env = std::getenv("NCG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace ncg::cli
