#include "ncg/ladder.hpp"

#include <cmath>
#include <vector>

#include "json.hpp"
#include "ncg/errors.hpp"

namespace ncg {

std::string_view to_string(LadderOp op) {
  switch (op) {
    case LadderOp::D: return "d";
    case LadderOp::Dbar: return "dbar";
    case LadderOp::Xt1Left: return "xt1_left";
    case LadderOp::Xt2Left: return "xt2_left";
    case LadderOp::Xt1Right: return "xt1_right";
    case LadderOp::Xt2Right: return "xt2_right";
  }
  return "?";
}

LadderStencil& LadderStencil::operator+=(const LadderStencil& o) {
  row_lower += o.row_lower;
  row_raise += o.row_raise;
  col_raise += o.col_raise;
  col_lower += o.col_lower;
  return *this;
}

LadderStencil& LadderStencil::operator*=(cplx s) {
  row_lower *= s;
  row_raise *= s;
  col_raise *= s;
  col_lower *= s;
  return *this;
}

LadderTable::LadderTable(std::array<LadderStencil, kLadderOpCount> stencils, double theta_exponent,
                         CalibrationInfo info)
    : stencils_(stencils), theta_exponent_(theta_exponent), info_(std::move(info)), calibrated_(true) {}

const LadderStencil& LadderTable::stencil(LadderOp op) const {
  if (!calibrated_) {
    throw ConfigurationError("ladder table is not calibrated; run the sampled-plane calibration first");
  }
  return stencils_[static_cast<int>(op)];
}

LadderStencil LadderTable::scaled(LadderOp op, double theta) const {
  LadderStencil s = stencil(op);
  s *= std::pow(theta, theta_exponent_);
  return s;
}

namespace {

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }
cplx complex_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string ladder_table_to_json(const LadderTable& t) {
  nlohmann::json j;
  j["schema"] = 1;
  j["calibrated"] = t.calibrated();
  if (t.calibrated()) {
    j["theta_exponent"] = t.theta_exponent();
    nlohmann::json ops = nlohmann::json::object();
    for (int k = 0; k < kLadderOpCount; ++k) {
      const auto op = static_cast<LadderOp>(k);
      const LadderStencil& s = t.stencil(op);
      ops[std::string(to_string(op))] = {{"row_lower", complex_json(s.row_lower)},
                                         {"row_raise", complex_json(s.row_raise)},
                                         {"col_raise", complex_json(s.col_raise)},
                                         {"col_lower", complex_json(s.col_lower)},
                                         {"fit_residual", t.info().op_residual[k]}};
    }
    j["ops"] = ops;
    const CalibrationInfo& info = t.info();
    j["calibration"] = {{"theta", info.theta},
                        {"window", info.window},
                        {"grid_points", info.grid_points},
                        {"box_half_width", info.box_half_width},
                        {"fit_residual", info.fit_residual},
                        {"leakage", info.leakage},
                        {"phase_convention", info.phase_convention}};
  }
  return j.dump(2);
}

LadderTable ladder_table_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.value("calibrated", false)) return {};
  std::array<LadderStencil, kLadderOpCount> stencils{};
  CalibrationInfo info;
  for (int k = 0; k < kLadderOpCount; ++k) {
    const auto& o = j.at("ops").at(std::string(to_string(static_cast<LadderOp>(k))));
    stencils[k] = {complex_from(o.at("row_lower")), complex_from(o.at("row_raise")),
                   complex_from(o.at("col_raise")), complex_from(o.at("col_lower"))};
    info.op_residual[k] = o.value("fit_residual", 0.0);
  }
  const auto& c = j.at("calibration");
  info.theta = c.at("theta").get<double>();
  info.window = c.at("window").get<int>();
  info.grid_points = c.at("grid_points").get<int>();
  info.box_half_width = c.at("box_half_width").get<double>();
  info.fit_residual = c.at("fit_residual").get<double>();
  info.leakage = c.at("leakage").get<double>();
  info.phase_convention = c.value("phase_convention", "");
  return LadderTable(stencils, j.at("theta_exponent").get<double>(), info);
}

SpMatrix lowering_matrix(int n) {
  SpMatrix s(n, n);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int m = 1; m < n; ++m) t.emplace_back(m - 1, m, std::sqrt(static_cast<double>(m)));
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

SpMatrix raising_matrix(int n) {
  SpMatrix s(n, n);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int m = 0; m + 1 < n; ++m) t.emplace_back(m + 1, m, std::sqrt(static_cast<double>(m + 1)));
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

CMatrix Multipliers::apply(const CMatrix& x) const {
  CMatrix out = left * x;
  out += x * right;
  return out;
}

Multipliers multipliers(const LadderStencil& s, int n) {
  const SpMatrix lo = lowering_matrix(n);
  const SpMatrix up = raising_matrix(n);
  Multipliers m;
  m.left = s.row_lower * lo + s.row_raise * up;
  m.right = s.col_raise * lo + s.col_lower * up;
  m.left.prune(cplx{0.0});
  m.right.prune(cplx{0.0});
  return m;
}

CMatrix apply_stencil(const LadderStencil& s, const CMatrix& a) {
  const Eigen::Index n = a.rows();
  CMatrix out = CMatrix::Zero(n, a.cols());
  // Banded loops; the multiplier form is kept for operator assembly.
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const cplx v = a(m, k);
      if (v == cplx{0.0}) continue;
      if (m >= 1) out(m - 1, k) += s.row_lower * std::sqrt(static_cast<double>(m)) * v;
      if (m + 1 < n) out(m + 1, k) += s.row_raise * std::sqrt(static_cast<double>(m + 1)) * v;
      if (k + 1 < a.cols()) out(m, k + 1) += s.col_raise * std::sqrt(static_cast<double>(k + 1)) * v;
      if (k >= 1) out(m, k - 1) += s.col_lower * std::sqrt(static_cast<double>(k)) * v;
    }
  }
  return out;
}

}  // namespace ncg
