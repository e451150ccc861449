#include "ncg/states_distance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "ncg/errors.hpp"
#include "ncg/format.hpp"
#include "ncg/lipschitz.hpp"

namespace ncg {

State::State(StateKind kind, CMatrix density, int index, std::string label)
    : kind_(kind), density_(std::move(density)), index_(index), label_(std::move(label)) {}

State State::pure(int m, int trunc) {
  if (trunc < 2) throw DimensionError("truncation N must be at least 2");
  if (m < 0 || m >= trunc) {
    throw DomainError("pure state index " + std::to_string(m) + " outside truncation " + std::to_string(trunc));
  }
  CMatrix d = CMatrix::Zero(trunc, trunc);
  d(m, m) = 1.0;
  return State(StateKind::PureBasis, std::move(d), m, "pure:" + std::to_string(m));
}

State State::vector(CVector c, bool normalize) {
  if (c.size() < 2) throw DimensionError("vector state needs at least two coefficients");
  if (!c.allFinite()) throw DomainError("vector state has non-finite coefficients");
  const double n = c.norm();
  if (normalize) {
    if (n == 0.0) throw DomainError("cannot normalize a zero vector");
    c /= n;
  } else if (std::abs(n - 1.0) > 1e-10) {
    throw DomainError("vector state is not unit norm (norm " + format_sig(n, 12) + ")");
  }
  return State(StateKind::Vector, c * c.adjoint(), -1, "vector");
}

State State::mixture(const std::vector<double>& weights, const std::vector<State>& states) {
  if (weights.empty() || weights.size() != states.size()) {
    throw DimensionError("mixture needs one weight per component state");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("mixture weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1 (sum " + format_sig(sum, 15) + ")");
  const int n = states.front().trunc();
  CMatrix d = CMatrix::Zero(n, n);
  std::string label = "mix:";
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].trunc() != n) throw DimensionError("mixture components have different truncations");
    d += weights[i] * states[i].density();
    if (i > 0) label += ";";
    label += format_double(weights[i]) + "," + states[i].label();
  }
  return State(StateKind::Mixture, std::move(d), -1, std::move(label));
}

State State::psi(double s, int trunc) {
  const double z = zeta(s);
  CVector c(trunc);
  for (int m = 0; m < trunc; ++m) c(m) = 1.0 / std::sqrt(z * std::pow(m + 1.0, s));
  State st = vector(c, true);
  st.label_ = "psi:" + format_double(s);
  return st;
}

cplx evaluate_state(const State& w, const TruncatedElement& a) {
  if (w.trunc() != a.trunc()) throw DimensionError("state and element truncations differ");
  return w.density().cwiseProduct(a.coeffs().transpose()).sum();
}

std::string_view to_string(Solver s) { return s == Solver::DiagonalLp ? "diagonal_lp" : "subgradient"; }

Solver solver_from_string(std::string_view s) {
  if (s == "diagonal_lp" || s == "lp") return Solver::DiagonalLp;
  if (s == "subgradient") return Solver::Subgradient;
  throw ConfigurationError("unknown solver '" + std::string(s) + "'");
}

namespace {

double dense_seminorm(const SpinorOperator& d, const CMatrix& a, const LadderTable& table) {
  const TruncatedElement e(a, d.params().theta);
  return operator_norm(commutator(d, e, CommutatorMode::Direct, table).dense(), NormMethod::Eigen);
}

double state_gap(const DistanceProblem& p, const CMatrix& a) {
  const CMatrix diff = p.state_a.density() - p.state_b.density();
  return std::abs(diff.cwiseProduct(a.transpose()).sum());
}

void require_problem(const DistanceProblem& p) {
  if (p.state_a.trunc() != p.state_b.trunc()) throw DimensionError("states have different truncations");
  if (!(p.tol > 0.0)) throw DomainError("tolerance must be positive");
}

std::optional<double> pure_closed_form(const DistanceProblem& p) {
  if (p.state_a.kind() != StateKind::PureBasis || p.state_b.kind() != StateKind::PureBasis) return std::nullopt;
  return distance_closed_form(p.kind, p.params, p.state_a.basis_index(), p.state_b.basis_index());
}

SolverReport infinite_report(const DistanceProblem& p) {
  SolverReport r;
  r.status = DistanceStatus::Infinite;
  r.lower_bound = std::numeric_limits<double>::infinity();
  r.witness = TruncatedElement::zero(p.trunc(), p.params.theta);
  r.closed_form = pure_closed_form(p);
  return r;
}

bool same_states(const DistanceProblem& p) {
  return (p.state_a.density() - p.state_b.density()).cwiseAbs().maxCoeff() == 0.0;
}

// Rescales a to the unit seminorm ball and fills the certified fields.
void certify(const DistanceProblem& p, const SpinorOperator& d, const CMatrix& a, const LadderTable& table,
             SolverReport& r) {
  const double l = dense_seminorm(d, a, table);
  const double gap = state_gap(p, a);
  if (l <= 0.0) {
    r.lower_bound = 0.0;
    r.witness = TruncatedElement::zero(p.trunc(), p.params.theta);
    r.witness_seminorm = 0.0;
    r.witness_gap = 0.0;
    return;
  }
  r.witness = TruncatedElement(a / l, p.params.theta);
  r.witness_seminorm = dense_seminorm(d, r.witness.coeffs(), table);
  r.witness_gap = gap / l;
  r.lower_bound = r.witness_gap / std::max(1.0, r.witness_seminorm);
}

SpMatrix sparse_blocks(const CommutatorBlocks& c) {
  const Eigen::Index n = c.blocks.front().rows();
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < c.spin; ++i) {
    for (int j = 0; j < c.spin; ++j) {
      const CMatrix& b = c.at(i, j);
      for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = 0; row < n; ++row) {
          if (b(row, col) != cplx{0.0}) t.emplace_back(i * n + row, j * n + col, b(row, col));
        }
      }
    }
  }
  SpMatrix m(c.spin * n, c.spin * n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

std::vector<double> diagonal_weights(DiracKind kind, const DiracParams& params, int trunc, const LadderTable& table) {
  const SpinorOperator d = build_dirac(kind, params, trunc, table);
  std::vector<double> w(static_cast<size_t>(trunc - 1));
  PowerOptions opts;
  for (int q = 0; q + 1 < trunc; ++q) {
    CMatrix s = CMatrix::Zero(trunc, trunc);
    for (int k = q + 1; k < trunc; ++k) s(k, k) = 1.0;
    const CommutatorBlocks c = commutator(d, TruncatedElement(s, params.theta), CommutatorMode::Direct, table);
    try {
      w[q] = operator_norm(sparse_blocks(c), opts);
    } catch (const NumericalError&) {
      w[q] = operator_norm(c.dense(), NormMethod::Eigen);
    }
  }
  return w;
}

SolverReport diagonal_lp(const DistanceProblem& p, const std::vector<double>& weights, const LadderTable& table) {
  require_problem(p);
  const int n = p.trunc();
  if (static_cast<int>(weights.size()) != n - 1) throw DimensionError("diagonal weights do not match truncation");
  SolverReport r;
  r.closed_form = pure_closed_form(p);
  r.witness = TruncatedElement::zero(n, p.params.theta);
  if (same_states(p)) return r;
  const SpinorOperator d = build_dirac(p.kind, p.params, n, table);
  if (d.degenerate()) return infinite_report(p);

  std::vector<double> tail(static_cast<size_t>(n - 1), 0.0);
  double acc = 0.0;
  for (int q = n - 2; q >= 0; --q) {
    acc += (p.state_a.density()(q + 1, q + 1) - p.state_b.density()(q + 1, q + 1)).real();
    tail[q] = acc;
  }
  const double wmax = *std::max_element(weights.begin(), weights.end());
  CMatrix a = CMatrix::Zero(n, n);
  double alpha = 0.0;
  for (int q = 0; q + 1 < n; ++q) {
    if (tail[q] != 0.0 && !(weights[q] > 1e-12 * std::max(wmax, 1e-300))) return infinite_report(p);
    if (tail[q] != 0.0) alpha += (tail[q] > 0.0 ? 1.0 : -1.0) / weights[q];
    a(q + 1, q + 1) = alpha;
  }
  certify(p, d, a, table, r);
  r.iterations = n - 1;
  return r;
}

namespace {

LadderStencil adjoint_stencil(const LadderStencil& s) {
  return {std::conj(s.row_raise), std::conj(s.row_lower), std::conj(s.col_lower), std::conj(s.col_raise)};
}

SolverReport subgradient(const DistanceProblem& p, const std::vector<double>& weights, const LadderTable& table) {
  SolverReport lp = diagonal_lp(p, weights, table);
  if (lp.status == DistanceStatus::Infinite || same_states(p)) return lp;

  const int n = p.trunc();
  const double theta = p.params.theta;
  const auto& opt = p.subgradient;
  const SpinorOperator d = build_dirac(p.kind, p.params, n, table);
  const CMatrix diff = p.state_a.density() - p.state_b.density();
  const LadderStencil sd = derivative_stencil(Derivative::Holomorphic, table, theta);
  const LadderStencil sdb = derivative_stencil(Derivative::AntiHolomorphic, table, theta);
  const LadderStencil sd_adj = adjoint_stencil(sd);
  const LadderStencil sdb_adj = adjoint_stencil(sdb);

  CMatrix a = lp.witness.coeffs();
  if (a.cwiseAbs().maxCoeff() == 0.0) a = 0.5 * (diff + diff.adjoint());
  CVector v1;
  CVector v2;
  SingularTriple t1;
  SingularTriple t2;
  // Surrogate seminorm √2·max(σ(∂a), σ(∂̄a)); the dense certificate at the end is what counts.
  auto measure = [&](const CMatrix& x) {
    t1 = top_singular(apply_stencil(sd, x), v1, opt.power_iterations);
    t2 = top_singular(apply_stencil(sdb, x), v2, opt.power_iterations);
    v1 = t1.v;
    v2 = t2.v;
    return std::sqrt(2.0) * std::max(t1.sigma, t2.sigma);
  };
  double l = measure(a);
  if (l <= 0.0) return lp;
  a /= l;

  CMatrix best = a;
  double best_ratio = -std::numeric_limits<double>::infinity();
  double half_ratio = best_ratio;
  t1.sigma /= l;
  t2.sigma /= l;
  for (int k = 1; k <= opt.iterations; ++k) {
    l = std::sqrt(2.0) * std::max(t1.sigma, t2.sigma);
    const double gap = diff.cwiseProduct(a.transpose()).sum().real();
    const double ratio = gap / l;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = a;
    }
    if (k == opt.iterations / 2) half_ratio = best_ratio;
    CMatrix g = CMatrix::Zero(n, n);
    const double top = std::max(t1.sigma, t2.sigma);
    if (t1.sigma >= top * (1 - 1e-9)) g += apply_stencil(sd_adj, t1.u * t1.v.adjoint());
    if (t2.sigma >= top * (1 - 1e-9)) g += apply_stencil(sdb_adj, t2.u * t2.v.adjoint());
    g = std::sqrt(2.0) * 0.5 * (g + g.adjoint()).eval();
    CMatrix step = 0.5 * (diff + diff.adjoint()) - ratio * g;
    const double sn = step.norm();
    if (sn == 0.0) break;
    a += (opt.eta0 / std::sqrt(static_cast<double>(k))) * (a.norm() / sn) * step;
    a = 0.5 * (a + a.adjoint()).eval();
    const double ln = measure(a);
    if (ln <= 0.0) break;
    a /= ln;
    t1.sigma /= ln;
    t2.sigma /= ln;
  }

  SolverReport sg;
  sg.closed_form = lp.closed_form;
  certify(p, d, best, table, sg);
  sg.iterations = opt.iterations;
  sg.converged = best_ratio > 0.0 && std::isfinite(half_ratio) && (best_ratio - half_ratio) <= 1e-3 * best_ratio;
  if (lp.lower_bound > sg.lower_bound) {
    lp.iterations = opt.iterations;
    lp.converged = sg.converged;
    return lp;
  }
  return sg;
}

}  // namespace

SolverReport distance(const DistanceProblem& p, const std::vector<double>& weights, const LadderTable& table) {
  require_problem(p);
  if (p.solver == Solver::DiagonalLp) return diagonal_lp(p, weights, table);
  return subgradient(p, weights, table);
}

SolverReport distance(const DistanceProblem& p, const LadderTable& table) {
  require_problem(p);
  return distance(p, diagonal_weights(p.kind, p.params, p.trunc(), table), table);
}

double distance_closed_form_d0(double theta, int m, int n) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  if (m < 0 || n < 0) throw DomainError("basis indices must be nonnegative");
  if (m < n) std::swap(m, n);
  double s = 0.0;
  for (int k = n + 1; k <= m; ++k) s += 1.0 / std::sqrt(static_cast<double>(k));
  return std::sqrt(theta / 2.0) * s;
}

double distance_closed_form(DiracKind kind, const DiracParams& params, int m, int n) {
  const double d0 = distance_closed_form_d0(params.theta, m, n);
  if (m == n) return 0.0;
  const double f = homothety_factor(kind, params);
  if (f == 0.0) return std::numeric_limits<double>::infinity();
  const double quoted = d0 / f;
  const double metric = clifford_metric(kind, params).det_g_quarter * d0;
  if (std::abs(quoted - metric) > 1e-10 * quoted) {
    throw NumericalError("closed-form distance and Clifford-metric route disagree: " + format_sig(quoted, 15) +
                         " vs " + format_sig(metric, 15));
  }
  return quoted;
}

TruncatedElement optimal_witness_candidate(double theta, int m, int trunc, const LadderTable& table) {
  if (m < 0 || m >= trunc - 1) throw DomainError("witness index must satisfy 0 <= m < N - 1");
  CMatrix a = CMatrix::Zero(trunc, trunc);
  double acc = 0.0;
  for (int p = 0; p < trunc; ++p) {
    if (p >= 1 && p <= m) acc += std::sqrt(theta / 2.0) / std::sqrt(static_cast<double>(p));
    a(p, p) = acc;
  }
  TruncatedElement e(a, theta);
  const double l = lipschitz_d0(e, table);
  if (l > 1.0 + 1e-9) {
    throw NumericalError("witness candidate is infeasible at this truncation (seminorm " + format_sig(l, 12) +
                         "); the ladder table may be miscalibrated");
  }
  return e;
}

std::vector<ProbeRow> divergence_probe(double s1, double s2, DiracKind kind, const DiracParams& params,
                                       const std::vector<int>& truncs, const LadderTable& table,
                                       const SubgradientOptions& opts) {
  if (!(s1 > 1.0) || !(s2 > 1.0)) throw DomainError("probe exponents must exceed 1");
  std::vector<ProbeRow> rows;
  for (int n : truncs) {
    DistanceProblem p;
    p.kind = kind;
    p.params = params;
    p.state_a = State::psi(s1, n);
    p.state_b = State::psi(s2, n);
    p.solver = Solver::Subgradient;
    p.subgradient = opts;
    const auto w = diagonal_weights(kind, params, n, table);
    const SolverReport lp = diagonal_lp(p, w, table);
    const SolverReport r = distance(p, w, table);
    rows.push_back({n, r.lower_bound, lp.lower_bound, r.converged});
  }
  return rows;
}

double zeta(double s) {
  if (!(s > 1.0) || !std::isfinite(s)) throw DomainError("zeta needs s > 1");
  constexpr int kM = 16;
  // B_2j / (2j)!
  constexpr std::array<double, 7> kB = {1.0 / 12.0,          -1.0 / 720.0,           1.0 / 30240.0,
                                        -1.0 / 1209600.0,    1.0 / 47900160.0,       -691.0 / 1307674368000.0,
                                        1.0 / 74724249600.0};
  double sum = 0.0;
  for (int k = kM - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  const double m = kM;
  sum += std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s);
  double rising = s;  // s(s+1)...(s+2j-2)
  for (size_t j = 0; j < kB.size(); ++j) {
    sum += kB[j] * rising * std::pow(m, -s - 2.0 * static_cast<double>(j) - 1.0);
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
  }
  return sum;
}

std::string distance_to_json(const DistanceProblem& p, const SolverReport& r, std::optional<double> d0_lower_bound) {
  nlohmann::ordered_json j;
  const bool finite = r.status == DistanceStatus::Finite;
  j["schema"] = 1;
  j["triple"] = std::string(to_string(p.kind));
  j["params"] = {{"theta", p.params.theta}, {"omega", p.params.omega}, {"xi", p.params.xi}};
  j["state_a"] = p.state_a.label();
  j["state_b"] = p.state_b.label();
  j["N"] = p.trunc();
  j["solver"] = std::string(to_string(p.solver));
  j["status"] = finite ? "finite" : "infinite";
  j["lower_bound"] = finite ? nlohmann::ordered_json(r.lower_bound) : nlohmann::ordered_json(nullptr);
  j["lower_bound_sqrt_theta"] =
      finite ? nlohmann::ordered_json(r.lower_bound / std::sqrt(p.params.theta)) : nlohmann::ordered_json(nullptr);
  if (r.closed_form && std::isfinite(*r.closed_form)) {
    j["closed_form"] = *r.closed_form;
  } else {
    j["closed_form"] = nullptr;
  }
  if (finite && d0_lower_bound && *d0_lower_bound > 0.0) {
    j["ratio_to_d0"] = r.lower_bound / *d0_lower_bound;
  } else {
    j["ratio_to_d0"] = nullptr;
  }
  j["witness_norm"] = r.witness_seminorm;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  return j.dump(2);
}

}  // namespace ncg
