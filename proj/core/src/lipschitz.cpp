#include "ncg/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "ncg/errors.hpp"
#include "ncg/format.hpp"

namespace ncg {

namespace {

CVector start_vector(Eigen::Index n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  CVector v(n);
  const double base = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(base + 0.1 * base * ud(rng), 0.1 * base * ud(rng));
  return v.normalized();
}

template <class Mat>
double power_norm(const Mat& t, const PowerOptions& opts) {
  const Eigen::Index n = t.cols();
  if (n == 0) return 0.0;
  CVector v = start_vector(n, opts.seed);
  double lambda = 0.0;
  double change = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    CVector w = t.adjoint() * (t * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    change = std::abs(next - lambda) / next;
    lambda = next;
    if (it > 2 && change <= opts.tol) return std::sqrt(lambda);
  }
  throw NumericalError("power iteration did not converge after " + std::to_string(opts.max_iter) +
                       " iterations (estimate " + format_sig(std::sqrt(lambda), 12) + ", last relative change " +
                       format_sig(change, 3) + ")");
}

}  // namespace

double operator_norm(const CMatrix& t, NormMethod method, const PowerOptions& opts) {
  if (!t.allFinite()) throw DomainError("operator_norm: non-finite entries");
  if (t.size() == 0) return 0.0;
  const bool dense = method == NormMethod::Eigen ||
                     (method == NormMethod::Auto && std::min(t.rows(), t.cols()) <= kDenseNormLimit);
  if (!dense) return power_norm(t, opts);
  const CMatrix g = t.rows() < t.cols() ? CMatrix(t * t.adjoint()) : CMatrix(t.adjoint() * t);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double operator_norm(const SpMatrix& t, const PowerOptions& opts) {
  for (int k = 0; k < t.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(t, k); it; ++it) {
      if (!std::isfinite(it.value().real()) || !std::isfinite(it.value().imag())) {
        throw DomainError("operator_norm: non-finite entries");
      }
    }
  }
  return power_norm(t, opts);
}

SingularTriple top_singular(const CMatrix& t, const CVector& v0, int iterations) {
  SingularTriple r;
  r.v = v0.size() == t.cols() && v0.norm() > 0.0 ? CVector(v0.normalized()) : start_vector(t.cols(), 7);
  for (int it = 0; it < iterations; ++it) {
    const CVector w = t.adjoint() * (t * r.v);
    const double n = w.norm();
    if (n == 0.0) break;
    r.v = w / n;
  }
  r.u = t * r.v;
  r.sigma = r.u.norm();
  if (r.sigma > 0.0) r.u /= r.sigma;
  return r;
}

std::string_view to_string(SeminormMethod m) { return m == SeminormMethod::Direct ? "direct" : "closed-form"; }

double homothety_factor(DiracKind kind, const DiracParams& params) {
  switch (kind) {
    case DiracKind::D0: return 1.0;
    case DiracKind::D1:
    case DiracKind::D2:
    case DiracKind::HarmonicAbstract: return std::sqrt(1.0 + params.omega * params.omega);
    case DiracKind::Landau: return std::abs(1.0 - params.xi);
    case DiracKind::Twisted: return 1.0 + std::abs(params.xi);
  }
  return 1.0;
}

double lipschitz_d0(const TruncatedElement& a, const LadderTable& table) {
  const double l = operator_norm(derivative(a, Derivative::Holomorphic, table).coeffs());
  const double lb = operator_norm(derivative(a, Derivative::AntiHolomorphic, table).coeffs());
  return std::sqrt(2.0) * std::max(l, lb);
}

SeminormReport lipschitz_seminorm(DiracKind kind, DiracParams params, const TruncatedElement& a,
                                  SeminormMethod method, const LadderTable& table) {
  params.theta = a.theta();
  const double closed = homothety_factor(kind, params) * lipschitz_d0(a, table);
  const SpinorOperator d = build_dirac(kind, params, a.trunc(), table);
  const double direct = operator_norm(commutator(d, a, CommutatorMode::Direct, table).dense());
  SeminormReport r;
  r.value = method == SeminormMethod::Direct ? direct : closed;
  r.method = method;
  r.kind = kind;
  r.params = params;
  const double scale = std::max(direct, closed);
  r.residual_vs_other_method = scale > 0.0 ? std::abs(direct - closed) / scale : 0.0;
  return r;
}

std::string seminorm_to_json(const SeminormReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["value"] = r.value;
  j["method"] = std::string(to_string(r.method));
  j["kind"] = std::string(to_string(r.kind));
  j["params"] = {{"theta", r.params.theta}, {"omega", r.params.omega}, {"xi", r.params.xi}};
  j["residual"] = r.residual_vs_other_method;
  return j.dump(2);
}

CMatrix diag_unitary(double omega) {
  const double c = 1.0 / std::sqrt(1.0 + omega * omega);
  CMatrix u = CMatrix::Identity(4, 4);
  u(1, 1) = c;
  u(1, 2) = omega * c;
  u(2, 1) = -omega * c;
  u(2, 2) = c;
  return u;
}

UnitaryDiagReport unitary_diag_check(double omega, const TruncatedElement& a, const LadderTable& table) {
  DiracParams p;
  p.theta = a.theta();
  p.omega = omega;
  const int n = a.trunc();
  const CMatrix c = commutator(build_dirac(DiracKind::D1, p, n, table), a, CommutatorMode::Direct, table).dense();
  const CMatrix lhs = c.adjoint() * c;
  const CMatrix l = derivative(a, Derivative::Holomorphic, table).coeffs();
  const CMatrix lb = derivative(a, Derivative::AntiHolomorphic, table).coeffs();
  const CMatrix ll = l.adjoint() * l;
  const CMatrix lblb = lb.adjoint() * lb;
  CMatrix diag = CMatrix::Zero(4 * n, 4 * n);
  diag.block(0, 0, n, n) = ll;
  diag.block(n, n, n, n) = lblb;
  diag.block(2 * n, 2 * n, n, n) = ll;
  diag.block(3 * n, 3 * n, n, n) = lblb;
  const CMatrix u = kron(diag_unitary(omega), CMatrix::Identity(n, n));
  const CMatrix rhs = (1.0 + omega * omega) * (u.adjoint() * diag * u);
  const double scale = lhs.cwiseAbs().maxCoeff();
  UnitaryDiagReport r;
  if (scale == 0.0) {
    r.residual = rhs.cwiseAbs().maxCoeff();
    r.quoted_residual = r.residual;
    return r;
  }
  r.residual = (lhs - 2.0 * rhs).cwiseAbs().maxCoeff() / scale;
  r.quoted_residual = (lhs - rhs).cwiseAbs().maxCoeff() / scale;
  return r;
}

}  // namespace ncg
