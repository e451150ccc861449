#include "ncg/fock_algebra.hpp"

#include <cmath>

#include "json.hpp"
#include "ncg/errors.hpp"

namespace ncg {

TruncatedElement::TruncatedElement(CMatrix coeffs, double theta) : coeffs_(std::move(coeffs)), theta_(theta) {
  if (coeffs_.rows() != coeffs_.cols()) {
    throw DimensionError("coefficient matrix must be square");
  }
  if (coeffs_.rows() < 2) throw DimensionError("truncation N must be at least 2");
  if (!(theta_ > 0.0) || !std::isfinite(theta_)) throw DomainError("theta must be positive and finite");
}

TruncatedElement TruncatedElement::zero(int n, double theta) { return {CMatrix::Zero(n, n), theta}; }

TruncatedElement TruncatedElement::identity(int n, double theta) { return {CMatrix::Identity(n, n), theta}; }

TruncatedElement TruncatedElement::unit(int m, int n, int trunc, double theta) {
  if (m < 0 || n < 0 || m >= trunc || n >= trunc) {
    throw DimensionError("matrix unit index outside truncation");
  }
  CMatrix c = CMatrix::Zero(trunc, trunc);
  c(m, n) = 1.0;
  return {std::move(c), theta};
}

bool TruncatedElement::is_hermitian(double tol) const {
  return (coeffs_ - coeffs_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool TruncatedElement::is_interior(int margin, double tol) const {
  const int n = trunc();
  const int lim = std::max(0, n - margin);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((i >= lim || j >= lim) && std::abs(coeffs_(i, j)) > tol) return false;
    }
  }
  return true;
}

TruncatedElement TruncatedElement::interior_projected(int margin) const {
  const int n = trunc();
  const int lim = std::max(0, n - margin);
  CMatrix c = CMatrix::Zero(n, n);
  c.topLeftCorner(lim, lim) = coeffs_.topLeftCorner(lim, lim);
  return {std::move(c), theta_};
}

TruncatedElement& TruncatedElement::operator+=(const TruncatedElement& o) {
  require_compatible(*this, o);
  coeffs_ += o.coeffs_;
  return *this;
}

TruncatedElement& TruncatedElement::operator-=(const TruncatedElement& o) {
  require_compatible(*this, o);
  coeffs_ -= o.coeffs_;
  return *this;
}

TruncatedElement& TruncatedElement::operator*=(cplx s) {
  coeffs_ *= s;
  return *this;
}

void require_compatible(const TruncatedElement& a, const TruncatedElement& b) {
  if (a.trunc() != b.trunc()) {
    throw DimensionError("truncation mismatch: " + std::to_string(a.trunc()) + " vs " + std::to_string(b.trunc()));
  }
  if (a.theta() != b.theta()) throw DimensionError("theta mismatch between operands");
}

TruncatedElement star(const TruncatedElement& a, const TruncatedElement& b) {
  require_compatible(a, b);
  return {a.coeffs() * b.coeffs(), a.theta()};
}

TruncatedElement involution(const TruncatedElement& a) { return {a.coeffs().adjoint(), a.theta()}; }

cplx trace_integral(const TruncatedElement& a) { return 2.0 * kPi * a.theta() * a.coeffs().trace(); }

TruncatedElement star_commutator(const TruncatedElement& a, const TruncatedElement& b) {
  require_compatible(a, b);
  return {a.coeffs() * b.coeffs() - b.coeffs() * a.coeffs(), a.theta()};
}

double norm_st(const TruncatedElement& a, NormSpec spec) {
  const int n = a.trunc();
  const double pre = std::pow(a.theta(), spec.s + spec.t);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double wj = std::pow(j + 0.5, spec.t);
    for (int i = 0; i < n; ++i) acc += std::pow(i + 0.5, spec.s) * wj * std::norm(a(i, j));
  }
  return std::sqrt(pre * acc);
}

double rho_k(const TruncatedElement& a, int k) {
  return norm_st(a, {static_cast<double>(k), static_cast<double>(k)});
}

double l2_function_norm(const TruncatedElement& a) {
  return std::sqrt(2.0 * kPi * a.theta()) * a.coeffs().norm();
}

LadderStencil derivative_stencil(Derivative which, const LadderTable& table, double theta) {
  const LadderStencil d = table.scaled(LadderOp::D, theta);
  const LadderStencil db = table.scaled(LadderOp::Dbar, theta);
  const double r = 1.0 / std::sqrt(2.0);
  switch (which) {
    case Derivative::Holomorphic: return d;
    case Derivative::AntiHolomorphic: return db;
    case Derivative::X1: return cplx{r} * (d + db);
    case Derivative::X2: return (kI * r) * (d + cplx{-1.0} * db);
  }
  throw ConfigurationError("unknown derivative");
}

TruncatedElement derivative(const TruncatedElement& a, Derivative which, const LadderTable& table) {
  return {apply_stencil(derivative_stencil(which, table, a.theta()), a.coeffs()), a.theta()};
}

LadderStencil xtilde_stencil(int mu, XMode mode, const LadderTable& table, double theta) {
  if (mu != 1 && mu != 2) throw DomainError("x-tilde index must be 1 or 2");
  const LadderStencil left = table.scaled(mu == 1 ? LadderOp::Xt1Left : LadderOp::Xt2Left, theta);
  const LadderStencil right = table.scaled(mu == 1 ? LadderOp::Xt1Right : LadderOp::Xt2Right, theta);
  switch (mode) {
    case XMode::StarLeft: return left;
    case XMode::StarRight: return right;
    case XMode::Pointwise: return cplx{0.5} * (left + right);
  }
  throw ConfigurationError("unknown x-tilde mode");
}

TruncatedElement xtilde_apply(const TruncatedElement& a, int mu, XMode mode, const LadderTable& table) {
  return {apply_stencil(xtilde_stencil(mu, mode, table, a.theta()), a.coeffs()), a.theta()};
}

std::string element_to_json(const TruncatedElement& a) {
  nlohmann::json j;
  j["theta"] = a.theta();
  j["trunc"] = a.trunc();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int i = 0; i < a.trunc(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    nlohmann::json s = nlohmann::json::array();
    for (int k = 0; k < a.trunc(); ++k) {
      r.push_back(a(i, k).real());
      s.push_back(a(i, k).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(s));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j.dump();
}

TruncatedElement element_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("invalid element JSON: ") + e.what());
  }
  const int n = j.at("trunc").get<int>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n) {
    throw DimensionError("element JSON rows disagree with trunc");
  }
  CMatrix c(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(re[i].size()) != n || static_cast<int>(im[i].size()) != n) {
      throw DimensionError("element JSON columns disagree with trunc");
    }
    for (int k = 0; k < n; ++k) c(i, k) = {re[i][k].get<double>(), im[i][k].get<double>()};
  }
  return {std::move(c), j.at("theta").get<double>()};
}

}  // namespace ncg
