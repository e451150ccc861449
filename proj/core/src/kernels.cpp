#include "ncg/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ncg/errors.hpp"
#include "ncg/format.hpp"

namespace ncg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// e^{-t} < 1e-16 past this point.
const double kTailCut = 16.0 * std::log(10.0);

template <class F>
double gk(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

double effective_xi(double xi, PhiVariant variant) {
  if (xi == 0.0 || !std::isfinite(xi)) throw DomainError("xi must be finite and nonzero");
  if (variant == PhiVariant::Phi && xi < 0.0) throw DomainError("Phi needs xi > 0; use the Psi variant");
  return std::abs(xi);
}

void check_mu2(double mu2) {
  if (!(mu2 >= 0.0) || !std::isfinite(mu2)) throw DomainError("mu^2 must be finite and nonnegative");
}

// Φ as a function of κ alone.
double phi_kappa(double kappa, double mu2) {
  if (kappa == 0.0) return kInf;
  // t ∈ [0, 1] through u = κ(coth t - 1) = 2κ sinh²(τ/2); the integrand is
  // rescaled by e^{κ} to keep large κ representable.
  const double tau1 = std::acosh(1.0 / std::tanh(1.0));
  const double tau_max = std::acosh(1.0 + 40.0 / kappa) + 1.0;
  const auto inner = [&](double tau) {
    const double w = std::exp(-kappa * (std::cosh(tau) - 1.0));
    return mu2 == 0.0 ? w : w * std::pow(std::tanh(0.5 * tau), mu2);
  };
  double head = 0.0;
  if (tau_max > tau1) head = gk(inner, tau1, tau_max);
  // t ∈ [1, ∞) directly.
  const auto outer = [&](double t) {
    return std::exp(-t * mu2 - kappa * (1.0 / std::tanh(t) - 1.0)) / std::sinh(t);
  };
  const double tail = gk(outer, 1.0, kTailCut);
  return std::exp(-kappa) * (head + tail) / (4.0 * kPi);
}

double max_abs(const SpMatrix& m) {
  double mx = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(m, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  }
  return mx;
}

// Connected components of the sparsity graph, ignoring entries below `cut`.
// The rotation-invariant Hamiltonians conserve m - n exactly; calibration
// noise (~1e-12) would otherwise glue the sectors together.
std::vector<std::vector<int>> components(const SpMatrix& m, double cut) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(m, k); it; ++it) {
      if (std::abs(it.value()) <= cut) continue;
      const int a = find(static_cast<int>(it.row()));
      const int b = find(static_cast<int>(it.col()));
      if (a != b) parent[a] = b;
    }
  }
  std::vector<std::vector<int>> by_root(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) by_root[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& c : by_root) {
    if (!c.empty()) out.push_back(std::move(c));
  }
  return out;
}

struct ComponentEig {
  std::vector<int> index;
  Eigen::VectorXd values;
  CMatrix vectors;
};

std::vector<ComponentEig> decompose(const SpMatrix& h, bool want_vectors) {
  std::vector<ComponentEig> out;
  const double cut = 1e-10 * max_abs(h);
  for (auto& idx : components(h, cut)) {
    const int s = static_cast<int>(idx.size());
    CMatrix block = CMatrix::Zero(s, s);
    std::vector<int> local(static_cast<size_t>(h.rows()), -1);
    for (int i = 0; i < s; ++i) local[idx[i]] = i;
    for (int i = 0; i < s; ++i) {
      for (SpMatrix::InnerIterator it(h, idx[i]); it; ++it) {
        if (local[it.row()] >= 0) block(local[it.row()], i) = it.value();
      }
    }
    block = 0.5 * (block + block.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(block, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on a Hamiltonian block");
    out.push_back({std::move(idx), es.eigenvalues(), want_vectors ? es.eigenvectors() : CMatrix()});
  }
  return out;
}

void check_shift(const Eigen::VectorXd& values, double mu2) {
  if (values.size() > 0 && values.minCoeff() + mu2 <= 1e-12) {
    throw DomainError("H + mu^2 is not positive on the truncated space");
  }
}

}  // namespace

double phi_integral(double v_norm2, double xi, double theta, double mu2, PhiVariant variant) {
  const double x = effective_xi(xi, variant);
  check_mu2(mu2);
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  if (!(v_norm2 >= 0.0)) throw DomainError("|v|^2 must be nonnegative");
  return phi_kappa(x * v_norm2 / theta, mu2);
}

double phi_integral_t(double v_norm2, double xi, double theta, double mu2) {
  check_mu2(mu2);
  if (!(v_norm2 > 0.0)) throw DomainError("|v|^2 must be positive");
  const std::array<double, 2> x{std::sqrt(v_norm2), 0.0};
  const std::array<double, 2> o{0.0, 0.0};
  const auto f = [&](double t) { return std::exp(-t * mu2) * heat_kernel_landau(x, o, t, xi, theta).real(); };
  return gk(f, 1e-300, 1.0) + gk(f, 1.0, kTailCut);
}

double bessel_k0(double x, double h) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("K0 needs x > 0");
  if (!(h > 0.0)) throw DomainError("step must be positive");
  double sum = 0.5 * std::exp(-x);
  for (int k = 1;; ++k) {
    const double arg = x * std::cosh(k * h);
    const double term = std::exp(-arg);
    sum += term;
    if (arg > 745.0 || term < 1e-18 * sum) break;
  }
  return h * sum;
}

double bessel_k0_square_integral() {
  const auto f = [](double x) {
    const double k = bessel_k0(x);
    return k * k;
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  return ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, kInf);
}

double phi_square_integral(double xi, double theta, double mu2, PhiVariant variant) {
  const double x = effective_xi(xi, variant);
  check_mu2(mu2);
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  // ∫Φ(κ)² dκ depends on μ² only.
  static std::mutex mu;
  static std::map<double, double> cache;
  double integral = 0.0;
  {
    std::lock_guard<std::mutex> lock(mu);
    const auto it = cache.find(mu2);
    if (it != cache.end()) integral = it->second;
  }
  if (integral == 0.0) {
    const auto f = [mu2](double k) {
      const double p = phi_kappa(k, mu2);
      return p * p;
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    integral = ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, kInf);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(mu2, integral);
  }
  return kPi * theta / x * integral;
}

HsLandauReport hs_norm_landau(const TruncatedElement& a, double xi, double mu2) {
  HsLandauReport r;
  const double norm = l2_function_norm(a);
  r.norm_a_sq = norm * norm;
  if (xi == 1.0) {
    r.divergent = true;
    r.phi_sq = phi_square_integral(xi, a.theta(), mu2);
    r.value = kInf;
    r.bound = kInf;
    return r;
  }
  const PhiVariant v = xi < 0.0 ? PhiVariant::Psi : PhiVariant::Phi;
  r.phi_sq = phi_square_integral(xi, a.theta(), mu2, v);
  const double gap2 = (1.0 - xi) * (1.0 - xi);
  r.value = r.norm_a_sq * r.phi_sq / (4.0 * gap2);
  r.bound = kPi * a.theta() / (192.0 * std::abs(xi) * gap2) * r.norm_a_sq;
  r.slack = r.bound - r.value;
  return r;
}

ResolventStandardReport resolvent_kernel_standard(const TruncatedElement& a, double mu2) {
  if (!(mu2 > 0.0) || !std::isfinite(mu2)) throw DomainError("mu^2 must be positive");
  ResolventStandardReport r;
  const double norm = l2_function_norm(a);
  r.norm_a_sq = norm * norm;
  boost::math::quadrature::exp_sinh<double> es;
  r.resolvent_sq = 2.0 * kPi * es.integrate([mu2](double p) { return p / ((p * p + mu2) * (p * p + mu2)); }, 0.0, kInf);
  r.value = r.norm_a_sq * r.resolvent_sq;
  return r;
}

std::complex<double> heat_kernel_landau(const std::array<double, 2>& x, const std::array<double, 2>& y, double t,
                                        double xi, double theta) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  if (!(xi > 0.0)) throw DomainError("heat kernel needs xi > 0");
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  // xΘ⁻¹y with Θ⁻¹ = θ⁻¹[[0, -1], [1, 0]].
  const double form = (x[1] * y[0] - x[0] * y[1]) / theta;
  const double d0 = x[0] - y[0];
  const double d1 = x[1] - y[1];
  const double gauss = std::exp(-xi / theta * (d0 * d0 + d1 * d1) / std::tanh(t));
  return std::polar(gauss / (4.0 * kPi * std::sinh(t)), 2.0 * xi * form);
}

SemigroupCheck heat_semigroup_check(double t1, double t2, double xi, double theta, int grid_points,
                                    double half_width) {
  if (grid_points < 3) throw DomainError("grid needs at least 3 points");
  const double b = 4.0 * xi / theta;
  const double h = 2.0 * half_width / (grid_points - 1);
  const std::array<std::array<double, 4>, 3> pairs{{{0.0, 0.0, 0.5, 0.0}, {0.3, -0.2, -0.4, 0.6}, {1.0, 0.5, 0.2, -0.3}}};
  SemigroupCheck out;
  for (const auto& p : pairs) {
    const std::array<double, 2> x{p[0], p[1]};
    const std::array<double, 2> y{p[2], p[3]};
    std::complex<double> sum = 0.0;
    for (int i = 0; i < grid_points; ++i) {
      for (int j = 0; j < grid_points; ++j) {
        const std::array<double, 2> z{-half_width + i * h, -half_width + j * h};
        sum += heat_kernel_landau(x, z, t1, xi, theta) * heat_kernel_landau(z, y, t2, xi, theta);
      }
    }
    sum *= h * h;
    const std::complex<double> want = heat_kernel_landau(x, y, t1 + t2, xi, theta) / b;
    out.max_abs_error = std::max(out.max_abs_error, std::abs(sum - want));
    out.max_abs_value = std::max(out.max_abs_value, std::abs(want));
  }
  return out;
}

double truncated_resolvent_hs2(const TruncatedElement& a, int trunc, Hamiltonian h, const DiracParams& params,
                               double mu2, const LadderTable& table) {
  if (a.trunc() > trunc) throw DimensionError("element truncation exceeds the operator truncation");
  DiracParams p = params;
  p.theta = a.theta();
  const SpMatrix hm = hamiltonian_matrix(h, p, trunc, table);
  const int na = a.trunc();
  const CMatrix x = a.coeffs().adjoint() * a.coeffs();
  double total = 0.0;
  for (const auto& c : decompose(hm, true)) {
    check_shift(c.values, mu2);
    const Eigen::VectorXd w = (c.values.array() + mu2).square().inverse();
    const CMatrix r2 = c.vectors * w.asDiagonal() * c.vectors.adjoint();
    const int s = static_cast<int>(c.index.size());
    // tr((1 ⊗ X) R²) restricted to pairs sharing a column index.
    for (int i = 0; i < s; ++i) {
      const int mi = c.index[i] % trunc;
      const int ni = c.index[i] / trunc;
      if (mi >= na) continue;
      for (int j = 0; j < s; ++j) {
        const int mj = c.index[j] % trunc;
        if (c.index[j] / trunc != ni || mj >= na) continue;
        total += (x(mi, mj) * r2(j, i)).real();
      }
    }
  }
  return total;
}

double bare_resolvent_hs2(int trunc, Hamiltonian h, const DiracParams& params, double mu2, const LadderTable& table) {
  const SpMatrix hm = hamiltonian_matrix(h, params, trunc, table);
  double total = 0.0;
  for (const auto& c : decompose(hm, false)) {
    check_shift(c.values, mu2);
    total += (c.values.array() + mu2).square().inverse().sum();
  }
  return total;
}

double dirac_resolvent_hs2(const TruncatedElement& a, int trunc, DiracKind kind, const DiracParams& params,
                           const LadderTable& table) {
  if (kind == DiracKind::D0) {
    DiracParams p = params;
    p.omega = 0.0;
    return 2.0 * truncated_resolvent_hs2(a, trunc, Hamiltonian::Harmonic, p, 1.0, table);
  }
  if (kind == DiracKind::Landau) {
    const double s = 4.0 * params.xi / a.theta();
    return truncated_resolvent_hs2(a, trunc, Hamiltonian::Landau, params, 1.0 - s, table) +
           truncated_resolvent_hs2(a, trunc, Hamiltonian::Landau, params, 1.0 + s, table);
  }
  throw DomainError("resolvent diagnostic is available for D0 and landau");
}

std::vector<SweepRow> phi_sweep(double xi, double theta, double mu2, double v_min, double v_max, int count) {
  if (count < 0) throw DomainError("count must be nonnegative");
  if (count == 0) return {};
  if (!(v_min > 0.0) || !(v_max >= v_min)) throw DomainError("need 0 < v_min <= v_max");
  std::vector<SweepRow> rows;
  for (int i = 0; i < count; ++i) {
    const double v = count == 1 ? v_min : v_min + (v_max - v_min) * i / (count - 1);
    SweepRow r;
    r.param = v;
    r.value = phi_integral(v * v, xi, theta, mu2);
    r.bound = bessel_k0(std::abs(xi) * v * v / theta) / (4.0 * kPi);
    r.slack = r.bound - r.value;
    rows.push_back(r);
  }
  return rows;
}

std::vector<SweepRow> phi_square_sweep(const std::vector<double>& xis, double theta, double mu2) {
  std::vector<SweepRow> rows;
  for (double xi : xis) {
    SweepRow r;
    r.param = xi;
    r.value = phi_square_integral(xi, theta, mu2, xi < 0.0 ? PhiVariant::Psi : PhiVariant::Phi);
    r.bound = kPi * theta / (48.0 * std::abs(xi));
    r.slack = r.bound - r.value;
    rows.push_back(r);
  }
  return rows;
}

std::vector<SweepRow> hs_sweep(const TruncatedElement& a, const std::vector<double>& xis, double mu2) {
  std::vector<SweepRow> rows;
  for (double xi : xis) {
    const auto h = hs_norm_landau(a, xi, mu2);
    rows.push_back({xi, h.value, h.bound, h.slack});
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param,value,bound,slack\n";
  for (const auto& r : rows) {
    out += format_double(r.param) + "," + format_double(r.value) + "," + format_double(r.bound) + "," +
           format_double(r.slack) + "\n";
  }
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("slope needs two or more matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log-log slope needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw DomainError("degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace ncg
