#include "ncg/sampled_plane.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>

#include "ncg/errors.hpp"
#include "ncg/format.hpp"

namespace ncg {

RVector PlaneGrid::coords() const {
  RVector x(n_pts);
  for (int i = 0; i < n_pts; ++i) x(i) = coord(i);
  return x;
}

void PlaneGrid::validate() const {
  if (n_pts < 16) throw DomainError("sampled grid needs at least 16 points per axis");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw DomainError("grid half-width must be positive");
}

PlaneGrid PlaneGrid::for_theta(double theta, int n_pts, double half_width_units) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  return {n_pts, half_width_units * std::sqrt(theta)};
}

SampledFunction::SampledFunction(PlaneGrid grid, CMatrix values, double theta)
    : grid_(grid), values_(std::move(values)), theta_(theta) {
  grid_.validate();
  if (!(theta_ > 0.0)) throw DomainError("theta must be positive");
  if (values_.rows() != grid_.n_pts || values_.cols() != grid_.n_pts) {
    throw DimensionError("sample array does not match grid");
  }
  if (!values_.allFinite()) throw DomainError("sampled values must be finite");
}

SampledFunction SampledFunction::zero(const PlaneGrid& grid, double theta) {
  return {grid, CMatrix::Zero(grid.n_pts, grid.n_pts), theta};
}

SampledFunction SampledFunction::from_callable(const PlaneGrid& grid, double theta,
                                               const std::function<cplx(double, double)>& f) {
  CMatrix v(grid.n_pts, grid.n_pts);
  for (int j = 0; j < grid.n_pts; ++j) {
    for (int i = 0; i < grid.n_pts; ++i) v(i, j) = f(grid.coord(i), grid.coord(j));
  }
  return {grid, std::move(v), theta};
}

SampledFunction SampledFunction::conj() const { return {grid_, values_.conjugate(), theta_}; }

cplx SampledFunction::integral() const {
  const double h = grid_.spacing();
  return values_.sum() * h * h;
}

double SampledFunction::l2_norm() const { return values_.norm() * grid_.spacing(); }

double SampledFunction::max_abs_outside(double radius) const {
  double m = 0.0;
  for (int j = 0; j < grid_.n_pts; ++j) {
    for (int i = 0; i < grid_.n_pts; ++i) {
      if (std::max(std::abs(grid_.coord(i)), std::abs(grid_.coord(j))) >= radius) {
        m = std::max(m, std::abs(values_(i, j)));
      }
    }
  }
  return m;
}

void require_same_grid(const SampledFunction& a, const SampledFunction& b) {
  if (a.grid().n_pts != b.grid().n_pts || a.grid().half_width != b.grid().half_width) {
    throw DimensionError("sampled functions live on different grids");
  }
  if (a.theta() != b.theta()) throw DimensionError("sampled functions carry different theta");
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& o) {
  require_same_grid(*this, o);
  values_ += o.values_;
  return *this;
}

SampledFunction& SampledFunction::operator*=(cplx s) {
  values_ *= s;
  return *this;
}

SampledFunction multiply(const SampledFunction& a, const SampledFunction& b) {
  require_same_grid(a, b);
  return {a.grid(), a.values().cwiseProduct(b.values()), a.theta()};
}

namespace {

// Periodic Fourier differentiation matrix on n points with period 2L.
const RMatrix& fourier_diff(const PlaneGrid& g) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, RMatrix> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(g.n_pts, g.half_width);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int n = g.n_pts;
  const double scale = kPi / g.half_width;
  RMatrix d = RMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const double arg = kPi * (j - k) / n;
      const double sgn = ((j - k) % 2 == 0) ? 1.0 : -1.0;
      d(j, k) = (n % 2 == 0) ? 0.5 * sgn / std::tan(arg) : 0.5 * sgn / std::sin(arg);
      d(j, k) *= scale;
    }
  }
  return cache.emplace(key, std::move(d)).first->second;
}

}  // namespace

SampledFunction partial(const SampledFunction& f, int mu) {
  const RMatrix& d = fourier_diff(f.grid());
  const CMatrix dc = d.cast<cplx>();
  if (mu == 1) return {f.grid(), dc * f.values(), f.theta()};
  if (mu == 2) return {f.grid(), f.values() * dc.transpose(), f.theta()};
  throw DomainError("partial derivative index must be 1 or 2");
}

void QuadratureSpec::validate() const {
  if (n_nodes < 8) throw DomainError("quadrature needs at least 8 nodes");
  if (!std::isfinite(tail_cut)) throw DomainError("tail cut must be finite");
}

namespace {

// (f ⋆_{sΘ} g)(x) with g decaying; s = ±1 flips the deformation.
CMatrix star_core(const CMatrix& f, const CMatrix& g, const PlaneGrid& grid, double theta, double sign,
                  double tail_cut) {
  const int n = grid.n_pts;
  const double h = grid.spacing();
  const double th = sign * theta;
  const RVector x = grid.coords();
  const int nd = 2 * n - 1;
  RVector y(nd);
  for (int d = 0; d < nd; ++d) y(d) = (d - (n - 1)) * h;

  // ĝ(y1, y2) = Σ_w g(w) exp(-(2i/θ)(y2 w1 - y1 w2)) h², indexed [d1, d2].
  CMatrix p(nd, n);
  CMatrix qm(nd, n);
  for (int d = 0; d < nd; ++d) {
    for (int a = 0; a < n; ++a) {
      p(d, a) = std::exp(cplx{0.0, -2.0 * y(d) * x(a) / th});
      qm(d, a) = std::exp(cplx{0.0, 2.0 * y(d) * x(a) / th});
    }
  }
  CMatrix ghat = (qm * g.transpose() * p.transpose()) * (h * h);
  for (int d2 = 0; d2 < nd; ++d2) {
    for (int d1 = 0; d1 < nd; ++d1) {
      if (std::hypot(y(d1), y(d2)) > tail_cut) ghat(d1, d2) = 0.0;
    }
  }

  // (f⋆g)(x_i, x_j) = (πθ)^-2 h² Σ_{a,b} f(a,b) ĝ(x_a - x_i, x_b - x_j) e^{(2i/θ)(x_b x_i - x_a x_j)}.
  CMatrix out(n, n);
  CMatrix hf(n, n);
  CMatrix phase(n, n);
  for (int j = 0; j < n; ++j) {
    for (int a = 0; a < n; ++a) phase(a, j) = std::exp(cplx{0.0, -2.0 * x(a) * x(j) / th});
  }
  const double pre = h * h / (kPi * kPi * theta * theta);
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < n; ++b) {
      hf.col(b) = f.col(b) * std::exp(cplx{0.0, 2.0 * x(b) * x(i) / th});
    }
    for (int j = 0; j < n; ++j) {
      const auto block = ghat.block(n - 1 - i, n - 1 - j, n, n);
      const CVector rows = hf.cwiseProduct(block).rowwise().sum();
      out(i, j) = pre * phase.col(j).cwiseProduct(rows).sum();
    }
  }
  return out;
}

}  // namespace

StarQuadratureResult moyal_star_quadrature(const SampledFunction& f, const SampledFunction& g,
                                           const QuadratureSpec& q) {
  require_same_grid(f, g);
  q.validate();
  if (q.rule != QuadratureRule::Trapezoid) {
    throw ConfigurationError("sampled star products use the trapezoid rule; Gauss-Hermite needs callables");
  }
  const double theta = f.theta();
  const PlaneGrid& grid = f.grid();
  const double cut = q.tail_cut > 0.0 ? q.tail_cut : 6.0 * std::sqrt(theta);
  const double alias_period = kPi * theta / grid.spacing();
  if (cut >= alias_period - cut) {
    throw ConfigurationError("grid spacing too coarse for the requested tail cut");
  }
  auto tail = [&](const SampledFunction& s) {
    const double peak = s.values().cwiseAbs().maxCoeff();
    return peak > 0.0 ? s.max_abs_outside(cut) / peak : 0.0;
  };
  const double tg = tail(g);
  const double tf = tail(f);
  constexpr double kDecay = 1e-8;
  StarQuadratureResult r{SampledFunction::zero(grid, theta), false, 0.0};
  if (tg <= kDecay || tg <= tf) {
    r.value = SampledFunction(grid, star_core(f.values(), g.values(), grid, theta, 1.0, cut), theta);
    r.tail_ratio = tg;
  } else {
    // f ⋆_Θ g = g ⋆_{-Θ} f
    r.value = SampledFunction(grid, star_core(g.values(), f.values(), grid, theta, -1.0, cut), theta);
    r.tail_ratio = tf;
  }
  r.tail_warning = r.tail_ratio > kDecay;
  return r;
}

namespace {

// Gauss–Hermite nodes and weights for exp(-t²) via the Golub–Welsch eigenproblem.
std::pair<RVector, RVector> gauss_hermite(int n) {
  RMatrix j = RMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    j(k, k - 1) = j(k - 1, k) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(j);
  RVector w = es.eigenvectors().row(0).transpose().array().square() * std::sqrt(kPi);
  return {es.eigenvalues(), w};
}

}  // namespace

cplx integrate_plane(const std::function<cplx(double, double)>& f, double theta, const QuadratureSpec& q) {
  q.validate();
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  cplx acc = 0.0;
  if (q.rule == QuadratureRule::Trapezoid) {
    const PlaneGrid g = PlaneGrid::for_theta(theta, std::max(q.n_nodes, 16));
    const double h = g.spacing();
    for (int j = 0; j < g.n_pts; ++j) {
      for (int i = 0; i < g.n_pts; ++i) acc += f(g.coord(i), g.coord(j));
    }
    return acc * h * h;
  }
  const auto [t, w] = gauss_hermite(q.n_nodes);
  const double s = std::sqrt(theta);
  for (int j = 0; j < q.n_nodes; ++j) {
    for (int i = 0; i < q.n_nodes; ++i) {
      const double wt = w(i) * w(j) * std::exp(t(i) * t(i) + t(j) * t(j));
      acc += wt * f(s * t(i), s * t(j));
    }
  }
  return acc * theta;
}

namespace {

SampledFunction gaussian00(double theta, const PlaneGrid& grid) {
  return SampledFunction::from_callable(grid, theta, [theta](double x1, double x2) {
    return cplx{2.0 * std::exp(-(x1 * x1 + x2 * x2) / theta)};
  });
}

SampledFunction coordinate_z(double theta, const PlaneGrid& grid, bool conjugate) {
  return SampledFunction::from_callable(grid, theta, [conjugate](double x1, double x2) {
    return conjugate ? cplx{x1, -x2} : cplx{x1, x2};
  });
}

SampledFunction normalized(SampledFunction f) {
  const double target = std::sqrt(2.0 * kPi * f.theta());
  const double nrm = f.l2_norm();
  if (!(nrm > 0.0)) throw NumericalError("ladder step produced a vanishing function");
  f *= cplx{target / nrm};
  return f;
}

// z̄⋆f = z̄f - θ∂_z f, with ∂_z = (∂₁ - i∂₂)/2.
SampledFunction raise_row(const SampledFunction& f, const SampledFunction& zbar) {
  SampledFunction d1 = partial(f, 1);
  SampledFunction d2 = partial(f, 2);
  SampledFunction out = multiply(zbar, f);
  out += cplx{-0.5 * f.theta()} * d1;
  out += cplx{0.0, 0.5 * f.theta()} * d2;
  return normalized(std::move(out));
}

// f⋆z = zf - θ∂_z̄ f, with ∂_z̄ = (∂₁ + i∂₂)/2.
SampledFunction raise_col(const SampledFunction& f, const SampledFunction& z) {
  SampledFunction d1 = partial(f, 1);
  SampledFunction d2 = partial(f, 2);
  SampledFunction out = multiply(z, f);
  out += cplx{-0.5 * f.theta()} * d1;
  out += cplx{0.0, -0.5 * f.theta()} * d2;
  return normalized(std::move(out));
}

void require_fits(int m, int n, double theta, const PlaneGrid& grid) {
  // Gaussian×polynomial envelope peaks near r² = θ(m+n)/2; keep the edge below 1e-10 of it.
  const double r_edge = grid.half_width;
  const double k = 0.5 * (m + n);
  const double log_edge = (m + n) * std::log(r_edge / std::sqrt(theta)) - r_edge * r_edge / theta;
  const double log_peak = k > 0 ? k * std::log(k) - k : 0.0;
  if (log_edge - log_peak > std::log(1e-10)) {
    throw DomainError("grid too small for f_" + std::to_string(m) + std::to_string(n) +
                      ": Gaussian×polynomial support reaches the box edge");
  }
}

}  // namespace

std::vector<SampledFunction> synthesize_basis(int kmax, double theta, const PlaneGrid& grid) {
  grid.validate();
  if (kmax < 0) throw DomainError("basis size must be nonnegative");
  require_fits(kmax, kmax, theta, grid);
  const SampledFunction z = coordinate_z(theta, grid, false);
  const SampledFunction zbar = coordinate_z(theta, grid, true);
  const int k1 = kmax + 1;
  std::vector<SampledFunction> out(static_cast<size_t>(k1 * k1), SampledFunction::zero(grid, theta));
  out[0] = gaussian00(theta, grid);
  for (int p = 1; p <= kmax; ++p) out[p * k1] = raise_row(out[(p - 1) * k1], zbar);
  for (int p = 0; p <= kmax; ++p) {
    for (int q = 1; q <= kmax; ++q) out[p * k1 + q] = raise_col(out[p * k1 + q - 1], z);
  }
  return out;
}

SampledFunction synthesize_fmn(int m, int n, double theta, const PlaneGrid& grid) {
  grid.validate();
  if (m < 0 || n < 0) throw DomainError("basis indices must be nonnegative");
  require_fits(m, n, theta, grid);
  const SampledFunction z = coordinate_z(theta, grid, false);
  const SampledFunction zbar = coordinate_z(theta, grid, true);
  SampledFunction f = gaussian00(theta, grid);
  for (int p = 0; p < m; ++p) f = raise_row(f, zbar);
  for (int q = 0; q < n; ++q) f = raise_col(f, z);
  return f;
}

TruncatedElement project_coefficients(const SampledFunction& f, int trunc,
                                      const std::vector<SampledFunction>& basis, int kmax) {
  if (trunc - 1 > kmax) throw DimensionError("projection basis smaller than requested truncation");
  const double h = f.grid().spacing();
  const double pre = h * h / (2.0 * kPi * f.theta());
  CMatrix c(trunc, trunc);
  for (int m = 0; m < trunc; ++m) {
    for (int n = 0; n < trunc; ++n) {
      const SampledFunction& b = basis[static_cast<size_t>(m * (kmax + 1) + n)];
      require_same_grid(b, f);
      c(m, n) = pre * (b.values().conjugate().cwiseProduct(f.values())).sum();
    }
  }
  return {std::move(c), f.theta()};
}

TruncatedElement project_coefficients(const SampledFunction& f, int trunc) {
  const auto basis = synthesize_basis(trunc - 1, f.theta(), f.grid());
  return project_coefficients(f, trunc, basis, trunc - 1);
}

SampledFunction synthesize_element(const TruncatedElement& a, const std::vector<SampledFunction>& basis,
                                   int kmax) {
  if (a.trunc() - 1 > kmax) throw DimensionError("synthesis basis smaller than element truncation");
  SampledFunction out = SampledFunction::zero(basis.front().grid(), a.theta());
  for (int m = 0; m < a.trunc(); ++m) {
    for (int n = 0; n < a.trunc(); ++n) {
      if (a(m, n) == cplx{0.0}) continue;
      out += a(m, n) * basis[static_cast<size_t>(m * (kmax + 1) + n)];
    }
  }
  return out;
}

namespace {

struct StencilFit {
  LadderStencil stencil;
  double residual = 0.0;
  double leakage = 0.0;
};

// Fits op(f_mn) ≈ θ^-½ (c_rl √m e_{m-1,n} + c_rr √(m+1) e_{m+1,n} + c_cr √(n+1) e_{m,n+1} + c_cl √n e_{m,n-1}).
StencilFit fit_stencil(const std::vector<CMatrix>& obs, int K, double theta) {
  const double s = 1.0 / std::sqrt(theta);
  cplx num[4] = {};
  double den[4] = {};
  auto visit = [&](auto&& fn) {
    for (int m = 0; m < K; ++m) {
      for (int n = 0; n < K; ++n) {
        const CMatrix& o = obs[static_cast<size_t>(m * K + n)];
        if (m >= 1) fn(0, o(m - 1, n), s * std::sqrt(double(m)));
        fn(1, o(m + 1, n), s * std::sqrt(double(m + 1)));
        fn(2, o(m, n + 1), s * std::sqrt(double(n + 1)));
        if (n >= 1) fn(3, o(m, n - 1), s * std::sqrt(double(n)));
      }
    }
  };
  visit([&](int k, cplx v, double w) {
    num[k] += w * v;
    den[k] += w * w;
  });
  cplx c[4];
  for (int k = 0; k < 4; ++k) c[k] = num[k] / den[k];
  double cmax = 0.0;
  for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
  for (auto& v : c) {
    if (std::abs(v) < 1e-12 * cmax) v = 0.0;
  }
  StencilFit fit;
  fit.stencil = {c[0], c[1], c[2], c[3]};
  visit([&](int k, cplx v, double w) { fit.residual = std::max(fit.residual, std::abs(v - c[k] * w)); });
  for (int m = 0; m < K; ++m) {
    for (int n = 0; n < K; ++n) {
      const CMatrix& o = obs[static_cast<size_t>(m * K + n)];
      for (int p = 0; p < o.rows(); ++p) {
        for (int q = 0; q < o.cols(); ++q) {
          const bool ladder = (q == n && (p == m - 1 || p == m + 1)) || (p == m && (q == n - 1 || q == n + 1));
          if (!ladder) fit.leakage = std::max(fit.leakage, std::abs(o(p, q)));
        }
      }
    }
  }
  return fit;
}

}  // namespace

LadderTable ladder_calibration(double theta, int K, const PlaneGrid& grid, double max_residual) {
  if (K < 2 || K > 12) throw DomainError("calibration window K must lie in [2, 12]");
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  grid.validate();
  const auto basis = synthesize_basis(K, theta, grid);
  const int k1 = K + 1;

  const SampledFunction xt1 = SampledFunction::from_callable(
      grid, theta, [theta](double, double x2) { return cplx{-2.0 * x2 / theta}; });
  const SampledFunction xt2 = SampledFunction::from_callable(
      grid, theta, [theta](double x1, double) { return cplx{2.0 * x1 / theta}; });

  // Observations per operator: ∂, ∂̄, pointwise x̃₁, pointwise x̃₂.
  std::array<std::vector<CMatrix>, 4> obs;
  const double r = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < K; ++m) {
    for (int n = 0; n < K; ++n) {
      const SampledFunction& f = basis[static_cast<size_t>(m * k1 + n)];
      const SampledFunction d1 = partial(f, 1);
      const SampledFunction d2 = partial(f, 2);
      SampledFunction d = cplx{r} * d1;
      d += cplx{0.0, -r} * d2;
      SampledFunction db = cplx{r} * d1;
      db += cplx{0.0, r} * d2;
      obs[0].push_back(project_coefficients(d, k1, basis, K).coeffs());
      obs[1].push_back(project_coefficients(db, k1, basis, K).coeffs());
      obs[2].push_back(project_coefficients(multiply(xt1, f), k1, basis, K).coeffs());
      obs[3].push_back(project_coefficients(multiply(xt2, f), k1, basis, K).coeffs());
    }
  }

  std::array<StencilFit, 4> fits;
  for (int k = 0; k < 4; ++k) fits[k] = fit_stencil(obs[k], K, theta);

  CalibrationInfo info;
  info.theta = theta;
  info.window = K;
  info.grid_points = grid.n_pts;
  info.box_half_width = grid.half_width;
  info.phase_convention = "f_00 = 2exp(-|x|^2/theta); raising steps rescaled by positive reals";
  std::array<LadderStencil, kLadderOpCount> st{};
  st[static_cast<int>(LadderOp::D)] = fits[0].stencil;
  st[static_cast<int>(LadderOp::Dbar)] = fits[1].stencil;
  st[static_cast<int>(LadderOp::Xt1Left)] = cplx{2.0} * fits[2].stencil.left_part();
  st[static_cast<int>(LadderOp::Xt2Left)] = cplx{2.0} * fits[3].stencil.left_part();
  st[static_cast<int>(LadderOp::Xt1Right)] = cplx{2.0} * fits[2].stencil.right_part();
  st[static_cast<int>(LadderOp::Xt2Right)] = cplx{2.0} * fits[3].stencil.right_part();
  const int src[kLadderOpCount] = {0, 1, 2, 3, 2, 3};
  for (int k = 0; k < kLadderOpCount; ++k) {
    info.op_residual[k] = fits[src[k]].residual;
    info.fit_residual = std::max(info.fit_residual, fits[src[k]].residual);
    info.leakage = std::max(info.leakage, fits[src[k]].leakage);
  }
  if (info.fit_residual > max_residual || info.leakage > max_residual) {
    throw CalibrationError("ladder calibration residual " + format_sig(info.fit_residual, 3) + " (leakage " +
                           format_sig(info.leakage, 3) + ") exceeds " + format_sig(max_residual, 3));
  }
  return LadderTable(st, -0.5, info);
}

const LadderTable& default_ladder_table() {
  static const LadderTable table = ladder_calibration(1.0, 8, PlaneGrid::for_theta(1.0));
  return table;
}

std::string grid_to_csv(const SampledFunction& f) {
  std::string out = "x1,x2,re,im\n";
  const PlaneGrid& g = f.grid();
  for (int i = 0; i < g.n_pts; ++i) {
    for (int j = 0; j < g.n_pts; ++j) {
      out += format_double(g.coord(i));
      out += ',';
      out += format_double(g.coord(j));
      out += ',';
      out += format_double(f.values()(i, j).real());
      out += ',';
      out += format_double(f.values()(i, j).imag());
      out += '\n';
    }
  }
  return out;
}

}  // namespace ncg
