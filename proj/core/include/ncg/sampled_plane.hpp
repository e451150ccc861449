#pragma once

// Brute-force oracle on a sampled plane.
//
// Functions are sampled on a uniform periodic n×n grid x_i = -L + i·h,
// h = 2L/n. Integrals use the trapezoid rule, derivatives use the Fourier
// differentiation matrix of the grid. Both are spectrally accurate for
// Gaussian×polynomial integrands that are negligible at the box edge.
//
// values(i, j) holds f(x1 = x_i, x2 = x_j).

#include <functional>
#include <string>
#include <vector>

#include "ncg/fock_algebra.hpp"
#include "ncg/ladder.hpp"
#include "ncg/types.hpp"

namespace ncg {

struct PlaneGrid {
  int n_pts = 128;
  double half_width = 8.0;

  double spacing() const { return 2.0 * half_width / n_pts; }
  double coord(int i) const { return -half_width + i * spacing(); }
  RVector coords() const;
  /// Throws DomainError unless n_pts ≥ 16 and half_width > 0.
  void validate() const;

  /// Default grid for deformation parameter theta: 128 points, L = 8√θ.
  static PlaneGrid for_theta(double theta, int n_pts = 128, double half_width_units = 8.0);
};

class SampledFunction {
 public:
  SampledFunction(PlaneGrid grid, CMatrix values, double theta);

  static SampledFunction zero(const PlaneGrid& grid, double theta);
  static SampledFunction from_callable(const PlaneGrid& grid, double theta,
                                       const std::function<cplx(double, double)>& f);

  const PlaneGrid& grid() const { return grid_; }
  const CMatrix& values() const { return values_; }
  double theta() const { return theta_; }

  SampledFunction conj() const;
  /// ∫ f d²x by the trapezoid rule.
  cplx integral() const;
  double l2_norm() const;
  /// Largest |f| on points with max(|x1|, |x2|) ≥ radius.
  double max_abs_outside(double radius) const;

  SampledFunction& operator+=(const SampledFunction& o);
  SampledFunction& operator*=(cplx s);
  friend SampledFunction operator*(cplx s, SampledFunction f) { return f *= s; }

 private:
  PlaneGrid grid_;
  CMatrix values_;
  double theta_;
};

void require_same_grid(const SampledFunction& a, const SampledFunction& b);

/// Pointwise product.
SampledFunction multiply(const SampledFunction& a, const SampledFunction& b);
/// ∂_μ by Fourier differentiation along axis mu ∈ {1, 2}.
SampledFunction partial(const SampledFunction& f, int mu);

enum class QuadratureRule { Trapezoid, GaussHermite };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::Trapezoid;
  int n_nodes = 64;
  /// Radius beyond which the decaying factor is treated as zero; ≤ 0 selects 6√θ.
  double tail_cut = 0.0;

  void validate() const;
};

struct StarQuadratureResult {
  SampledFunction value;
  /// Set when neither input has decayed to 1e-8 of its peak at the tail cut.
  bool tail_warning = false;
  double tail_ratio = 0.0;
};

/// (f⋆g)(x) = (πθ)^-2 ∫∫ f(x+y) g(x+z) exp(-2i yΘ⁻¹z) d²y d²z.
///
/// At least one factor must decay at the tail cut; the other may grow
/// polynomially (coordinate functions are allowed). O(n⁴) per product.
StarQuadratureResult moyal_star_quadrature(const SampledFunction& f, const SampledFunction& g,
                                           const QuadratureSpec& q = {});

/// ∫ f d²x of a callable, either on a trapezoid box of half-width 8√θ or by a
/// tensor Gauss–Hermite rule adapted to the weight exp(-|x|²/θ).
cplx integrate_plane(const std::function<cplx(double, double)>& f, double theta, const QuadratureSpec& q);

/// Samples of f_mn. f_00 = 2exp(-|x|²/θ); higher functions come from the
/// relations z̄⋆f = z̄f - θ∂_z f (row raise) and f⋆z = zf - θ∂_z̄ f (column
/// raise), each step rescaled by a positive factor to ‖f_mn‖₂² = 2πθ.
SampledFunction synthesize_fmn(int m, int n, double theta, const PlaneGrid& grid);

/// All f_pq with p, q ≤ kmax, indexed [p * (kmax + 1) + q].
std::vector<SampledFunction> synthesize_basis(int kmax, double theta, const PlaneGrid& grid);

/// a_mn = (2πθ)⁻¹ ∫ conj(f_mn) a for m, n < trunc.
TruncatedElement project_coefficients(const SampledFunction& f, int trunc);
/// Same projection against a precomputed basis from synthesize_basis.
TruncatedElement project_coefficients(const SampledFunction& f, int trunc,
                                      const std::vector<SampledFunction>& basis, int kmax);

/// Σ a_mn f_mn on the grid; requires trunc - 1 ≤ kmax of the basis.
SampledFunction synthesize_element(const TruncatedElement& a, const std::vector<SampledFunction>& basis,
                                   int kmax);

/// Calibrates the six ladder stencils on the window m, n < K (K ≤ 12).
///
/// ∂ and ∂̄ come from Fourier differentiation of f_mn, the pointwise x̃_μ
/// action from multiplication by x̃_μ; the star-left and star-right actions
/// are twice the row and column parts of the pointwise action. Throws
/// CalibrationError if any fit residual exceeds max_residual.
LadderTable ladder_calibration(double theta, int K, const PlaneGrid& grid, double max_residual = 1e-5);

/// Process-wide table calibrated at θ = 1, K = 8 on the default grid.
const LadderTable& default_ladder_table();

/// "x1,x2,re,im" rows in grid order.
std::string grid_to_csv(const SampledFunction& f);

}  // namespace ncg
