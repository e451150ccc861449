#pragma once

// Truncated Moyal algebra in the matrix base.
//
// An element a = Σ a_mn f_mn is stored as its N×N coefficient matrix together
// with θ. The star product is the matrix product, the involution is the
// conjugate transpose and ∫ a = 2πθ tr(a). Operations are exact on elements
// that vanish near the truncation boundary ("interior-supported"); each ladder
// step can push one index past N-1, where it is dropped.

#include <string>
#include <string_view>

#include "ncg/ladder.hpp"
#include "ncg/types.hpp"

namespace ncg {

class TruncatedElement {
 public:
  /// Takes ownership of a square coefficient matrix. Requires N ≥ 2 and θ > 0.
  TruncatedElement(CMatrix coeffs, double theta);

  static TruncatedElement zero(int n, double theta);
  static TruncatedElement identity(int n, double theta);
  /// Matrix unit e_{mn}, i.e. the coefficients of f_mn.
  static TruncatedElement unit(int m, int n, int trunc, double theta);

  int trunc() const { return static_cast<int>(coeffs_.rows()); }
  double theta() const { return theta_; }
  const CMatrix& coeffs() const { return coeffs_; }
  cplx operator()(int m, int n) const { return coeffs_(m, n); }

  bool is_hermitian(double tol = 1e-12) const;
  /// True when a_mn = 0 (up to tol) whenever m ≥ N - margin or n ≥ N - margin.
  bool is_interior(int margin, double tol = 0.0) const;
  /// Copy with every coefficient at m ≥ N - margin or n ≥ N - margin set to zero.
  TruncatedElement interior_projected(int margin) const;

  TruncatedElement& operator+=(const TruncatedElement& o);
  TruncatedElement& operator-=(const TruncatedElement& o);
  TruncatedElement& operator*=(cplx s);
  friend TruncatedElement operator+(TruncatedElement a, const TruncatedElement& b) { return a += b; }
  friend TruncatedElement operator-(TruncatedElement a, const TruncatedElement& b) { return a -= b; }
  friend TruncatedElement operator*(cplx s, TruncatedElement a) { return a *= s; }

 private:
  CMatrix coeffs_;
  double theta_;
};

/// Throws DimensionError unless a and b share truncation and θ.
void require_compatible(const TruncatedElement& a, const TruncatedElement& b);

TruncatedElement star(const TruncatedElement& a, const TruncatedElement& b);
TruncatedElement involution(const TruncatedElement& a);
/// ∫ d²x a(x) = 2πθ Σ_m a_mm.
cplx trace_integral(const TruncatedElement& a);
/// Star commutator [a, b]_⋆.
TruncatedElement star_commutator(const TruncatedElement& a, const TruncatedElement& b);

/// Exponents of the weighted coefficient norm ‖a‖²_{s,t} = Σ θ^{s+t}(m+½)^s(n+½)^t |a_mn|².
struct NormSpec {
  double s = 0.0;
  double t = 0.0;
};

double norm_st(const TruncatedElement& a, NormSpec spec);
/// ρ_k(a) = ‖a‖_{k,k}.
double rho_k(const TruncatedElement& a, int k);
/// L²(ℝ²) norm of the function represented by a: √(2πθ) times the coefficient ℓ² norm.
double l2_function_norm(const TruncatedElement& a);

enum class Derivative { Holomorphic, AntiHolomorphic, X1, X2 };

/// ∂ = (∂₁ - i∂₂)/√2, ∂̄ = (∂₁ + i∂₂)/√2, ∂₁, ∂₂ from the calibrated ladder table.
TruncatedElement derivative(const TruncatedElement& a, Derivative which, const LadderTable& table);
LadderStencil derivative_stencil(Derivative which, const LadderTable& table, double theta);

enum class XMode { StarLeft, StarRight, Pointwise };

/// x̃_μ ⋆ a, a ⋆ x̃_μ, or the pointwise product x̃_μ·a = ½{x̃_μ, a}_⋆ (mu ∈ {1, 2}).
TruncatedElement xtilde_apply(const TruncatedElement& a, int mu, XMode mode, const LadderTable& table);
LadderStencil xtilde_stencil(int mu, XMode mode, const LadderTable& table, double theta);

/// {"theta", "trunc", "re", "im"} with row-major coefficient arrays.
std::string element_to_json(const TruncatedElement& a);
TruncatedElement element_from_json(std::string_view text);

}  // namespace ncg
