#pragma once

// Operator norms and the Lipschitz seminorm ℓ_D(a) = ‖[D, π(a)]‖.

#include <string>
#include <string_view>

#include "ncg/dirac.hpp"
#include "ncg/fock_algebra.hpp"
#include "ncg/ladder.hpp"
#include "ncg/types.hpp"

namespace ncg {

enum class NormMethod {
  Auto,   // eigensolve up to kDenseNormLimit columns, power iteration above
  Eigen,  // largest eigenvalue of T†T
  Power,  // power iteration on T†T
};

inline constexpr int kDenseNormLimit = 600;

struct PowerOptions {
  double tol = 1e-12;
  int max_iter = 50000;
  unsigned long long seed = 7;
};

/// Largest singular value. Power iteration starts from a fixed unit vector with a
/// fixed-seed perturbation; throws NumericalError if it does not settle.
double operator_norm(const CMatrix& t, NormMethod method = NormMethod::Auto, const PowerOptions& opts = {});
double operator_norm(const SpMatrix& t, const PowerOptions& opts = {});

/// Top singular triple (σ, u, v) with T v = σ u, by power iteration warm-started from v0
/// when it has the right size. Used by the distance solver.
struct SingularTriple {
  double sigma = 0.0;
  CVector u;
  CVector v;
};
SingularTriple top_singular(const CMatrix& t, const CVector& v0, int iterations);

enum class SeminormMethod { Direct, ClosedForm };
std::string_view to_string(SeminormMethod m);

struct SeminormReport {
  double value = 0.0;
  SeminormMethod method = SeminormMethod::Direct;
  DiracKind kind = DiracKind::D0;
  DiracParams params;
  double residual_vs_other_method = 0.0;  ///< |direct - closed form| / max(both)
};

/// ℓ_D / ℓ_{D₀}: 1, (1+Ω²)^{1/2}, |1-ξ| and 1+|ξ| for the standard, harmonic, Landau
/// and twisted kinds.
double homothety_factor(DiracKind kind, const DiracParams& params);

/// √2·max(σ_max(∂a), σ_max(∂̄a)).
double lipschitz_d0(const TruncatedElement& a, const LadderTable& table);

/// The element's θ overrides params.theta.
SeminormReport lipschitz_seminorm(DiracKind kind, DiracParams params, const TruncatedElement& a,
                                  SeminormMethod method, const LadderTable& table);

/// {"value", "method", "kind", "params", "residual"}.
std::string seminorm_to_json(const SeminormReport& r);

/// The 4×4 unitary that block-diagonalizes [D₁, π(a)]*[D₁, π(a)].
CMatrix diag_unitary(double omega);

struct UnitaryDiagReport {
  /// against 2(1+Ω²)𝔘†·blockdiag(L*L, L̄*L̄, L*L, L̄*L̄)·𝔘
  double residual = 0.0;
  /// against the same right-hand side without the factor 2
  double quoted_residual = 0.0;
};

/// L = L(∂a), L̄ = L(∂̄a); residuals are max-abs, relative to the largest entry of the left side.
UnitaryDiagReport unitary_diag_check(double omega, const TruncatedElement& a, const LadderTable& table);

}  // namespace ncg
