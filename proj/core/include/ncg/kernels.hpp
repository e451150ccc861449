#pragma once

// Integral kernels behind the compactness of the resolvents: the Landau heat
// kernel, Φ/Ψ, K₀, Hilbert–Schmidt estimates and their truncated-operator
// counterparts.
//
// With κ = ξθ⁻¹|v|² and u = κ(coth t - 1) = 2κ·sinh²(τ/2),
//
//   Φ(κ) = (1/4π) ∫₀^∞ e^{-κ cosh τ} tanh(τ/2)^{μ²} dτ,
//
// so Φ ≤ K₀(κ)/(4π) with equality at μ² = 0.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "ncg/dirac.hpp"
#include "ncg/fock_algebra.hpp"
#include "ncg/ladder.hpp"
#include "ncg/types.hpp"

namespace ncg {

enum class PhiVariant {
  Phi,  // ξ > 0 required
  Psi,  // |ξ| in place of ξ
};

/// Φ at |v|² = v_norm2. Returns +infinity at v = 0 (the t → 0 end diverges
/// logarithmically for every μ²). Throws DomainError for ξ = 0, μ² < 0, or ξ < 0
/// with the Φ variant.
double phi_integral(double v_norm2, double xi, double theta, double mu2, PhiVariant variant = PhiVariant::Phi);

/// The same integral evaluated directly in t, as the integral of the heat
/// kernel at (v, 0) against e^{-tμ²}. Slower; used as an independent check.
double phi_integral_t(double v_norm2, double xi, double theta, double mu2);

/// K₀(x) = e^{-x} ∫₀^∞ e^{-u} (u(u+2x))^{-1/2} du, evaluated as ∫₀^∞ e^{-x cosh τ} dτ by
/// the trapezoid rule with step h (the integrand is even in τ, so the rule is spectrally accurate).
double bessel_k0(double x, double h = 0.05);

/// ∫₀^∞ K₀(x)² dx by double-exponential quadrature.
double bessel_k0_square_integral();

/// ∫ d²v |Φ(v)|² = (πθ/|ξ|) ∫₀^∞ Φ(κ)² dκ.
double phi_square_integral(double xi, double theta, double mu2, PhiVariant variant = PhiVariant::Phi);

struct HsLandauReport {
  bool divergent = false;       ///< ξ = 1
  double norm_a_sq = 0.0;       ///< ‖a‖₂² of the function
  double phi_sq = 0.0;          ///< ∫|Φ|²
  double value = 0.0;           ///< I = ‖a‖₂² ∫|Φ|² / (4(1-ξ)²)
  double bound = 0.0;           ///< C̃‖a‖₂², C̃ = πθ / (192|ξ|(1-ξ)²)
  double slack = 0.0;           ///< bound - value
};

/// Integral-side Hilbert–Schmidt estimate for L(a)(H_L + μ²)⁻¹. Negative ξ uses Ψ.
HsLandauReport hs_norm_landau(const TruncatedElement& a, double xi, double mu2 = 1.0);

struct ResolventStandardReport {
  double norm_a_sq = 0.0;
  double resolvent_sq = 0.0;  ///< ∫ d²p (p² + μ²)⁻², analytically π/μ²
  double value = 0.0;         ///< I / (C')² = ‖a‖₂² · resolvent_sq
};

ResolventStandardReport resolvent_kernel_standard(const TruncatedElement& a, double mu2 = 1.0);

/// Integrand of the Landau heat kernel at time t:
///   (4π sinh t)⁻¹ e^{i2ξ xΘ⁻¹y} e^{-ξθ⁻¹|x-y|² coth t}.
/// In these units B·K(t) is the semigroup, B = 4ξ/θ.
std::complex<double> heat_kernel_landau(const std::array<double, 2>& x, const std::array<double, 2>& y, double t,
                                        double xi, double theta);

struct SemigroupCheck {
  double max_abs_error = 0.0;
  double max_abs_value = 0.0;
};

/// Compares ∫d²z K(t₁;x,z)K(t₂;z,y) on a square grid with K(t₁+t₂;x,y)/B at a few (x, y).
SemigroupCheck heat_semigroup_check(double t1, double t2, double xi, double theta, int grid_points = 241,
                                    double half_width = 6.0);

// Truncated-operator side.

/// Σ σ_k² of L(a)(H + μ²)⁻¹ on N×N matrix units, a embedded in the top-left corner.
/// Requires H + μ² > 0 on the truncated space.
double truncated_resolvent_hs2(const TruncatedElement& a, int trunc, Hamiltonian h, const DiracParams& params,
                               double mu2, const LadderTable& table);

/// ‖(H + μ²)⁻¹‖²_HS on N×N matrix units: grows with N when the levels are infinitely degenerate.
double bare_resolvent_hs2(int trunc, Hamiltonian h, const DiracParams& params, double mu2,
                          const LadderTable& table);

/// Σ σ_k² of π(a)(D² + 1)⁻¹ through D² = H ⊗ 1 + spin term:
///   D0: 2·S(-∂², 1),  Landau: S(H_L, 1 - 4ξ/θ) + S(H_L, 1 + 4ξ/θ).
double dirac_resolvent_hs2(const TruncatedElement& a, int trunc, DiracKind kind, const DiracParams& params,
                           const LadderTable& table);

// Sweeps, emitted as CSV with columns param,value,bound,slack.

struct SweepRow {
  double param = 0.0;
  double value = 0.0;
  double bound = 0.0;
  double slack = 0.0;
};

/// Φ(|v|) against K₀(κ)/(4π) for `count` points |v| ∈ [v_min, v_max].
std::vector<SweepRow> phi_sweep(double xi, double theta, double mu2, double v_min, double v_max, int count);
/// ∫|Φ|² against πθ/(48|ξ|) over the listed ξ.
std::vector<SweepRow> phi_square_sweep(const std::vector<double>& xis, double theta, double mu2);
/// hs_norm_landau against C̃‖a‖₂² over the listed ξ.
std::vector<SweepRow> hs_sweep(const TruncatedElement& a, const std::vector<double>& xis, double mu2);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ncg
