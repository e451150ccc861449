#pragma once

// Dirac operators on truncated spinors.
//
// A spinor with s components is a list of s coefficient matrices; the
// algebra acts by left multiplication on each component. Every operator
// here has the form
//
//   D = Σ_μ P^μ ⊗ (-i∂_μ) + Q^μ ⊗ m(x̃_μ)
//
// with constant s×s matrices P^μ, Q^μ, so each block D_ij is a single
// ladder stencil and [D, π(a)] = -i L(∂_μ a) ⊗ (P^μ - Q^μ).

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncg/fock_algebra.hpp"
#include "ncg/ladder.hpp"
#include "ncg/types.hpp"

namespace ncg {

using Spinor = std::vector<CMatrix>;

enum class DiracKind {
  D0,                // -iσ^μ∂_μ on C²
  HarmonicAbstract,  // γ^μ(-i∂_μ) - Ωγ^{μ+2} m(x̃_μ) for user γ matrices on C⁴
  D1,                // (1⊗σ^μ)(-i∂_μ) - Ω(σ^μ⊗σ³) m(x̃_μ)
  D2,                // (σ³⊗σ^μ)(-i∂_μ) - Ω(σ^μ⊗1) m(x̃_μ)
  Landau,            // -iσ^μ∂_μ + ξσ^μ m(x̃_μ)
  Twisted,           // (1⊗σ^μ)(-i∂_μ) - ξ(σ³⊗σ^μ) m(x̃_μ)
};

std::string_view to_string(DiracKind k);
/// Accepts "standard"/"d0", "harmonic"/"d1", "d2", "harmonic-abstract", "landau", "twisted".
DiracKind dirac_kind_from_string(std::string_view s);
/// Spinor rank: 2 for D0 and Landau, 4 otherwise.
int spin_dimension(DiracKind k);

struct DiracParams {
  double theta = 1.0;
  double omega = 1.0;
  double xi = 0.0;
  /// γ¹..γ⁴ for HarmonicAbstract; empty selects the D1 representation.
  std::vector<CMatrix> gammas;
};

/// σ¹, σ² (with σ² = [[0, i], [-i, 0]]) and σ³ = iσ¹σ² = diag(1, -1).
const std::array<CMatrix, 3>& pauli();
CMatrix kron(const CMatrix& a, const CMatrix& b);

struct DiracMatrices {
  std::array<CMatrix, 2> p;
  std::array<CMatrix, 2> q;
};

/// Constant spin matrices of the kind; validates parameters and, for the
/// abstract kind, hermiticity and the four-gamma Clifford relations.
DiracMatrices dirac_matrices(DiracKind kind, const DiracParams& params);

class SpinorOperator {
 public:
  SpinorOperator(DiracKind kind, DiracParams params, int trunc, std::vector<LadderStencil> blocks, bool degenerate);

  DiracKind kind() const { return kind_; }
  const DiracParams& params() const { return params_; }
  int trunc() const { return trunc_; }
  int spin() const { return spin_; }
  /// ξ = 1 for the Landau kind: the commutant of D is the whole algebra.
  bool degenerate() const { return degenerate_; }
  /// θ-scaled stencil of block (i, j).
  const LadderStencil& block(int i, int j) const { return blocks_[static_cast<size_t>(i * spin_ + j)]; }

  Spinor apply(const Spinor& psi) const;
  /// Sparse matrix on C^s ⊗ C^{N²}; index = component·N² + m + N·n.
  SpMatrix assemble() const;

 private:
  DiracKind kind_;
  DiracParams params_;
  int trunc_;
  int spin_;
  std::vector<LadderStencil> blocks_;
  bool degenerate_;
};

SpinorOperator build_dirac(DiracKind kind, const DiracParams& params, int trunc, const LadderTable& table);

/// {"schema", "kind", "params", "trunc", "spin", "blocks": [{block_row, block_col, side, band_offset, values}]}.
std::string operator_to_json(const SpinorOperator& d);

/// Block matrix of [D, π(a)] acting on spinors as left multiplications.
struct CommutatorBlocks {
  int spin = 0;
  std::vector<CMatrix> blocks;  // spin × spin, row-major

  const CMatrix& at(int i, int j) const { return blocks[static_cast<size_t>(i * spin + j)]; }
  /// (sN)×(sN) dense matrix whose norm is the operator norm of the commutator.
  CMatrix dense() const;
};

enum class CommutatorMode { Direct, ClosedForm };

/// Direct: D π(a) - π(a) D block by block. Closed form: -i L(∂_μ a) ⊗ Γ^μ.
CommutatorBlocks commutator(const SpinorOperator& d, const TruncatedElement& a, CommutatorMode mode,
                            const LadderTable& table);

/// Γ^μ and the effective inverse metric from {Γ^μ, Γ^ν} = 2(G⁻¹)^{μν}.
///
/// When the anticommutator is not a multiple of the identity (twisted kind),
/// the spin space splits into sectors with scalar metrics; the effective
/// metric is the one with the largest G⁻¹, which is what the seminorm sees.
struct CliffordSet {
  std::array<CMatrix, 2> gammas;
  RMatrix metric_inverse = RMatrix::Zero(2, 2);
  double det_g = 0.0;
  double det_g_quarter = 0.0;  ///< (det G)^{1/4}, the distance homothety factor
  bool scalar = true;
  std::vector<double> sector_scales;  ///< G⁻¹ = c·δ per sector
  double anticommutator_residual = 0.0;
};

/// Throws DomainError for the Landau kind at ξ = 1 (singular metric).
CliffordSet clifford_metric(DiracKind kind, const DiracParams& params);

struct IdentityReport {
  std::string name;
  double residual = 0.0;  ///< max-abs residual relative to the largest term
  double tolerance = 0.0;
  bool pass() const { return residual <= tolerance; }
};

/// Random spinor with components supported on m, n < N - margin.
Spinor random_interior_spinor(int spin, int trunc, int margin, unsigned long long seed);

/// D² against the closed form of its kind:
///   harmonic kinds: (-∂² + Ω²x̃²)1 + 2iΩγ^μγ^{ν+2}Θ⁻¹_{νμ} (and D1² = D2²),
///   Landau: H_L ⊗ 1 - (4ξ/θ)σ³ with H_L = Σ P_μ², P_μ = -i∂_μ + ξ m(x̃_μ),
///   twisted: diag(𝒟_{-ξ}², 𝒟_ξ²), D0: -∂² ⊗ 1.
std::vector<IdentityReport> square_identity_check(DiracKind kind, const DiracParams& params, int trunc,
                                                  const LadderTable& table, unsigned long long seed = 42);

/// Laplacian-type operators on a single coefficient matrix (exact on margin 2).
CMatrix apply_minus_laplacian(const CMatrix& psi, double theta, const LadderTable& table);
CMatrix apply_xtilde_squared(const CMatrix& psi, double theta, const LadderTable& table);
CMatrix apply_landau_hamiltonian(const CMatrix& psi, double xi, double theta, const LadderTable& table);

// Connections ∇_μ(a) = ∂_μ a - iA_μ⋆a on the algebra as a module over itself.

/// x̃_μ as a truncated (banded) element, x̃_μ ⋆ 1.
TruncatedElement xtilde_element(int mu, int trunc, double theta, const LadderTable& table);
TruncatedElement connection_apply(const TruncatedElement& a, int mu, const TruncatedElement& a_mu,
                                  const LadderTable& table);
/// ∇^λ_μ(a) = ∂_μ a + iλ x̃_μ⋆a.
TruncatedElement covariant_derivative(const TruncatedElement& a, int mu, double lambda, const LadderTable& table);
/// A^g = g†⋆A⋆g + i g†⋆∂_μ g, the potential of g†∘∇∘g. Throws PreconditionError
/// unless g†⋆g = g⋆g† = 1 within tol.
TruncatedElement gauge_transform(const TruncatedElement& a_mu, const TruncatedElement& g, int mu,
                                 const LadderTable& table, double tol = 1e-10);
/// Residuals of ∇^inv_μ(a) = (i/2)a⋆x̃_μ and 𝒟_ξ = (1+ξ)(-iσ^μ∇^{ξ/(1+ξ)}_μ).
std::vector<IdentityReport> connection_identity_check(double xi, double theta, int trunc, const LadderTable& table,
                                                      unsigned long long seed = 42);

// Spectra.

enum class Hamiltonian { Harmonic, Landau };

struct SpectrumCluster {
  int index = 0;
  double eigenvalue = 0.0;
  int multiplicity = 0;
};

struct SpectrumReport {
  std::vector<double> eigenvalues;  ///< ascending
  std::vector<SpectrumCluster> clusters;
  /// Filled for Hamiltonian spectra: spacing of the lowest clusters vs the stated formula.
  double measured_spacing = 0.0;
  double stated_spacing = 0.0;
  double prefactor_ratio = 0.0;
};

/// Eigenvalues of a hermitian sparse matrix, solved per connected component
/// (entries below 1e-10 of the largest are not treated as couplings).
std::vector<double> hermitian_eigenvalues(const SpMatrix& h);
std::vector<SpectrumCluster> cluster_eigenvalues(const std::vector<double>& ev, double tol);

/// Compression of H_h = -∂² + Ω²x̃² or H_L to the first N×N matrix units.
SpMatrix hamiltonian_matrix(Hamiltonian h, const DiracParams& params, int trunc, const LadderTable& table);
SpectrumReport hamiltonian_spectrum(Hamiltonian h, const DiracParams& params, int trunc, const LadderTable& table,
                                    double cluster_tol = 1e-8);
SpectrumReport dirac_spectrum(const SpinorOperator& d, double cluster_tol = 1e-8);

/// "cluster_index,eigenvalue,multiplicity" rows.
std::string spectrum_to_csv(const SpectrumReport& r);

}  // namespace ncg
