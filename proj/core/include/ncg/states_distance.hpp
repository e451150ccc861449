#pragma once

// States in the matrix base and lower bounds on the spectral distance
//
//   d(ω₁, ω₂) = sup { |ω₁(a) - ω₂(a)| : ℓ_D(a) ≤ 1 }.
//
// Every reported lower bound comes with a witness whose seminorm was
// recomputed from the dense commutator, so the bound holds at the given
// truncation regardless of how the witness was found.

#include <optional>
#include <string>
#include <vector>

#include "ncg/dirac.hpp"
#include "ncg/fock_algebra.hpp"
#include "ncg/ladder.hpp"
#include "ncg/types.hpp"

namespace ncg {

enum class StateKind { PureBasis, Vector, Mixture };

/// A state on the truncated algebra, stored as a density matrix ρ with
/// ω(a) = tr(ρ a); a vector state c has ρ = c c†, so ω(a) = Σ c̄_m a_mn c_n.
class State {
 public:
  static State pure(int m, int trunc);
  /// Throws DomainError unless ‖c‖ = 1 within 1e-10; pass normalize = true to rescale.
  static State vector(CVector c, bool normalize = false);
  /// Weights must be nonnegative and sum to 1 within 1e-12; components must share N.
  static State mixture(const std::vector<double>& weights, const std::vector<State>& states);
  /// ψ_s with c_m = (ζ(s)(m+1)^s)^{-1/2}, renormalized after truncation.
  static State psi(double s, int trunc);

  StateKind kind() const { return kind_; }
  int trunc() const { return static_cast<int>(density_.rows()); }
  const CMatrix& density() const { return density_; }
  /// Basis index of a pure basis state, -1 otherwise.
  int basis_index() const { return index_; }
  const std::string& label() const { return label_; }

 private:
  State(StateKind kind, CMatrix density, int index, std::string label);
  StateKind kind_;
  CMatrix density_;
  int index_;
  std::string label_;
};

cplx evaluate_state(const State& w, const TruncatedElement& a);

enum class Solver { DiagonalLp, Subgradient };
std::string_view to_string(Solver s);
Solver solver_from_string(std::string_view s);

struct SubgradientOptions {
  int iterations = 100;
  double eta0 = 0.5;
  int power_iterations = 12;
  unsigned long long seed = 42;
};

struct DistanceProblem {
  DiracKind kind = DiracKind::D0;
  DiracParams params;
  State state_a = State::pure(0, 2);
  State state_b = State::pure(0, 2);
  Solver solver = Solver::DiagonalLp;
  double tol = 1e-9;
  SubgradientOptions subgradient;

  int trunc() const { return state_a.trunc(); }
};

enum class DistanceStatus { Finite, Infinite };

struct SolverReport {
  DistanceStatus status = DistanceStatus::Finite;
  double lower_bound = 0.0;
  TruncatedElement witness = TruncatedElement::zero(2, 1.0);
  double witness_seminorm = 0.0;  ///< ℓ_D(witness), dense
  double witness_gap = 0.0;       ///< |ω_a(witness) - ω_b(witness)|
  std::optional<double> closed_form;
  bool converged = true;
  int iterations = 0;
};

/// Seminorms of the step elements s_q = Σ_{p>q} e_pp, q = 0..N-2. For a real
/// diagonal a with increments δ_q = a_{q+1,q+1} - a_qq the commutator splits
/// over disjoint bands, so ℓ_D(a) = max_q |δ_q|·w_q and the restricted problem
/// is a separable LP.
std::vector<double> diagonal_weights(DiracKind kind, const DiracParams& params, int trunc, const LadderTable& table);

/// Exact optimum over real diagonal a, given precomputed weights.
SolverReport diagonal_lp(const DistanceProblem& p, const std::vector<double>& weights, const LadderTable& table);

/// Dispatches on p.solver. Throws DimensionError if the states' truncations differ.
SolverReport distance(const DistanceProblem& p, const LadderTable& table);
/// Same, reusing weights from diagonal_weights for p's triple and truncation.
SolverReport distance(const DistanceProblem& p, const std::vector<double>& weights, const LadderTable& table);

/// √(θ/2)·Σ_{k=n+1}^{m} k^{-1/2} for m ≥ n (symmetric in m, n).
double distance_closed_form_d0(double theta, int m, int n);
/// The standard distance divided by the seminorm homothety factor, cross-checked
/// against (det G)^{1/4}·d_{D₀}; +infinity for the degenerate Landau point.
double distance_closed_form(DiracKind kind, const DiracParams& params, int m, int n);

/// Real diagonal with a_pp = √(θ/2)·Σ_{k=1}^{min(p,m)} k^{-1/2}; throws NumericalError
/// if its standard seminorm exceeds 1 + 1e-9.
TruncatedElement optimal_witness_candidate(double theta, int m, int trunc, const LadderTable& table);

struct ProbeRow {
  int trunc = 0;
  double lower_bound = 0.0;
  double diagonal_bound = 0.0;
  bool converged = true;
};

/// Lower bounds on d(ψ_{s1}, ψ_{s2}) over the given truncations (subgradient solver).
std::vector<ProbeRow> divergence_probe(double s1, double s2, DiracKind kind, const DiracParams& params,
                                       const std::vector<int>& truncs, const LadderTable& table,
                                       const SubgradientOptions& opts = {});

/// Riemann ζ(s), s > 1, by Euler–Maclaurin summation.
double zeta(double s);

/// {"schema", "triple", "params", "state_a", "state_b", "N", "solver", "status", "lower_bound",
///  "lower_bound_sqrt_theta", "closed_form", "ratio_to_d0", "witness_norm", "converged", "iterations"}.
std::string distance_to_json(const DistanceProblem& p, const SolverReport& r, std::optional<double> d0_lower_bound);

}  // namespace ncg
