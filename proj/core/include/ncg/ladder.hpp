#pragma once

// Matrix-base ladder actions.
//
// Every first-order operator used by the toolkit (the complex derivatives and
// the star/pointwise multiplications by the coordinate functions x̃_μ) shifts
// exactly one index of the coefficient matrix by ±1. A stencil stores the four
// complex constants of that shift:
//
//   op(A) = θ^p · ( row_lower · S⁻A + row_raise · S⁺A + col_raise · A S⁻ + col_lower · A S⁺ )
//
// with (S⁻)_{m-1,m} = √m, (S⁺)_{m+1,m} = √(m+1) and p the calibrated θ exponent.
// The constants are never written down by hand; they come out of the
// sampled-plane calibration (see sampled_plane.hpp).

#include <array>
#include <string>
#include <string_view>

#include "ncg/types.hpp"

namespace ncg {

enum class LadderOp : int { D = 0, Dbar, Xt1Left, Xt2Left, Xt1Right, Xt2Right };
inline constexpr int kLadderOpCount = 6;

std::string_view to_string(LadderOp op);

struct LadderStencil {
  cplx row_lower{};
  cplx row_raise{};
  cplx col_raise{};
  cplx col_lower{};

  LadderStencil& operator+=(const LadderStencil& o);
  LadderStencil& operator*=(cplx s);
  friend LadderStencil operator+(LadderStencil a, const LadderStencil& b) { return a += b; }
  friend LadderStencil operator*(cplx s, LadderStencil a) { return a *= s; }

  /// Part acting by left multiplication (rows only).
  LadderStencil left_part() const { return {row_lower, row_raise, {}, {}}; }
  /// Part acting by right multiplication (columns only).
  LadderStencil right_part() const { return {{}, {}, col_raise, col_lower}; }
};

/// Diagnostics attached to a calibrated table.
struct CalibrationInfo {
  double theta = 0.0;
  int window = 0;
  int grid_points = 0;
  double box_half_width = 0.0;
  double fit_residual = 0.0;    ///< max |observed - law| over the window, per op
  double leakage = 0.0;         ///< max coefficient outside the ladder offsets
  std::array<double, kLadderOpCount> op_residual{};
  std::string phase_convention;
};

class LadderTable {
 public:
  /// An uncalibrated table; any use throws ConfigurationError.
  LadderTable() = default;
  LadderTable(std::array<LadderStencil, kLadderOpCount> stencils, double theta_exponent,
              CalibrationInfo info);

  bool calibrated() const { return calibrated_; }
  const LadderStencil& stencil(LadderOp op) const;
  double theta_exponent() const { return theta_exponent_; }
  const CalibrationInfo& info() const { return info_; }

  /// Stencil constants scaled to deformation parameter theta.
  LadderStencil scaled(LadderOp op, double theta) const;

 private:
  std::array<LadderStencil, kLadderOpCount> stencils_{};
  double theta_exponent_ = 0.0;
  CalibrationInfo info_{};
  bool calibrated_ = false;
};

/// JSON text with the stencils and the calibration diagnostics.
std::string ladder_table_to_json(const LadderTable& t);
LadderTable ladder_table_from_json(std::string_view text);

/// Banded index-lowering matrix (S⁻)_{m-1,m} = √m of size n.
SpMatrix lowering_matrix(int n);
/// Banded index-raising matrix (S⁺)_{m+1,m} = √(m+1) of size n.
SpMatrix raising_matrix(int n);

/// X ↦ left·X + X·right; the shape of every first-order ladder action.
struct Multipliers {
  SpMatrix left;
  SpMatrix right;

  CMatrix apply(const CMatrix& x) const;
};

/// Multiplier pair of an already θ-scaled stencil at truncation n.
Multipliers multipliers(const LadderStencil& scaled_stencil, int n);

/// Applies a θ-scaled stencil to a coefficient matrix, truncating at its size.
CMatrix apply_stencil(const LadderStencil& scaled_stencil, const CMatrix& a);

}  // namespace ncg
