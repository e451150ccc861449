#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncg/errors.hpp"
#include "ncg/fock_algebra.hpp"
#include "ncg/sampled_plane.hpp"
#include "support.hpp"

using namespace ncg;
using ncg::testing::random_interior;
using ncg::testing::rel_err;

namespace {

const LadderTable& table() { return default_ladder_table(); }

TruncatedElement e(int m, int n, int trunc = 4, double theta = 1.0) {
  return TruncatedElement::unit(m, n, trunc, theta);
}

}  // namespace

TEST(Star, MatrixUnitsCompose) {
  EXPECT_EQ((star(e(0, 1), e(1, 2)).coeffs() - e(0, 2).coeffs()).norm(), 0.0);
  EXPECT_EQ(star(e(0, 1), e(0, 2)).coeffs().norm(), 0.0);
}

TEST(Star, IdentityIsUnit) {
  std::mt19937_64 rng(1);
  const auto a = random_interior(7, 0, 1.5, rng);
  const auto one = TruncatedElement::identity(7, 1.5);
  EXPECT_EQ((star(one, a).coeffs() - a.coeffs()).norm(), 0.0);
}

TEST(Star, Associative) {
  std::mt19937_64 rng(2);
  for (int n : {2, 5, 16}) {
    const auto a = random_interior(n, 0, 1.0, rng);
    const auto b = random_interior(n, 0, 1.0, rng);
    const auto c = random_interior(n, 0, 1.0, rng);
    EXPECT_LT(rel_err(star(star(a, b), c).coeffs(), star(a, star(b, c)).coeffs()), 1e-14);
  }
}

TEST(Star, RejectsMismatch) {
  EXPECT_THROW(star(e(0, 0, 4), e(0, 0, 5)), DimensionError);
  EXPECT_THROW(star(e(0, 0, 4, 1.0), e(0, 0, 4, 2.0)), DimensionError);
  EXPECT_THROW(TruncatedElement(CMatrix::Zero(1, 1), 1.0), DimensionError);
  EXPECT_THROW(TruncatedElement(CMatrix::Zero(3, 3), 0.0), DomainError);
}

TEST(Involution, ConjugateTranspose) {
  EXPECT_EQ((involution(e(0, 1)).coeffs() - e(1, 0).coeffs()).norm(), 0.0);
  std::mt19937_64 rng(3);
  const auto a = random_interior(9, 0, 1.0, rng);
  const auto b = random_interior(9, 0, 1.0, rng);
  EXPECT_LT(rel_err(involution(star(a, b)).coeffs(), star(involution(b), involution(a)).coeffs()), 1e-12);
  const auto h = random_interior(9, 0, 1.0, rng, true);
  EXPECT_TRUE(h.is_hermitian());
  EXPECT_EQ((involution(h).coeffs() - h.coeffs()).norm(), 0.0);
}

TEST(TraceIntegral, Values) {
  const double theta = 0.7;
  EXPECT_NEAR(std::abs(trace_integral(e(0, 0, 4, theta)) - 2 * kPi * theta), 0.0, 1e-15);
  EXPECT_EQ(trace_integral(e(0, 1)), cplx(0.0));
  std::mt19937_64 rng(4);
  const auto a = random_interior(12, 0, theta, rng);
  const auto b = random_interior(12, 0, theta, rng);
  const cplx ab = trace_integral(star(a, b));
  EXPECT_LT(std::abs(ab - trace_integral(star(b, a))), 1e-12 * std::abs(ab));
}

TEST(Norms, UnitAndL2) {
  EXPECT_DOUBLE_EQ(norm_st(e(0, 0), {0, 0}), 1.0);
  std::mt19937_64 rng(5);
  const auto a = random_interior(10, 0, 1.3, rng);
  EXPECT_NEAR(norm_st(a, {0, 0}), a.coeffs().norm(), 1e-12);
  EXPECT_NEAR(l2_function_norm(a), std::sqrt(2 * kPi * 1.3) * a.coeffs().norm(), 1e-12);
  EXPECT_DOUBLE_EQ(rho_k(a, 1), norm_st(a, {1, 1}));
}

// The weights (θ(m+½))^s are monotone in s only when θ(m+½) ≥ 1 for every m,
// so the monotonicity and product bounds are checked at θ = 2.
TEST(Norms, MonotoneAndSubmultiplicative) {
  std::mt19937_64 rng(6);
  const double theta = 2.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_interior(12, 0, theta, rng);
    const auto b = random_interior(12, 0, theta, rng);
    EXPECT_LE(norm_st(a, {0.5, -1.0}), norm_st(a, {1.0, 0.5}) * (1 + 1e-14));
    EXPECT_LE(norm_st(a, {-2.0, 0.0}), norm_st(a, {0.0, 0.0}) * (1 + 1e-14));
    EXPECT_LE(norm_st(star(a, b), {1.0, 2.0}), norm_st(a, {1.0, 0.5}) * norm_st(b, {-0.25, 2.0}) * (1 + 1e-14));
    EXPECT_LE(norm_st(star(a, b), {0.0, 0.0}), norm_st(a, {0.0, 0.0}) * norm_st(b, {0.0, 0.0}) * (1 + 1e-14));
  }
}

TEST(Norms, MonotonicityNeedsLargeTheta) {
  const auto a = e(0, 0, 4, 1.0);
  EXPECT_GT(norm_st(a, {0.0, 0.0}), norm_st(a, {1.0, 0.0}));
}

TEST(Interior, ProjectionAndCheck) {
  std::mt19937_64 rng(7);
  const auto a = random_interior(8, 2, 1.0, rng);
  EXPECT_TRUE(a.is_interior(2));
  EXPECT_FALSE(a.is_interior(3));
  EXPECT_EQ(a.coeffs().bottomRows(2).norm(), 0.0);
  EXPECT_EQ(a.coeffs().rightCols(2).norm(), 0.0);
}

TEST(Derivative, SupportOnLadderNeighbours) {
  const int n = 8;
  for (int m = 1; m < 5; ++m) {
    for (int k = 1; k < 5; ++k) {
      const auto d = derivative(e(m, k, n), Derivative::Holomorphic, table());
      for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
          const bool allowed = (p == m && q == k - 1) || (p == m + 1 && q == k);
          if (!allowed) EXPECT_LT(std::abs(d(p, q)), 1e-14) << m << k << p << q;
        }
      }
      EXPECT_GT(std::abs(d(m, k - 1)), 0.1);
      EXPECT_GT(std::abs(d(m + 1, k)), 0.1);
    }
  }
}

TEST(Derivative, UncalibratedTableThrows) {
  const LadderTable empty;
  EXPECT_THROW(derivative(e(0, 0), Derivative::X1, empty), ConfigurationError);
  EXPECT_THROW(xtilde_apply(e(0, 0), 1, XMode::StarLeft, empty), ConfigurationError);
}

class Identities : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(Identities, LeibnizInnerDerivationAndAnticommutator) {
  const auto [n, theta] = GetParam();
  std::mt19937_64 rng(100 + n);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_interior(n, 2, theta, rng);
    const auto b = random_interior(n, 2, theta, rng);
    for (auto which : {Derivative::Holomorphic, Derivative::AntiHolomorphic, Derivative::X1, Derivative::X2}) {
      const auto lhs = derivative(star(a, b), which, table());
      const auto rhs = star(derivative(a, which, table()), b) + star(a, derivative(b, which, table()));
      EXPECT_LT(rel_err(lhs.coeffs(), rhs.coeffs()), 1e-10);
    }
    for (int mu : {1, 2}) {
      const auto dmu = derivative(a, mu == 1 ? Derivative::X1 : Derivative::X2, table());
      const auto left = xtilde_apply(a, mu, XMode::StarLeft, table());
      const auto right = xtilde_apply(a, mu, XMode::StarRight, table());
      const auto point = xtilde_apply(a, mu, XMode::Pointwise, table());
      // ∂_μ a = -(i/2)[x̃_μ, a]
      EXPECT_LT(rel_err(dmu.coeffs(), (-0.5 * kI) * (left.coeffs() - right.coeffs())), 1e-10);
      // x̃_μ ⋆ a = x̃_μ·a + i∂_μ a
      EXPECT_LT(rel_err(left.coeffs(), point.coeffs() + kI * dmu.coeffs()), 1e-10);
      // {x̃_μ, a} = 2 x̃_μ·a
      EXPECT_LT(rel_err(left.coeffs() + right.coeffs(), 2.0 * point.coeffs()), 1e-14);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Truncations, Identities,
                         ::testing::Combine(::testing::Values(8, 16, 40), ::testing::Values(0.5, 1.0, 2.0)));

TEST(Xtilde, StarLeftOnGroundStateHitsFirstNeighbourOnly) {
  for (int mu : {1, 2}) {
    const auto r = xtilde_apply(e(0, 0, 6), mu, XMode::StarLeft, table());
    EXPECT_GT(std::abs(r(1, 0)), 0.1);
    CMatrix rest = r.coeffs();
    rest(1, 0) = 0.0;
    EXPECT_LT(rest.norm(), 1e-14);
  }
}

TEST(Json, RoundTrip) {
  std::mt19937_64 rng(8);
  const auto a = random_interior(5, 1, 0.25, rng);
  const auto b = element_from_json(element_to_json(a));
  EXPECT_EQ(b.trunc(), 5);
  EXPECT_EQ(b.theta(), 0.25);
  EXPECT_EQ((a.coeffs() - b.coeffs()).norm(), 0.0);
  EXPECT_THROW(element_from_json("{\"trunc\":3,\"theta\":1,\"re\":[[1]],\"im\":[[0]]}"), DimensionError);
  EXPECT_THROW(element_from_json("not json"), DomainError);
}
