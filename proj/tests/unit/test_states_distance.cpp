#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/zeta.hpp>

#include "ncg/errors.hpp"
#include "ncg/lipschitz.hpp"
#include "ncg/sampled_plane.hpp"
#include "ncg/states_distance.hpp"
#include "support.hpp"

using namespace ncg;
using ncg::testing::random_interior;

namespace {

const LadderTable& table() { return default_ladder_table(); }

DistanceProblem pure_problem(DiracKind kind, double theta, int m, int n, int trunc, double omega = 1.0,
                             double xi = 0.0) {
  DistanceProblem p;
  p.kind = kind;
  p.params.theta = theta;
  p.params.omega = omega;
  p.params.xi = xi;
  p.state_a = State::pure(m, trunc);
  p.state_b = State::pure(n, trunc);
  return p;
}

}  // namespace

TEST(States, PureBasis) {
  const State w = State::pure(2, 6);
  EXPECT_EQ(w.kind(), StateKind::PureBasis);
  EXPECT_EQ(w.basis_index(), 2);
  EXPECT_EQ(w.density()(2, 2), cplx(1.0));
  EXPECT_NEAR(w.density().trace().real(), 1.0, 1e-15);
  std::mt19937_64 rng(1);
  const auto a = random_interior(6, 0, 1.0, rng);
  EXPECT_EQ(evaluate_state(w, a), a(2, 2));
  EXPECT_NEAR(std::abs(evaluate_state(w, TruncatedElement::identity(6, 1.0)) - 1.0), 0.0, 1e-15);
  EXPECT_THROW(State::pure(6, 6), DomainError);
  EXPECT_THROW(evaluate_state(w, TruncatedElement::identity(5, 1.0)), DimensionError);
}

TEST(States, VectorAndMixture) {
  CVector c(3);
  c << cplx(0.6, 0.0), cplx(0.0, 0.8), 0.0;
  const State v = State::vector(c);
  std::mt19937_64 rng(2);
  const auto a = random_interior(3, 0, 1.0, rng);
  const cplx want = (c.adjoint() * a.coeffs() * c)(0, 0);
  EXPECT_LT(std::abs(evaluate_state(v, a) - want), 1e-14);
  EXPECT_THROW(State::vector(2.0 * c), DomainError);
  EXPECT_NO_THROW(State::vector(2.0 * c, true));

  const State mix = State::mixture({0.5, 0.5}, {State::pure(0, 3), State::pure(1, 3)});
  EXPECT_LT(std::abs(evaluate_state(mix, a) - 0.5 * (a(0, 0) + a(1, 1))), 1e-15);
  EXPECT_EQ(mix.label(), "mix:0.5,pure:0;0.5,pure:1");
  EXPECT_THROW(State::mixture({0.7, 0.7}, {State::pure(0, 3), State::pure(1, 3)}), DomainError);
  EXPECT_THROW(State::mixture({0.5, 0.5}, {State::pure(0, 3), State::pure(1, 4)}), DimensionError);

  Eigen::SelfAdjointEigenSolver<CMatrix> es(mix.density());
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(States, PsiIsNormalizedAndDecreasing) {
  const State s = State::psi(1.1, 16);
  EXPECT_NEAR(s.density().trace().real(), 1.0, 1e-12);
  for (int m = 1; m < 16; ++m) EXPECT_LT(s.density()(m, m).real(), s.density()(m - 1, m - 1).real());
  EXPECT_EQ(s.label(), "psi:1.1");
}

TEST(Zeta, Values) {
  EXPECT_NEAR(zeta(2.0), kPi * kPi / 6.0, 1e-14);
  EXPECT_NEAR(zeta(4.0), std::pow(kPi, 4) / 90.0, 1e-14);
  for (double s : {1.01, 1.1, 1.25, 1.4, 1.5, 3.0}) {
    EXPECT_NEAR(zeta(s), boost::math::zeta(s), 1e-12 * boost::math::zeta(s)) << s;
  }
  EXPECT_THROW(zeta(1.0), DomainError);
  EXPECT_THROW(zeta(0.5), DomainError);
}

TEST(ClosedForm, Formulas) {
  EXPECT_NEAR(distance_closed_form_d0(2.0, 1, 0), 1.0, 1e-15);
  EXPECT_NEAR(distance_closed_form_d0(2.0, 3, 1), 1 / std::sqrt(2.0) + 1 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(distance_closed_form_d0(2.0, 1, 3), distance_closed_form_d0(2.0, 3, 1));
  DiracParams p;
  p.theta = 2.0;
  EXPECT_NEAR(distance_closed_form(DiracKind::D1, p, 1, 0), std::sqrt(0.5), 1e-14);
  p.xi = 3.0;
  EXPECT_NEAR(distance_closed_form(DiracKind::Landau, p, 4, 1), 0.5 * distance_closed_form_d0(2.0, 4, 1), 1e-14);
  EXPECT_NEAR(distance_closed_form(DiracKind::Twisted, p, 4, 1), 0.25 * distance_closed_form_d0(2.0, 4, 1), 1e-14);
  p.xi = 1.0;
  EXPECT_TRUE(std::isinf(distance_closed_form(DiracKind::Landau, p, 1, 0)));
}

TEST(DiagonalLp, StandardValues) {
  auto r = distance(pure_problem(DiracKind::D0, 2.0, 0, 1, 32), table());
  EXPECT_NEAR(r.lower_bound, 1.0, 1e-8);
  r = distance(pure_problem(DiracKind::D0, 2.0, 1, 3, 32), table());
  EXPECT_NEAR(r.lower_bound, 1.28446, 1e-5);
  ASSERT_TRUE(r.closed_form.has_value());
  EXPECT_NEAR(r.lower_bound, *r.closed_form, 1e-8);
  EXPECT_LE(r.witness_seminorm, 1.0 + 1e-9);
  const auto& p = pure_problem(DiracKind::D0, 2.0, 1, 3, 32);
  const double gap = std::abs(evaluate_state(p.state_a, r.witness) - evaluate_state(p.state_b, r.witness));
  EXPECT_NEAR(gap, r.lower_bound, 1e-12);
  r = distance(pure_problem(DiracKind::D0, 2.0, 2, 2, 32), table());
  EXPECT_EQ(r.lower_bound, 0.0);
}

TEST(DiagonalLp, Homothety) {
  const double d0 = distance(pure_problem(DiracKind::D0, 1.0, 5, 2, 24), table()).lower_bound;
  EXPECT_NEAR(distance(pure_problem(DiracKind::D1, 1.0, 5, 2, 24, 0.5), table()).lower_bound, d0 / std::sqrt(1.25),
              1e-8 * d0);
  EXPECT_NEAR(distance(pure_problem(DiracKind::Landau, 1.0, 5, 2, 24, 1.0, 3.0), table()).lower_bound, d0 / 2,
              1e-8 * d0);
  EXPECT_NEAR(distance(pure_problem(DiracKind::Landau, 1.0, 5, 2, 24, 1.0, -0.5), table()).lower_bound, d0 / 1.5,
              1e-8 * d0);
  EXPECT_NEAR(distance(pure_problem(DiracKind::Twisted, 1.0, 5, 2, 24, 1.0, 0.5), table()).lower_bound, d0 / 1.5,
              1e-8 * d0);
}

TEST(DiagonalLp, DegenerateLandauIsInfinite) {
  const auto r = distance(pure_problem(DiracKind::Landau, 1.0, 0, 1, 12, 1.0, 1.0), table());
  EXPECT_EQ(r.status, DistanceStatus::Infinite);
  const auto same = distance(pure_problem(DiracKind::Landau, 1.0, 1, 1, 12, 1.0, 1.0), table());
  EXPECT_EQ(same.status, DistanceStatus::Finite);
  EXPECT_EQ(same.lower_bound, 0.0);
}

TEST(DiagonalLp, SymmetryTriangleAndGeodesic) {
  const int n = 24;
  auto d = [&](const State& a, const State& b) {
    DistanceProblem p;
    p.state_a = a;
    p.state_b = b;
    return distance(p, table()).lower_bound;
  };
  const State w0 = State::pure(0, n);
  const State w2 = State::pure(2, n);
  const State w5 = State::pure(5, n);
  EXPECT_NEAR(d(w0, w5), d(w5, w0), 1e-12);
  EXPECT_LE(d(w0, w5), d(w0, w2) + d(w2, w5) + 3e-9);
  const double full = d(w0, w5);
  for (auto [t1, t2] : {std::pair{0.1, 0.7}, std::pair{0.0, 0.25}, std::pair{0.4, 0.9}}) {
    const State a = State::mixture({1 - t1, t1}, {w0, w5});
    const State b = State::mixture({1 - t2, t2}, {w0, w5});
    EXPECT_NEAR(d(a, b), std::abs(t1 - t2) * full, 1e-9);
  }
}

TEST(Witness, Candidate) {
  const auto a = optimal_witness_candidate(2.0, 3, 16, table());
  EXPECT_NEAR(a(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(a(2, 2).real(), 1 + 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(a(9, 9).real(), a(3, 3).real(), 0.0);
  EXPECT_LE(lipschitz_d0(a, table()), 1.0 + 1e-9);
  EXPECT_NEAR((a(3, 3) - a(0, 0)).real(), distance_closed_form_d0(2.0, 3, 0), 1e-14);
  EXPECT_EQ(optimal_witness_candidate(2.0, 0, 8, table()).coeffs().norm(), 0.0);
  EXPECT_NEAR(lipschitz_d0(2.0 * a, table()), 2.0, 1e-8);
  EXPECT_THROW(optimal_witness_candidate(2.0, 15, 16, table()), DomainError);
}

// Interior elements have exact derivatives, so |Δω(a)|/ℓ(a) never beats the closed form,
// hermitian or not.
TEST(Witness, RandomElementsStayBelowClosedForm) {
  std::mt19937_64 rng(3);
  const int n = 12;
  const State a = State::pure(4, n);
  const State b = State::pure(1, n);
  const double closed = distance_closed_form_d0(1.0, 4, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = random_interior(n, 1, 1.0, rng, trial % 2 == 0);
    const double gap = std::abs(evaluate_state(a, x) - evaluate_state(b, x));
    EXPECT_LE(gap / lipschitz_d0(x, table()), closed * (1 + 1e-9));
  }
}

TEST(Subgradient, PurePairsMatchClosedForm) {
  auto p = pure_problem(DiracKind::D0, 1.0, 3, 0, 16);
  p.solver = Solver::Subgradient;
  p.subgradient.iterations = 40;
  const auto r = distance(p, table());
  ASSERT_TRUE(r.closed_form.has_value());
  EXPECT_LE(r.lower_bound, *r.closed_form + 1e-9);
  EXPECT_GE(r.lower_bound, 0.99 * *r.closed_form);
  EXPECT_LE(r.witness_seminorm, 1.0 + 1e-9);
}

TEST(Subgradient, ImprovesOnDiagonalForCoherentSuperpositions) {
  const int n = 12;
  CVector c1 = CVector::Zero(n);
  CVector c2 = CVector::Zero(n);
  c1(0) = 1.0;
  c1(1) = 1.0;
  c2(0) = 1.0;
  c2(1) = -1.0;
  DistanceProblem p;
  p.state_a = State::vector(c1, true);
  p.state_b = State::vector(c2, true);
  // Same diagonal: the diagonal restriction sees nothing.
  EXPECT_EQ(distance(p, table()).lower_bound, 0.0);
  p.solver = Solver::Subgradient;
  p.subgradient.iterations = 60;
  const auto r = distance(p, table());
  EXPECT_GT(r.lower_bound, 0.1);
  EXPECT_LE(r.witness_seminorm, 1.0 + 1e-9);
  const double gap = std::abs(evaluate_state(p.state_a, r.witness) - evaluate_state(p.state_b, r.witness));
  EXPECT_NEAR(gap, r.lower_bound, 1e-9);
}

TEST(Probe, GrowsWithTruncation) {
  SubgradientOptions o;
  o.iterations = 20;
  const auto rows = divergence_probe(1.1, 1.4, DiracKind::D0, {}, {8, 16, 32}, table(), o);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[0].lower_bound, rows[1].lower_bound);
  EXPECT_LT(rows[1].lower_bound, rows[2].lower_bound);
  for (const auto& r : rows) EXPECT_GE(r.lower_bound, r.diagonal_bound);
  const auto same = divergence_probe(1.3, 1.3, DiracKind::D0, {}, {8}, table(), o);
  EXPECT_EQ(same[0].lower_bound, 0.0);
  EXPECT_THROW(divergence_probe(1.0, 1.3, DiracKind::D0, {}, {8}, table(), o), DomainError);
}

TEST(Json, DistanceReport) {
  const auto p = pure_problem(DiracKind::Landau, 2.0, 0, 1, 16, 1.0, 3.0);
  const auto r = distance(p, table());
  const auto j = distance_to_json(p, r, 1.0);
  EXPECT_NE(j.find("\"triple\": \"landau\""), std::string::npos);
  EXPECT_NE(j.find("\"ratio_to_d0\": 0.5"), std::string::npos);
  const auto inf = pure_problem(DiracKind::Landau, 2.0, 0, 1, 16, 1.0, 1.0);
  const auto ji = distance_to_json(inf, distance(inf, table()), 1.0);
  EXPECT_NE(ji.find("\"status\": \"infinite\""), std::string::npos);
  EXPECT_NE(ji.find("\"lower_bound\": null"), std::string::npos);
}
