// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
//
//   acceptance [--ncg PATH] [--known-failure K]...
//
// The exit status is 0 iff the set of failing criteria equals the set given
// with --known-failure (empty by default).

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ncg/dirac.hpp"
#include "ncg/format.hpp"
#include "ncg/kernels.hpp"
#include "ncg/lipschitz.hpp"
#include "ncg/sampled_plane.hpp"
#include "ncg/states_distance.hpp"

using namespace ncg;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kDistanceRel = 0.01;       // criteria 1, 2
constexpr double kRuntimeLimit = 10.0;      // criterion 1, seconds
constexpr double kMetricAbs = 1e-10;        // criterion 2
constexpr double kSeminormRel = 1e-8;       // criterion 3
constexpr double kUnitaryResidual = 1e-9;   // criterion 3
constexpr double kStarQuadrature = 1e-5;    // criterion 4
constexpr double kCalibration = 1e-5;       // criterion 4
constexpr double kIdentity = 1e-10;         // criterion 4
constexpr double kSpacingRel = 1e-8;        // criterion 5
constexpr double kK0Square = 1e-6;          // criterion 6
constexpr double kSlopeTol = 0.1;           // criterion 6
constexpr double kStableChange = 0.05;      // criterion 7
constexpr double kUnstableChange = 0.5;     // criterion 7
constexpr double kProbeTrack = 0.05;        // criterion 8

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) { return format_sig(v, 4); }

DiracParams make(double theta, double omega, double xi) {
  DiracParams p;
  p.theta = theta;
  p.omega = omega;
  p.xi = xi;
  return p;
}

TruncatedElement random_interior(int trunc, int margin, double theta, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix m(trunc, trunc);
  for (int j = 0; j < trunc; ++j) {
    for (int i = 0; i < trunc; ++i) m(i, j) = {nd(rng), nd(rng)};
  }
  m = 0.5 * (m + m.adjoint()).eval();
  return TruncatedElement(m, theta).interior_projected(margin);
}

double rel(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

TruncatedElement bump(double theta) {
  CMatrix c(6, 6);
  for (int m = 0; m < 6; ++m) {
    for (int n = 0; n < 6; ++n) c(m, n) = std::exp(-0.5 * (m + n));
  }
  return TruncatedElement(c, theta);
}

double pure_distance(DiracKind kind, const DiracParams& p, const std::vector<double>& w, int m, int n, int trunc,
                     const LadderTable& t) {
  DistanceProblem pr;
  pr.kind = kind;
  pr.params = p;
  pr.state_a = State::pure(m, trunc);
  pr.state_b = State::pure(n, trunc);
  return distance(pr, w, t).lower_bound;
}

Outcome criterion1(const LadderTable& t) {
  const double theta = 2.0;
  const int trunc = 64;
  const auto t0 = Clock::now();
  const auto w = diagonal_weights(DiracKind::D0, make(theta, 1.0, 0.0), trunc, t);
  double worst = 0.0;
  for (int m = 1; m <= 8; ++m) {
    for (int n = 0; n < m; ++n) {
      const double d = pure_distance(DiracKind::D0, make(theta, 1.0, 0.0), w, m, n, trunc, t);
      worst = std::max(worst, std::abs(d / distance_closed_form_d0(theta, m, n) - 1.0));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= kDistanceRel && secs < kRuntimeLimit,
          "max rel err " + num(worst) + " (tol " + num(kDistanceRel) + "), " + num(secs) + " s (limit " +
              num(kRuntimeLimit) + " s)"};
}

Outcome criterion2(const LadderTable& t) {
  const double theta = 2.0;
  const int trunc = 64;
  struct Case {
    DiracKind kind;
    DiracParams p;
    double factor;
  };
  std::vector<Case> cases;
  for (double om : {0.25, 0.5, 1.0}) cases.push_back({DiracKind::D1, make(theta, om, 0.0), 1.0 / std::sqrt(1 + om * om)});
  for (double xi : {-0.5, 0.5, 2.0, 3.0}) cases.push_back({DiracKind::Landau, make(theta, 1.0, xi), 1.0 / std::abs(1 - xi)});
  for (double xi : {0.5, 3.0}) cases.push_back({DiracKind::Twisted, make(theta, 1.0, xi), 1.0 / (1 + xi)});
  const auto w0 = diagonal_weights(DiracKind::D0, make(theta, 1.0, 0.0), trunc, t);
  std::vector<std::vector<double>> d0(9, std::vector<double>(9));
  for (int m = 1; m <= 8; ++m) {
    for (int n = 0; n < m; ++n) d0[m][n] = pure_distance(DiracKind::D0, make(theta, 1.0, 0.0), w0, m, n, trunc, t);
  }
  double ratio_err = 0.0, metric_err = 0.0;
  for (const auto& c : cases) {
    const auto w = diagonal_weights(c.kind, c.p, trunc, t);
    for (int m = 1; m <= 8; ++m) {
      for (int n = 0; n < m; ++n) {
        const double d = pure_distance(c.kind, c.p, w, m, n, trunc, t);
        ratio_err = std::max(ratio_err, std::abs(d / d0[m][n] / c.factor - 1.0));
      }
    }
    metric_err = std::max(metric_err, std::abs(clifford_metric(c.kind, c.p).det_g_quarter - c.factor));
  }
  return {ratio_err <= kDistanceRel && metric_err <= kMetricAbs,
          "max ratio rel err " + num(ratio_err) + " (tol " + num(kDistanceRel) + "), metric factor err " +
              num(metric_err) + " (tol " + num(kMetricAbs) + "), 9 triples x 36 pairs"};
}

Outcome criterion3(const LadderTable& t) {
  std::mt19937_64 rng(2024);
  const std::vector<std::pair<DiracKind, DiracParams>> kinds{
      {DiracKind::D1, make(1.0, 0.5, 0.0)},     {DiracKind::D2, make(1.0, 1.0, 0.0)},
      {DiracKind::HarmonicAbstract, make(1.0, 0.25, 0.0)}, {DiracKind::Landau, make(1.0, 1.0, -0.5)},
      {DiracKind::Landau, make(1.0, 1.0, 3.0)}, {DiracKind::Twisted, make(1.0, 1.0, 0.5)},
      {DiracKind::Twisted, make(1.0, 1.0, 3.0)}};
  double worst = 0.0, unitary = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto a = random_interior(32, 2, 1.0, rng);
    const double l0 = lipschitz_d0(a, t);
    const auto d0 = lipschitz_seminorm(DiracKind::D0, {}, a, SeminormMethod::Direct, t);
    worst = std::max({worst, d0.residual_vs_other_method, std::abs(d0.value - l0) / l0});
    for (const auto& [kind, p] : kinds) {
      const auto r = lipschitz_seminorm(kind, p, a, SeminormMethod::Direct, t);
      const double want = homothety_factor(kind, p) * l0;
      worst = std::max({worst, r.residual_vs_other_method, std::abs(r.value - want) / want});
    }
    unitary = std::max(unitary, unitary_diag_check(0.5, a, t).residual);
  }
  return {worst <= kSeminormRel && unitary <= kUnitaryResidual,
          "max rel residual " + num(worst) + " (tol " + num(kSeminormRel) + "), unitary residual " + num(unitary) +
              " (tol " + num(kUnitaryResidual) + "), 50 elements x 8 triples"};
}

Outcome criterion4(const LadderTable& t) {
  const double theta = 1.0;
  const PlaneGrid g = PlaneGrid::for_theta(theta, 48, 6.0);
  const auto basis = synthesize_basis(3, theta, g);
  double quad = 0.0;
  for (int m = 0; m <= 3; ++m) {
    for (int n = 0; n <= 3; ++n) {
      for (int p = 0; p <= 3; ++p) {
        for (int q = 0; q <= 3; ++q) {
          const auto r = moyal_star_quadrature(basis[m * 4 + n], basis[p * 4 + q]);
          const auto c = project_coefficients(r.value, 4, basis, 3);
          const auto want = star(TruncatedElement::unit(m, n, 4, theta), TruncatedElement::unit(p, q, 4, theta));
          quad = std::max(quad, (c.coeffs() - want.coeffs()).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  std::mt19937_64 rng(7);
  double ident = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_interior(32, 2, theta, rng);
    const auto b = random_interior(32, 2, theta, rng);
    for (auto which : {Derivative::Holomorphic, Derivative::AntiHolomorphic, Derivative::X1, Derivative::X2}) {
      ident = std::max(ident, rel(derivative(star(a, b), which, t).coeffs(),
                                  (star(derivative(a, which, t), b) + star(a, derivative(b, which, t))).coeffs()));
    }
    for (int mu : {1, 2}) {
      const auto d = derivative(a, mu == 1 ? Derivative::X1 : Derivative::X2, t).coeffs();
      const auto l = xtilde_apply(a, mu, XMode::StarLeft, t).coeffs();
      const auto r = xtilde_apply(a, mu, XMode::StarRight, t).coeffs();
      const auto p = xtilde_apply(a, mu, XMode::Pointwise, t).coeffs();
      ident = std::max({ident, rel(d, (-0.5 * kI) * (l - r)), rel(l, p + kI * d)});
    }
  }
  const double cal = t.info().fit_residual;
  return {quad <= kStarQuadrature && cal <= kCalibration && ident <= kIdentity,
          "quadrature vs matrix product " + num(quad) + " (tol " + num(kStarQuadrature) + ", 256 products), calibration " +
              num(cal) + " (tol " + num(kCalibration) + "), identities " + num(ident) + " (tol " + num(kIdentity) + ")"};
}

Outcome criterion5(const LadderTable& t) {
  const auto h = hamiltonian_spectrum(Hamiltonian::Harmonic, make(1.0, 1.0, 0.0), 32, t);
  bool mult_ok = true;
  double spacing = 0.0;
  const int levels = 16;  // away from the truncation boundary
  const double gap0 = h.clusters[1].eigenvalue - h.clusters[0].eigenvalue;
  for (int k = 0; k < levels; ++k) {
    if (h.clusters[k].multiplicity != k + 1) mult_ok = false;
    if (k > 0) spacing = std::max(spacing, std::abs((h.clusters[k].eigenvalue - h.clusters[k - 1].eigenvalue) / gap0 - 1));
  }
  std::vector<int> mult;
  std::vector<double> ratios;
  for (int n : {32, 64, 128}) {
    const auto l = hamiltonian_spectrum(Hamiltonian::Landau, make(1.0, 1.0, 1.0), n, t);
    mult.push_back(l.clusters[0].multiplicity);
    ratios.push_back(l.prefactor_ratio);
  }
  const bool grows = mult[0] < mult[1] && mult[1] < mult[2];
  return {mult_ok && spacing <= kSpacingRel && grows,
          "harmonic: multiplicities 1.." + std::to_string(levels) + (mult_ok ? " ok" : " WRONG") + ", spacing dev " +
              num(spacing) + " (tol " + num(kSpacingRel) + "); landau lowest-level multiplicity " +
              std::to_string(mult[0]) + "/" + std::to_string(mult[1]) + "/" + std::to_string(mult[2]) +
              "; measured/stated spacing harmonic " + num(h.prefactor_ratio) + ", landau " + num(ratios[2])};
}

Outcome criterion6() {
  const double k0 = std::abs(bessel_k0_square_integral() - kPi * kPi / 4.0);
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& r : phi_sweep(2.0, 2.0, 1.0, 0.05, 5.0, 50)) slack = std::min(slack, r.slack);
  double sq = std::numeric_limits<double>::infinity();
  for (const auto [theta, xi] : {std::pair{2.0, 1.0}, {2.0, 2.0}, {1.0, 0.5}}) {
    sq = std::min(sq, kPi * theta / (48.0 * xi) - phi_square_integral(xi, theta, 1.0));
  }
  std::vector<double> gap, val;
  const auto a = bump(1.0);
  for (double g : {1e-1, 1e-2, 1e-3, 1e-4}) {
    gap.push_back(g);
    val.push_back(hs_norm_landau(a, 1.0 - g).value);
  }
  const double slope = log_log_slope(gap, val);
  return {k0 <= kK0Square && slack >= 0.0 && sq >= 0.0 && std::abs(slope + 2.0) <= kSlopeTol,
          "|int K0^2 - pi^2/4| " + num(k0) + " (tol " + num(kK0Square) + "), min Bessel slack " + num(slack) +
              ", min square-integral slack " + num(sq) + ", slope " + num(slope) + " (-2 +- " + num(kSlopeTol) + ")"};
}

Outcome criterion7(const LadderTable& t) {
  const auto a = bump(1.0);
  const auto change = [&](DiracKind kind, double xi) {
    const double h64 = dirac_resolvent_hs2(a, 64, kind, make(1.0, 1.0, xi), t);
    const double h128 = dirac_resolvent_hs2(a, 128, kind, make(1.0, 1.0, xi), t);
    return std::abs(h128 / h64 - 1.0);
  };
  const double c0 = change(DiracKind::D0, 0.0);
  const double c2 = change(DiracKind::Landau, 2.0);
  const double c1 = change(DiracKind::Landau, 1.0);
  const double b64 = bare_resolvent_hs2(64, Hamiltonian::Landau, make(1.0, 1.0, 1.0), 1.0, t);
  const double b128 = bare_resolvent_hs2(128, Hamiltonian::Landau, make(1.0, 1.0, 1.0), 1.0, t);
  return {c0 < kStableChange && c2 < kStableChange && c1 > kUnstableChange,
          "change N=64->128: standard " + num(c0) + ", landau xi=2 " + num(c2) + " (need < " + num(kStableChange) +
              "), landau xi=1 " + num(c1) + " (need > " + num(kUnstableChange) +
              "); at xi=1 the operator acts on the right index only, so pi(a)(D^2+1)^-1 stays Hilbert-Schmidt; "
              "the bare resolvent grows " + num(b128 / b64) + "x"};
}

Outcome criterion8(const LadderTable& t) {
  const std::vector<int> truncs{16, 64, 256};
  const auto d0 = divergence_probe(1.1, 1.4, DiracKind::D0, {}, truncs, t);
  const auto dl = divergence_probe(1.1, 1.4, DiracKind::Landau, make(1.0, 1.0, 3.0), truncs, t);
  const bool increasing = d0[0].lower_bound < d0[1].lower_bound && d0[1].lower_bound < d0[2].lower_bound;
  const double growth = d0[2].lower_bound / d0[0].lower_bound;
  double track = 0.0;
  for (size_t i = 0; i < truncs.size(); ++i) track = std::max(track, std::abs(dl[i].lower_bound / (0.5 * d0[i].lower_bound) - 1.0));
  return {increasing && growth >= 2.0 && track <= kProbeTrack,
          "standard bounds " + num(d0[0].lower_bound) + "/" + num(d0[1].lower_bound) + "/" + num(d0[2].lower_bound) +
              " (growth " + num(growth) + "x, need >= 2), landau xi=3 vs half: " + num(track) + " (tol " +
              num(kProbeTrack) + ")"};
}

std::string capture(const std::string& cmd) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  return out;
}

Outcome criterion9(const std::string& ncg) {
  if (ncg.empty()) return {false, "no ncg executable given (--ncg)"};
  const std::string cmd = "\"" + ncg + "\" verify --suite all -N 32 --seed 42 2>/dev/null";
  const std::string a = capture(cmd);
  const std::string b = capture(cmd);
  const bool same = !a.empty() && a == b;
  return {same, std::to_string(a.size()) + " bytes, " + (same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  std::string ncg;
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--ncg" && i + 1 < argc) {
      ncg = argv[++i];
    } else if (arg == "--known-failure" && i + 1 < argc) {
      known.insert(std::stoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--ncg PATH] [--known-failure K]...\n";
      return 2;
    }
  }

  const auto t_cal = Clock::now();
  const LadderTable& t = default_ladder_table();
  std::cout << "ladder calibration " << num(seconds_since(t_cal)) << " s (not counted in timings)\n";

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"distance formula", [&] { return criterion1(t); }},
      {"homothety", [&] { return criterion2(t); }},
      {"seminorm identities", [&] { return criterion3(t); }},
      {"oracle agreement", [&] { return criterion4(t); }},
      {"spectra", [&] { return criterion5(t); }},
      {"kernel bounds", [] { return criterion6(); }},
      {"compactness diagnostics", [&] { return criterion7(t); }},
      {"divergence probe", [&] { return criterion8(t); }},
      {"determinism", [&] { return criterion9(ncg); }},
  };
  std::set<int> failed;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(id);
    std::cout << "criterion " << id << " [" << criteria[i].first << "] " << (o.pass ? "PASS" : "FAIL") << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed.size()) << "/" << criteria.size() << " criteria pass\n";
  if (failed != known) {
    std::cout << "failing set differs from the expected set\n";
    return 1;
  }
  return 0;
}
