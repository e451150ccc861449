#include "ncg_cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ncg/errors.hpp"
#include "ncg/format.hpp"
#include "ncg/kernels.hpp"
#include "ncg/lipschitz.hpp"
#include "ncg/sampled_plane.hpp"
#include "ncg/states_distance.hpp"

namespace ncg::cli {

namespace {

// Bit-level uniform draws so the report does not depend on the standard
// library's distribution implementations.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

TruncatedElement random_interior(int trunc, int margin, double theta, std::mt19937_64& rng, bool hermitian) {
  CMatrix m(trunc, trunc);
  for (int j = 0; j < trunc; ++j) {
    for (int i = 0; i < trunc; ++i) m(i, j) = {uniform(rng), uniform(rng)};
  }
  if (hermitian) m = 0.5 * (m + m.adjoint()).eval();
  return TruncatedElement(m, theta).interior_projected(margin);
}

double rel(const CMatrix& a, const CMatrix& b) {
  const double s = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / s;
}

DiracParams make(double theta, double omega, double xi) {
  DiracParams p;
  p.theta = theta;
  p.omega = omega;
  p.xi = xi;
  return p;
}

struct Triple {
  DiracKind kind;
  DiracParams params;
  std::string label;
  double factor;  // (det G)^{1/4}
};

std::vector<Triple> homothety_triples(double theta) {
  std::vector<Triple> out;
  for (double om : {0.25, 0.5, 1.0}) {
    out.push_back({DiracKind::D1, make(theta, om, 0.0), "harmonic omega=" + format_double(om),
                   1.0 / std::sqrt(1.0 + om * om)});
  }
  for (double xi : {-0.5, 0.5, 2.0, 3.0}) {
    out.push_back({DiracKind::Landau, make(theta, 1.0, xi), "landau xi=" + format_double(xi), 1.0 / std::abs(1.0 - xi)});
  }
  for (double xi : {0.5, 3.0}) {
    out.push_back({DiracKind::Twisted, make(theta, 1.0, xi), "twisted xi=" + format_double(xi), 1.0 / (1.0 + xi)});
  }
  return out;
}

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}
  void at_most(std::string check, double value, double limit, std::string anchor) {
    out_.push_back({name_, std::move(check), std::move(anchor), value, limit, true});
  }
  void at_least(std::string check, double value, double limit, std::string anchor) {
    out_.push_back({name_, std::move(check), std::move(anchor), value, limit, false});
  }
  std::vector<Check> take() { return std::move(out_); }

 private:
  std::string name_;
  std::vector<Check> out_;
};

std::vector<Check> algebra_suite(const RunConfig& cfg) {
  Suite s("algebra");
  const LadderTable& t = default_ladder_table();
  std::mt19937_64 rng(cfg.seed);
  const int n = cfg.trunc;
  double assoc = 0, invol = 0, cyc = 0, leib = 0, inner = 0, point = 0;
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = random_interior(n, 2, cfg.theta, rng, false);
    const auto b = random_interior(n, 2, cfg.theta, rng, false);
    const auto c = random_interior(n, 2, cfg.theta, rng, false);
    assoc = std::max(assoc, rel(star(star(a, b), c).coeffs(), star(a, star(b, c)).coeffs()));
    invol = std::max(invol, rel(involution(star(a, b)).coeffs(), star(involution(b), involution(a)).coeffs()));
    const cplx ab = trace_integral(star(a, b));
    const cplx ba = trace_integral(star(b, a));
    cyc = std::max(cyc, std::abs(ab - ba) / std::max(std::abs(ab), 1e-300));
    for (auto which : {Derivative::Holomorphic, Derivative::AntiHolomorphic, Derivative::X1, Derivative::X2}) {
      const auto lhs = derivative(star(a, b), which, t);
      const auto rhs = star(derivative(a, which, t), b) + star(a, derivative(b, which, t));
      leib = std::max(leib, rel(lhs.coeffs(), rhs.coeffs()));
    }
    for (int mu : {1, 2}) {
      const auto d = derivative(a, mu == 1 ? Derivative::X1 : Derivative::X2, t).coeffs();
      const auto l = xtilde_apply(a, mu, XMode::StarLeft, t).coeffs();
      const auto r = xtilde_apply(a, mu, XMode::StarRight, t).coeffs();
      const auto p = xtilde_apply(a, mu, XMode::Pointwise, t).coeffs();
      inner = std::max(inner, rel(d, (-0.5 * kI) * (l - r)));
      point = std::max(point, rel(l, p + kI * d));
    }
  }
  s.at_most("star product associativity", assoc, 1e-12, "matrix base turns the star product into matrix products");
  s.at_most("involution reverses products", invol, 1e-14, "involution is complex conjugation");
  s.at_most("trace is cyclic", cyc, 1e-12, "integral is a trace");
  s.at_most("leibniz rule for d, dbar, d1, d2", leib, 1e-10, "derivatives are derivations");
  s.at_most("d_mu a = -(i/2)[x_mu, a]", inner, 1e-10, "derivations are inner");
  s.at_most("x_mu * a = x_mu a + i d_mu a", point, 1e-10, "star versus pointwise coordinate product");
  s.at_most("ladder calibration residual", t.info().fit_residual, 1e-5, "ladder action of d, dbar and coordinates");
  s.at_most("ladder leakage off the stencil", t.info().leakage, 1e-5, "ladder action of d, dbar and coordinates");
  return s.take();
}

std::vector<Check> dirac_suite(const RunConfig& cfg) {
  Suite s("dirac");
  const LadderTable& t = default_ladder_table();
  const int n = std::min(cfg.trunc, 32);
  const std::vector<std::pair<DiracKind, DiracParams>> kinds{
      {DiracKind::D0, make(cfg.theta, 1.0, 0.0)},     {DiracKind::D1, make(cfg.theta, 0.5, 0.0)},
      {DiracKind::D2, make(cfg.theta, 0.5, 0.0)},     {DiracKind::HarmonicAbstract, make(cfg.theta, 0.5, 0.0)},
      {DiracKind::Landau, make(cfg.theta, 1.0, 2.0)}, {DiracKind::Twisted, make(cfg.theta, 1.0, 0.5)}};
  for (const auto& [kind, p] : kinds) {
    for (const auto& r : square_identity_check(kind, p, n, t, cfg.seed)) {
      s.at_most(std::string(to_string(kind)) + " square: " + r.name, r.residual, r.tolerance,
                "square of the Dirac operator");
    }
  }
  for (const auto& r : connection_identity_check(0.5, cfg.theta, n, t, cfg.seed)) {
    s.at_most("connection: " + r.name, r.residual, r.tolerance, "magnetic operator as a covariant derivative");
  }
  for (const auto& tr : homothety_triples(cfg.theta)) {
    const auto c = clifford_metric(tr.kind, tr.params);
    s.at_most("metric factor " + tr.label, std::abs(c.det_g_quarter - tr.factor), 1e-10,
              "effective Clifford metric fixes the homothety");
  }
  const auto h = hamiltonian_spectrum(Hamiltonian::Harmonic, make(cfg.theta, 1.0, 0.0), n, t);
  double mult = 0.0, spacing = 0.0;
  for (int k = 0; k < 6 && k < static_cast<int>(h.clusters.size()); ++k) {
    mult = std::max(mult, std::abs(h.clusters[k].multiplicity - (k + 1.0)));
    if (k > 0) {
      const double gap = h.clusters[k].eigenvalue - h.clusters[k - 1].eigenvalue;
      spacing = std::max(spacing, std::abs(gap / (h.clusters[1].eigenvalue - h.clusters[0].eigenvalue) - 1.0));
    }
  }
  s.at_most("harmonic levels have multiplicity k+1", mult, 0.0, "spectrum of the harmonic Hamiltonian");
  s.at_most("harmonic levels are equally spaced", spacing, 1e-8, "spectrum of the harmonic Hamiltonian");
  return s.take();
}

std::vector<Check> lipschitz_suite(const RunConfig& cfg) {
  Suite s("lipschitz");
  const LadderTable& t = default_ladder_table();
  std::mt19937_64 rng(cfg.seed);
  const int n = std::min(cfg.trunc, 32);
  const std::vector<std::pair<DiracKind, DiracParams>> kinds{
      {DiracKind::D0, make(cfg.theta, 1.0, 0.0)},      {DiracKind::D1, make(cfg.theta, 0.5, 0.0)},
      {DiracKind::D2, make(cfg.theta, 1.0, 0.0)},      {DiracKind::HarmonicAbstract, make(cfg.theta, 0.25, 0.0)},
      {DiracKind::Landau, make(cfg.theta, 1.0, -0.5)}, {DiracKind::Landau, make(cfg.theta, 1.0, 3.0)},
      {DiracKind::Twisted, make(cfg.theta, 1.0, 0.5)}, {DiracKind::Twisted, make(cfg.theta, 1.0, 3.0)}};
  std::vector<TruncatedElement> elems;
  for (int i = 0; i < 5; ++i) elems.push_back(random_interior(n, 2, cfg.theta, rng, true));
  for (const auto& [kind, p] : kinds) {
    double worst = 0.0;
    for (const auto& a : elems) {
      worst = std::max(worst, lipschitz_seminorm(kind, p, a, SeminormMethod::Direct, t).residual_vs_other_method);
    }
    s.at_most(std::string(to_string(kind)) + " omega=" + format_double(p.omega) + " xi=" + format_double(p.xi) +
                  " direct vs closed form",
              worst, 1e-8, "seminorm as a multiple of the standard seminorm");
  }
  double zero = 0.0;
  for (const auto& a : elems) {
    zero = std::max(zero, lipschitz_seminorm(DiracKind::Landau, make(cfg.theta, 1.0, 1.0), a, SeminormMethod::Direct, t)
                              .value / a.coeffs().norm());
  }
  s.at_most("landau xi=1 seminorm vanishes", zero, 1e-9, "degenerate magnetic point");
  s.at_most("seminorm of the identity", lipschitz_d0(TruncatedElement::identity(n, cfg.theta), t), 1e-9,
            "constants have zero seminorm");
  s.at_most("unitary diagonalisation residual", unitary_diag_check(0.5, elems.front(), t).residual, 1e-9,
            "diagonalisation of the harmonic commutator");
  return s.take();
}

std::vector<Check> distance_suite(const RunConfig& cfg) {
  Suite s("distance");
  const LadderTable& t = default_ladder_table();
  const int n = cfg.trunc;
  const int top = std::min(4, n - 2);
  const auto d0w = diagonal_weights(DiracKind::D0, make(cfg.theta, 1.0, 0.0), n, t);
  const auto solve = [&](DiracKind kind, const DiracParams& p, const std::vector<double>& w, const State& a,
                         const State& b) {
    DistanceProblem pr;
    pr.kind = kind;
    pr.params = p;
    pr.state_a = a;
    pr.state_b = b;
    pr.tol = cfg.tol;
    return distance(pr, w, t);
  };
  double worst = 0.0;
  std::vector<std::vector<double>> d0(top + 1, std::vector<double>(top + 1, 0.0));
  for (int m = 1; m <= top; ++m) {
    for (int k = 0; k < m; ++k) {
      d0[m][k] = solve(DiracKind::D0, make(cfg.theta, 1.0, 0.0), d0w, State::pure(m, n), State::pure(k, n)).lower_bound;
      const double cf = distance_closed_form_d0(cfg.theta, m, k);
      worst = std::max(worst, std::abs(d0[m][k] / cf - 1.0));
    }
  }
  s.at_most("standard distance vs closed form, m,n <= " + std::to_string(top), worst, 0.01,
            "distance between basis states");
  for (const auto& tr : homothety_triples(cfg.theta)) {
    const auto w = diagonal_weights(tr.kind, tr.params, n, t);
    double err = 0.0;
    for (int m = 1; m <= top; ++m) {
      for (int k = 0; k < m; ++k) {
        const double d = solve(tr.kind, tr.params, w, State::pure(m, n), State::pure(k, n)).lower_bound;
        err = std::max(err, std::abs(d / d0[m][k] / tr.factor - 1.0));
      }
    }
    s.at_most("homothety ratio " + tr.label, err, 0.01, "distances are homothetic to the standard one");
  }
  const auto ab = solve(DiracKind::D0, make(cfg.theta, 1.0, 0.0), d0w, State::pure(1, n), State::pure(3, n));
  const auto ba = solve(DiracKind::D0, make(cfg.theta, 1.0, 0.0), d0w, State::pure(3, n), State::pure(1, n));
  s.at_most("symmetry d(1,3) = d(3,1)", std::abs(ab.lower_bound - ba.lower_bound), cfg.tol, "distance is a metric");
  const double tri = d0[top][0] - d0[top][1] - d0[1][0];
  s.at_most("triangle d(0,top) - d(0,1) - d(1,top)", tri, 3.0 * cfg.tol, "distance is a metric");
  const auto mix = [&](double u) { return State::mixture({1.0 - u, u}, {State::pure(0, n), State::pure(2, n)}); };
  const double geo = solve(DiracKind::D0, make(cfg.theta, 1.0, 0.0), d0w, mix(0.2), mix(0.7)).lower_bound;
  s.at_most("geodesic d(w_0.2, w_0.7) = 0.5 d(0,2)", std::abs(geo - 0.5 * d0[2][0]), 1e-9,
            "mixtures along a segment are geodesic");
  DistanceProblem deg;
  deg.kind = DiracKind::Landau;
  deg.params = make(cfg.theta, 1.0, 1.0);
  deg.state_a = State::pure(0, n);
  deg.state_b = State::pure(1, n);
  s.at_least("landau xi=1 distance is infinite", distance(deg, t).status == DistanceStatus::Infinite ? 1.0 : 0.0, 1.0,
             "degenerate magnetic point");
  return s.take();
}

std::vector<Check> kernels_suite(const RunConfig& cfg) {
  Suite s("kernels");
  s.at_most("int K0^2 - pi^2/4", std::abs(bessel_k0_square_integral() - kPi * kPi / 4.0), 1e-6,
            "square integral of the Bessel function");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : phi_sweep(2.0, 2.0, 1.0, 0.05, 5.0, 50)) worst = std::min(worst, r.slack);
  s.at_least("min slack of K0/(4 pi) - Phi, 50 points", worst, 0.0, "Bessel majorant of the kernel");
  for (const auto [theta, xi] : {std::pair{2.0, 1.0}, {2.0, 2.0}, {1.0, 0.5}}) {
    const double v = phi_square_integral(xi, theta, 1.0);
    s.at_least("slack of pi theta/(48 xi) - int Phi^2, theta=" + format_double(theta) + " xi=" + format_double(xi),
               kPi * theta / (48.0 * xi) - v, 0.0, "square integral of the kernel");
  }
  const double psi_sym = std::abs(phi_square_integral(-1.5, cfg.theta, 1.0, PhiVariant::Psi) -
                                  phi_square_integral(1.5, cfg.theta, 1.0, PhiVariant::Psi));
  s.at_most("psi symmetric under xi -> -xi", psi_sym, 0.0, "kernel for negative field");
  CMatrix c(6, 6);
  for (int m = 0; m < 6; ++m) {
    for (int k = 0; k < 6; ++k) c(m, k) = std::exp(-0.5 * (m + k));
  }
  const TruncatedElement a(c, 2.0);
  const auto h = hs_norm_landau(a, 2.0);
  s.at_most("C~ at theta=2 xi=2 minus pi/192", std::abs(h.bound / h.norm_a_sq - kPi / 192.0), 1e-15,
            "Hilbert-Schmidt bound for the magnetic resolvent");
  s.at_least("Hilbert-Schmidt slack at xi=2", h.slack, 0.0, "Hilbert-Schmidt bound for the magnetic resolvent");
  std::vector<double> gap, val;
  for (double g : {1e-1, 1e-2, 1e-3, 1e-4}) {
    gap.push_back(g);
    val.push_back(hs_norm_landau(a, 1.0 - g).value);
  }
  s.at_most("|slope + 2| of log I vs log(1 - xi)", std::abs(log_log_slope(gap, val) + 2.0), 0.1,
            "Hilbert-Schmidt bound for the magnetic resolvent");
  s.at_most("|int (p^2+1)^-2 - pi|", std::abs(resolvent_kernel_standard(a).resolvent_sq - kPi), 1e-10,
            "resolvent kernel of the standard operator");
  const auto sg = heat_semigroup_check(0.5, 0.7, 1.0, cfg.theta);
  s.at_most("heat semigroup relative error", sg.max_abs_error / sg.max_abs_value, 1e-8, "magnetic heat kernel");
  return s.take();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "dirac", "lipschitz", "distance", "kernels"};
  return names;
}

std::vector<Check> run_suite(const std::string& suite, const RunConfig& cfg) {
  if (suite == "all") {
    std::vector<Check> out;
    for (const auto& n : suite_names()) {
      auto part = run_suite(n, cfg);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (suite == "algebra") return algebra_suite(cfg);
  if (suite == "dirac") return dirac_suite(cfg);
  if (suite == "lipschitz") return lipschitz_suite(cfg);
  if (suite == "distance") return distance_suite(cfg);
  if (suite == "kernels") return kernels_suite(cfg);
  throw ConfigurationError("unknown suite '" + suite + "'");
}

std::string format_report(const std::vector<Check>& checks) {
  std::string out;
  int failed = 0;
  for (const auto& c : checks) {
    if (!c.pass()) ++failed;
    out += c.suite + " | " + c.name + " | " + format_sig(c.value, 6) + (c.at_most ? " <= " : " >= ") +
           format_sig(c.limit, 6) + " | " + (c.pass() ? "PASS" : "FAIL") + " | " + c.anchor + "\n";
  }
  out += std::to_string(checks.size()) + " checks, " + std::to_string(failed) + " failed\n";
  return out;
}

}  // namespace ncg::cli
