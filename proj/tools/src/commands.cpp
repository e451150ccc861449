#include "ncg_cli/commands.hpp"

#include <cmath>
#include <ostream>

#include "ncg/errors.hpp"
#include "ncg/format.hpp"
#include "ncg/kernels.hpp"
#include "ncg/sampled_plane.hpp"
#include "ncg_cli/parallel.hpp"
#include "ncg_cli/state_spec.hpp"
#include "ncg_cli/verify.hpp"

namespace ncg::cli {

namespace {

std::string csv_row(const DistanceProblem& p, const SolverReport& r, std::optional<double> d0) {
  const bool inf = r.status == DistanceStatus::Infinite;
  std::string row = std::string(to_string(p.kind)) + "," + format_double(p.params.theta) + "," +
                    format_double(p.params.omega) + "," + format_double(p.params.xi) + "," + p.state_a.label() + "," +
                    p.state_b.label() + "," + std::to_string(p.trunc()) + "," + std::string(to_string(p.solver)) + "," +
                    (inf ? "infinite" : "finite") + "," + (inf ? "inf" : format_double(r.lower_bound)) + "," +
                    (r.closed_form ? format_double(*r.closed_form) : "") + ",";
  if (d0 && *d0 > 0.0 && !inf) row += format_double(r.lower_bound / *d0);
  row += "," + format_double(r.witness_seminorm) + "," + (r.converged ? "true" : "false") + "\n";
  return row;
}

}  // namespace

int cmd_distance(const RunConfig& cfg, const std::string& state_a, const std::string& state_b, std::ostream& out,
                 std::ostream& err) {
  const LadderTable& table = default_ladder_table();
  DistanceProblem p;
  p.kind = cfg.kind;
  p.params = cfg.params();
  p.solver = cfg.solver;
  p.tol = cfg.tol;
  p.subgradient.seed = cfg.seed;
  try {
    p.state_a = parse_state(state_a, cfg.trunc);
    p.state_b = parse_state(state_b, cfg.trunc);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  const SolverReport r = distance(p, table);
  std::optional<double> d0;
  if (p.kind == DiracKind::D0) {
    d0 = r.lower_bound;
  } else {
    DistanceProblem q = p;
    q.kind = DiracKind::D0;
    d0 = distance(q, table).lower_bound;
  }
  if (cfg.format == OutputFormat::Json) {
    out << distance_to_json(p, r, d0) << "\n";
  } else {
    out << "triple,theta,omega,xi,state_a,state_b,N,solver,status,lower_bound,closed_form,ratio_to_d0,witness_norm,"
           "converged\n"
        << csv_row(p, r, d0);
  }
  if (r.status == DistanceStatus::Infinite) {
    err << "degenerate triple: the distance is infinite\n";
    return kExitDegenerate;
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out, std::ostream& err) {
  std::vector<Check> checks;
  try {
    checks = run_suite(suite, cfg);
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  out << "N=" << cfg.trunc << " theta=" << format_double(cfg.theta) << " seed=" << cfg.seed << "\n"
      << format_report(checks);
  for (const auto& c : checks) {
    if (!c.pass()) return kExitError;
  }
  return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& hamiltonian, double cluster_tol, std::ostream& out,
                 std::ostream& err) {
  const LadderTable& table = default_ladder_table();
  SpectrumReport r;
  if (hamiltonian.empty()) {
    r = dirac_spectrum(build_dirac(cfg.kind, cfg.params(), cfg.trunc, table), cluster_tol);
  } else if (hamiltonian == "harmonic" || hamiltonian == "landau") {
    const auto h = hamiltonian == "harmonic" ? Hamiltonian::Harmonic : Hamiltonian::Landau;
    r = hamiltonian_spectrum(h, cfg.params(), cfg.trunc, table, cluster_tol);
    err << "spacing measured " << format_sig(r.measured_spacing, 10) << " stated " << format_sig(r.stated_spacing, 10)
        << " ratio " << format_sig(r.prefactor_ratio, 10) << "\n";
  } else {
    err << "error: unknown hamiltonian '" << hamiltonian << "'\n";
    return kExitError;
  }
  out << spectrum_to_csv(r);
  return kExitOk;
}

int cmd_kernel(const RunConfig& cfg, const KernelOptions& opts, std::ostream& out, std::ostream& err) {
  const int workers = worker_count();
  std::vector<SweepRow> rows;
  const std::vector<double> xis = opts.xis.empty() ? std::vector<double>{cfg.xi} : opts.xis;
  switch (opts.mode) {
    case KernelMode::PhiSweep: {
      if (opts.count < 0 || (opts.count > 0 && !(opts.v_min > 0.0 && opts.v_max >= opts.v_min))) {
        err << "error: need count >= 0 and 0 < v-min <= v-max\n";
        return kExitError;
      }
      std::vector<double> vs;
      for (int i = 0; i < opts.count; ++i) {
        vs.push_back(opts.count == 1 ? opts.v_min : opts.v_min + (opts.v_max - opts.v_min) * i / (opts.count - 1));
      }
      rows = parallel_map(vs, workers, [&](double v) {
        return phi_sweep(cfg.xi, cfg.theta, opts.mu2, v, v, 1).front();
      });
      break;
    }
    case KernelMode::PhiSquareSweep:
      rows = parallel_map(xis, workers, [&](double xi) { return phi_square_sweep({xi}, cfg.theta, opts.mu2).front(); });
      break;
    case KernelMode::HsSweep: {
      CMatrix c(6, 6);
      for (int m = 0; m < 6; ++m) {
        for (int n = 0; n < 6; ++n) c(m, n) = std::exp(-0.5 * (m + n));
      }
      const TruncatedElement a(c, cfg.theta);
      rows = parallel_map(xis, workers, [&](double xi) { return hs_sweep(a, {xi}, opts.mu2).front(); });
      break;
    }
  }
  out << sweep_to_csv(rows);
  return kExitOk;
}

}  // namespace ncg::cli
