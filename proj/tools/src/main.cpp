#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ncg/errors.hpp"
#include "ncg_cli/commands.hpp"

using namespace ncg;
using namespace ncg::cli;

namespace {

// Flags shared by every subcommand. Config-file values are applied first and
// then overridden by any flag given on the command line.
struct CommonFlags {
  std::string config;
  std::string triple, solver, format, output;
  double theta = 0, omega = 0, xi = 0, tol = 0;
  int trunc = 0;
  unsigned long long seed = 0;
  std::vector<std::pair<std::string, CLI::Option*>> opts;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key=value configuration file");
    opts = {{"triple", app->add_option("--triple", triple, "standard, harmonic, d2, harmonic-abstract, landau, twisted")},
            {"theta", app->add_option("--theta", theta, "deformation parameter")},
            {"omega", app->add_option("--omega", omega, "harmonic parameter")},
            {"xi", app->add_option("--xi", xi, "magnetic parameter")},
            {"N", app->add_option("-N,--trunc", trunc, "truncation")},
            {"solver", app->add_option("--solver", solver, "diagonal_lp or subgradient")},
            {"tol", app->add_option("--tol", tol, "solver tolerance")},
            {"seed", app->add_option("--seed", seed, "random seed")},
            {"format", app->add_option("--format", format, "json or csv")},
            {"output", app->add_option("-o,--output", output, "output file (default stdout)")}};
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config.empty()) apply_key_values(cfg, read_key_values(config));
    std::map<std::string, std::string> given;
    for (const auto& [key, opt] : opts) {
      if (opt->count() > 0) given[key] = opt->as<std::string>();
    }
    apply_key_values(cfg, given);
    cfg.validate();
    return cfg;
  }
};

int emit(const RunConfig& cfg, const std::function<int(std::ostream&)>& body) {
  if (cfg.output.empty()) return body(std::cout);
  std::ostringstream buf;
  const int code = body(buf);
  std::ofstream f(cfg.output);
  if (!f || !(f << buf.str())) {
    std::cerr << "error: cannot write " << cfg.output << "\n";
    return kExitError;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral triples on the truncated Moyal plane"};
  app.require_subcommand(1);

  CommonFlags f_dist, f_ver, f_spec, f_ker;
  std::string sa, sb, suite = "all", hamiltonian;
  double cluster_tol = 1e-8;
  KernelOptions kopt;
  bool phi_sweep = false, phi_square = false, hs = false;

  auto* dist = app.add_subcommand("distance", "lower bound on the spectral distance between two states");
  f_dist.attach(dist);
  dist->add_option("--a", sa, "state spec: pure:m, psi:s, vector:file, mix:w,spec;w,spec")->required();
  dist->add_option("--b", sb, "state spec")->required();

  auto* ver = app.add_subcommand("verify", "run invariant suites");
  f_ver.attach(ver);
  ver->add_option("--suite", suite, "algebra, dirac, lipschitz, distance, kernels or all");

  auto* spec = app.add_subcommand("spectrum", "clustered spectrum as CSV");
  f_spec.attach(spec);
  spec->add_option("--hamiltonian", hamiltonian, "harmonic or landau; omit for the Dirac operator of --triple");
  spec->add_option("--cluster-tol", cluster_tol, "eigenvalue clustering tolerance");

  auto* ker = app.add_subcommand("kernel", "kernel bound sweeps as CSV");
  f_ker.attach(ker);
  ker->add_flag("--phi-sweep", phi_sweep, "Phi(|v|) against K0/(4 pi)");
  ker->add_flag("--phi-square", phi_square, "int |Phi|^2 against pi theta/(48 xi) over --xis");
  ker->add_flag("--hs", hs, "Hilbert-Schmidt estimate against its bound over --xis");
  ker->add_option("--mu2", kopt.mu2, "mass term mu^2");
  ker->add_option("--v-min", kopt.v_min, "smallest |v|");
  ker->add_option("--v-max", kopt.v_max, "largest |v|");
  ker->add_option("--count", kopt.count, "number of |v| points");
  ker->add_option("--xis", kopt.xis, "xi values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (dist->parsed()) {
      const RunConfig cfg = f_dist.resolve();
      return emit(cfg, [&](std::ostream& o) { return cmd_distance(cfg, sa, sb, o, std::cerr); });
    }
    if (ver->parsed()) {
      const RunConfig cfg = f_ver.resolve();
      return emit(cfg, [&](std::ostream& o) { return cmd_verify(cfg, suite, o, std::cerr); });
    }
    if (spec->parsed()) {
      const RunConfig cfg = f_spec.resolve();
      return emit(cfg, [&](std::ostream& o) { return cmd_spectrum(cfg, hamiltonian, cluster_tol, o, std::cerr); });
    }
    const RunConfig cfg = f_ker.resolve();
    if (phi_sweep + phi_square + hs > 1) {
      std::cerr << "error: choose one of --phi-sweep, --phi-square, --hs\n";
      return kExitError;
    }
    kopt.mode = phi_square ? KernelMode::PhiSquareSweep : hs ? KernelMode::HsSweep : KernelMode::PhiSweep;
    return emit(cfg, [&](std::ostream& o) { return cmd_kernel(cfg, kopt, o, std::cerr); });
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
