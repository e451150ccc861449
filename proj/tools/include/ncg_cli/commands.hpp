#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ncg_cli/run_config.hpp"

namespace ncg::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDegenerate = 2;

/// Solves for the distance between two state specs and emits the report.
/// Exit 2 when the triple is degenerate (infinite distance), 1 on bad specs.
int cmd_distance(const RunConfig& cfg, const std::string& state_a, const std::string& state_b, std::ostream& out,
                 std::ostream& err);

/// Pass/fail table for one suite or "all"; exit 1 on unknown suites or any failure.
int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out, std::ostream& err);

/// Clustered spectrum CSV. `hamiltonian` is "harmonic", "landau" or empty for
/// the Dirac operator of the configured triple.
int cmd_spectrum(const RunConfig& cfg, const std::string& hamiltonian, double cluster_tol, std::ostream& out,
                 std::ostream& err);

enum class KernelMode { PhiSweep, PhiSquareSweep, HsSweep };

struct KernelOptions {
  KernelMode mode = KernelMode::PhiSweep;
  double mu2 = 1.0;
  double v_min = 0.05;
  double v_max = 5.0;
  int count = 50;
  std::vector<double> xis;  ///< sweeps over ξ; empty uses the configured ξ
};

/// CSV with columns param,value,bound,slack; sweep points run on the worker pool.
int cmd_kernel(const RunConfig& cfg, const KernelOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace ncg::cli
