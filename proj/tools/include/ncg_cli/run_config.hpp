#pragma once

#include <map>
#include <string>

#include "ncg/dirac.hpp"
#include "ncg/states_distance.hpp"

namespace ncg::cli {

enum class OutputFormat { Json, Csv };

struct RunConfig {
  DiracKind kind = DiracKind::D0;
  double theta = 1.0;
  double omega = 1.0;
  double xi = 0.0;
  int trunc = 64;
  Solver solver = Solver::DiagonalLp;
  double tol = 1e-9;
  unsigned long long seed = 42;
  OutputFormat format = OutputFormat::Json;
  std::string output;  ///< empty: stdout

  DiracParams params() const;
  /// Throws DomainError: N ≥ 8, tol > 0, θ > 0, Ω ≥ 0 and ranges per kind.
  void validate() const;
};

/// Flat key=value lines; '#' starts a comment, blank lines are skipped.
/// Throws ConfigurationError on malformed lines or unreadable files.
std::map<std::string, std::string> read_key_values(const std::string& path);

/// Applies recognised keys (triple, theta, omega, xi, N, solver, tol, seed,
/// format, output); unknown keys throw ConfigurationError.
void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv);

OutputFormat format_from_string(std::string_view s);

/// NCG_THREADS if set to a positive integer, otherwise hardware concurrency (at least 1).
int worker_count();

}  // namespace ncg::cli
