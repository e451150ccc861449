#pragma once

#include <string>
#include <vector>

#include "ncg_cli/run_config.hpp"

namespace ncg::cli {

struct Check {
  std::string suite;
  std::string name;
  std::string anchor;  ///< the statement the check traces back to
  double value = 0.0;
  double limit = 0.0;
  bool at_most = true;  ///< pass iff value ≤ limit (otherwise value ≥ limit)

  bool pass() const { return at_most ? value <= limit : value >= limit; }
};

/// algebra, dirac, lipschitz, distance, kernels.
const std::vector<std::string>& suite_names();

/// Runs one suite ("all" runs every suite in order). Throws ConfigurationError
/// for unknown names. Results depend only on the configuration.
std::vector<Check> run_suite(const std::string& suite, const RunConfig& cfg);

/// One line per check: suite, name, value, relation, limit, PASS/FAIL, anchor;
/// a trailing summary line counts the failures.
std::string format_report(const std::vector<Check>& checks);

}  // namespace ncg::cli
