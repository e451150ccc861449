#pragma once

// Locale-independent number formatting for CSV/JSON emitters.

#include <string>

namespace ncg {

/// Shortest round-trip decimal form ("1", "0.5", "1e-300", "inf", "nan").
std::string format_double(double v);

/// Fixed number of significant digits, for human-facing tables.
std::string format_sig(double v, int digits);

}  // namespace ncg
