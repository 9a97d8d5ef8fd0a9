#pragma once

#include "incadet/metrics.hpp"

#include <string>

namespace incadet {

// Standalone SVG documents for the report's test-window scores. The curve
// plots require both classes in the labels.
std::string roc_svg(const MetricsReport& report);
std::string prc_svg(const MetricsReport& report);

// Per-window score line with labeled attack spans shaded and the decision
// threshold marked.
std::string timeline_svg(const MetricsReport& report, double threshold = 0.5);

}  // namespace incadet
