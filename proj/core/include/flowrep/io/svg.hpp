#pragma once

#include <string>
#include <vector>

namespace flowrep {

/// One bar: a signed value with a symmetric error whisker.
struct BarDatum {
    std::string group;   // x-axis group, e.g. "ddos-syn / IAT"
    std::string series;  // bar color key, e.g. "OCSVM"
    double value = 0.0;
    double error = 0.0;
};

/// Grouped bar chart with a zero line and error whiskers, as a standalone
/// SVG document.
std::string bar_chart_svg(const std::string& title, const std::vector<BarDatum>& data);

}  // namespace flowrep
