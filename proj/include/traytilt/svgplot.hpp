#pragma once

#include <string>
#include <vector>

namespace traytilt {

/// Render entropy-vs-tilt trends as a self-contained SVG: one thin line per
/// trend, a bold mean line, and (for four or more trends) a shaded
/// interquartile band. Output bytes are a pure function of the inputs.
std::string render_trend_svg(const std::vector<std::vector<double>>& trends,
                             const std::string& title = "");

}  // namespace traytilt
