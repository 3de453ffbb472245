#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chefs/report.hpp"

namespace chefs {

/// Reports that render_svg accepts.
const std::vector<std::string>& plottable_reports();

/// Standalone SVG for a report's primary table. yearly_trend becomes a line
/// chart (one polyline per hazard), trade_links a chord layout, the others bar
/// charts. Every mark carries its data as data-* attributes. An empty table
/// yields a chart with a "no data" note. Other reports throw
/// Error(UnknownReport).
std::string render_svg(const AggregateReport& report);

}  // namespace chefs
