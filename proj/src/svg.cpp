#include "chefs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>

#include "chefs/error.hpp"
#include "chefs/text.hpp"

namespace chefs {

namespace {

constexpr double kWidth = 800, kHeight = 480, kMargin = 60;

struct BarSpec {
    std::vector<std::string> label_columns;
    std::string value_column;
};

const std::map<std::string, BarSpec, std::less<>>& bar_specs() {
    static const std::map<std::string, BarSpec, std::less<>> specs{
        {"top_contaminants", {{"hazard", "contaminant_name"}, "total_results"}},
        {"ontology_group_stats", {{"hazard", "group"}, "total_results"}},
        {"product_category_stats", {{"hazard", "category"}, "total_results"}},
        {"country_stats", {{"country"}, "total_results"}},
        {"sampling_strategy_breakdown", {{"strategy"}, "samples"}},
        {"unknown_origin_trend", {{"year"}, "pct_unknown"}},
        {"results_per_sample_distribution", {{"results_per_sample"}, "samples"}},
        {"evaluation_summary", {{"eval_code"}, "results"}},
    };
    return specs;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

double as_double(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return 0.0;
}

std::string open_svg(const AggregateReport& rep) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" data-report=\"" + escape(rep.name) + "\">\n" +
           "<title>" + escape(rep.name) + "</title>\n";
}

std::string no_data(const AggregateReport& rep) {
    return open_svg(rep) + "<text class=\"no-data\" x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight / 2) +
           "\" text-anchor=\"middle\">no data</text>\n</svg>\n";
}

std::size_t column(const ReportTable& t, std::string_view name) {
    const auto i = t.column_index(name);
    if (!i) throw Error(ErrorCode::InvalidConfig, t.name + ": column " + std::string(name) + " missing");
    return *i;
}

std::string line_chart(const AggregateReport& rep) {
    const auto& t = rep.primary();
    const auto yc = column(t, "year"), hc = column(t, "hazard"), vc = column(t, "pct_noncompliant");
    std::map<std::string, std::vector<const std::vector<Cell>*>> series;
    double ymin = 1e18, ymax = -1e18, vmax = 0;
    for (const auto& row : t.rows) {
        series[cell_to_string(row[hc])].push_back(&row);
        ymin = std::min(ymin, as_double(row[yc]));
        ymax = std::max(ymax, as_double(row[yc]));
        vmax = std::max(vmax, as_double(row[vc]));
    }
    if (vmax <= 0) vmax = 1;
    const double span = ymax > ymin ? ymax - ymin : 1;
    auto px = [&](double year) { return kMargin + (year - ymin) / span * (kWidth - 2 * kMargin); };
    auto py = [&](double v) { return kHeight - kMargin - v / vmax * (kHeight - 2 * kMargin); };

    std::string out = open_svg(rep);
    out += "<g class=\"axes\"><line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" +
           num(kWidth - kMargin) + "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/><line x1=\"" +
           num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) + "\" y2=\"" + num(kHeight - kMargin) +
           "\" stroke=\"black\"/></g>\n";
    static const char* colours[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a"};
    std::size_t k = 0;
    for (const auto& [name, rows] : series) {
        const char* colour = colours[k++ % 4];
        std::string points;
        for (const auto* r : rows) {
            if (!points.empty()) points += ' ';
            points += num(px(as_double((*r)[yc]))) + "," + num(py(as_double((*r)[vc])));
        }
        out += "<polyline class=\"series\" data-series=\"" + escape(name) + "\" fill=\"none\" stroke=\"" + colour +
               "\" points=\"" + points + "\"/>\n";
        for (const auto* r : rows)
            out += "<circle class=\"point\" data-series=\"" + escape(name) + "\" data-year=\"" +
                   cell_to_string((*r)[yc]) + "\" data-value=\"" + cell_to_string((*r)[vc]) + "\" cx=\"" +
                   num(px(as_double((*r)[yc]))) + "\" cy=\"" + num(py(as_double((*r)[vc]))) + "\" r=\"3\" fill=\"" +
                   colour + "\"/>\n";
    }
    return out + "</svg>\n";
}

std::string bar_chart(const AggregateReport& rep, const BarSpec& spec) {
    const auto& t = rep.primary();
    std::vector<std::size_t> label_cols;
    for (const auto& c : spec.label_columns)
        if (const auto i = t.column_index(c)) label_cols.push_back(*i);
    const auto vc = column(t, spec.value_column);
    double vmax = 0;
    for (const auto& row : t.rows) vmax = std::max(vmax, as_double(row[vc]));
    if (vmax <= 0) vmax = 1;
    const double slot = (kWidth - 2 * kMargin) / static_cast<double>(t.rows.size());
    std::string out = open_svg(rep);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        std::string label;
        for (auto c : label_cols) label += (label.empty() ? "" : " ") + cell_to_string(row[c]);
        const double h = as_double(row[vc]) / vmax * (kHeight - 2 * kMargin);
        const double x = kMargin + static_cast<double>(i) * slot;
        out += "<rect class=\"bar\" data-label=\"" + escape(label) + "\" data-value=\"" + cell_to_string(row[vc]) +
               "\" x=\"" + num(x + slot * 0.1) + "\" y=\"" + num(kHeight - kMargin - h) + "\" width=\"" +
               num(slot * 0.8) + "\" height=\"" + num(h) + "\" fill=\"#4477aa\"><title>" + escape(label) +
               "</title></rect>\n";
    }
    return out + "</svg>\n";
}

std::string chord_chart(const AggregateReport& rep) {
    const auto& t = rep.primary();
    const auto oc = column(t, "origin"), dc = column(t, "destination"), sc = column(t, "samples"),
               nc = column(t, "noncompliant"), pc = column(t, "pct");
    std::set<std::string> nodes;
    for (const auto& row : t.rows) {
        nodes.insert(cell_to_string(row[oc]));
        nodes.insert(cell_to_string(row[dc]));
    }
    const double cx = kWidth / 2, cy = kHeight / 2, radius = kHeight / 2 - kMargin;
    std::map<std::string, std::pair<double, double>> pos;
    std::size_t i = 0;
    std::string out = open_svg(rep);
    for (const auto& n : nodes) {
        const double a = 2 * std::numbers::pi * static_cast<double>(i++) / static_cast<double>(nodes.size());
        pos[n] = {cx + radius * std::cos(a), cy + radius * std::sin(a)};
        out += "<g class=\"node\" data-country=\"" + escape(n) + "\"><circle cx=\"" + num(pos[n].first) + "\" cy=\"" +
               num(pos[n].second) + "\" r=\"5\"/><text x=\"" + num(cx + (radius + 16) * std::cos(a)) + "\" y=\"" +
               num(cy + (radius + 16) * std::sin(a)) + "\" text-anchor=\"middle\">" + escape(n) + "</text></g>\n";
    }
    double smax = 1;
    for (const auto& row : t.rows) smax = std::max(smax, as_double(row[sc]));
    for (const auto& row : t.rows) {
        const auto& [x1, y1] = pos[cell_to_string(row[oc])];
        const auto& [x2, y2] = pos[cell_to_string(row[dc])];
        out += "<path class=\"chord\" data-origin=\"" + escape(cell_to_string(row[oc])) + "\" data-destination=\"" +
               escape(cell_to_string(row[dc])) + "\" data-samples=\"" + cell_to_string(row[sc]) +
               "\" data-noncompliant=\"" + cell_to_string(row[nc]) + "\" data-pct=\"" + cell_to_string(row[pc]) +
               "\" d=\"M " + num(x1) + " " + num(y1) + " Q " + num(cx) + " " + num(cy) + " " + num(x2) + " " +
               num(y2) + "\" fill=\"none\" stroke=\"#aa3377\" stroke-opacity=\"0.6\" stroke-width=\"" +
               num(1 + 7 * as_double(row[sc]) / smax) + "\"/>\n";
    }
    return out + "</svg>\n";
}

}  // namespace

const std::vector<std::string>& plottable_reports() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v{"yearly_trend", "trade_links"};
        for (const auto& [name, spec] : bar_specs()) v.push_back(name);
        std::sort(v.begin(), v.end());
        return v;
    }();
    return names;
}

std::string render_svg(const AggregateReport& report) {
    const auto& names = plottable_reports();
    if (std::find(names.begin(), names.end(), report.name) == names.end())
        throw Error(ErrorCode::UnknownReport,
                    "report '" + report.name + "' cannot be plotted; plottable reports: " + join(names, ", "));
    if (report.tables.empty() || report.primary().rows.empty()) return no_data(report);
    if (report.name == "yearly_trend") return line_chart(report);
    if (report.name == "trade_links") return chord_chart(report);
    return bar_chart(report, bar_specs().find(report.name)->second);
}

}  // namespace chefs
