#include "chefs/report.hpp"

#include <cmath>
#include <cstdio>

#include "chefs/csv.hpp"
#include "chefs/error.hpp"
#include "chefs/text.hpp"

namespace fs = std::filesystem;

namespace chefs {

std::string cell_to_string(const Cell& c) {
    struct V {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(V{}, c);
}

std::optional<std::size_t> ReportTable::column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column) return i;
    return std::nullopt;
}

std::string ReportTable::to_csv() const {
    std::string out;
    append_csv_row(out, columns);
    std::vector<std::string> cells;
    for (const auto& row : rows) {
        cells.clear();
        for (const auto& c : row) cells.push_back(cell_to_string(c));
        append_csv_row(out, cells);
    }
    return out;
}

ReportTable& AggregateReport::add_table(std::string table_name, std::vector<std::string> columns) {
    tables.push_back({std::move(table_name), std::move(columns), {}});
    return tables.back();
}

const ReportTable* AggregateReport::find(std::string_view table_name) const {
    for (const auto& t : tables)
        if (t.name == table_name) return &t;
    return nullptr;
}

namespace {

nlohmann::json cell_json(const Cell& c) {
    struct V {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(std::int64_t v) const { return v; }
        nlohmann::json operator()(double v) const { return v; }
        nlohmann::json operator()(const std::string& v) const { return v; }
    };
    return std::visit(V{}, c);
}

Cell json_cell(const nlohmann::json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number()) return j.get<double>();
    return j.get<std::string>();
}

}  // namespace

nlohmann::json AggregateReport::to_json(const nlohmann::json& provenance) const {
    nlohmann::json j;
    j["report"] = name;
    j["params"] = params;
    if (!provenance.is_null()) j["provenance"] = provenance;
    auto& ts = j["tables"] = nlohmann::json::array();
    for (const auto& t : tables) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : t.rows) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& c : r) row.push_back(cell_json(c));
            rows.push_back(std::move(row));
        }
        ts.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
    }
    return j;
}

AggregateReport AggregateReport::from_json(const nlohmann::json& j) {
    AggregateReport r;
    r.name = j.at("report").get<std::string>();
    r.params = j.value("params", nlohmann::json::object());
    for (const auto& t : j.at("tables")) {
        auto& table = r.add_table(t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>());
        for (const auto& row : t.at("rows")) {
            std::vector<Cell> cells;
            for (const auto& c : row) cells.push_back(json_cell(c));
            table.rows.push_back(std::move(cells));
        }
    }
    return r;
}

void write_report_files(const AggregateReport& report, const fs::path& dir, const nlohmann::json& provenance) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < report.tables.size(); ++i) {
        const auto file = i == 0 ? report.name + ".csv" : report.name + "__" + report.tables[i].name + ".csv";
        write_text_file(dir / file, report.tables[i].to_csv());
    }
    write_text_file(dir / (report.name + ".json"), report.to_json(provenance).dump(2) + "\n");
}

std::vector<std::string> compare_reports(const AggregateReport& a, const AggregateReport& b, double rel_tol,
                                         std::size_t max_differences) {
    std::vector<std::string> diffs;
    auto note = [&](std::string s) {
        if (diffs.size() < max_differences) diffs.push_back(std::move(s));
    };
    if (a.name != b.name) note("report name " + a.name + " vs " + b.name);
    if (a.tables.size() != b.tables.size()) {
        note(a.name + ": table count " + std::to_string(a.tables.size()) + " vs " + std::to_string(b.tables.size()));
        return diffs;
    }
    for (std::size_t t = 0; t < a.tables.size(); ++t) {
        const auto& ta = a.tables[t];
        const auto& tb = b.tables[t];
        const std::string where = a.name + "/" + ta.name;
        if (ta.name != tb.name || ta.columns != tb.columns) {
            note(where + ": table layout differs");
            continue;
        }
        if (ta.rows.size() != tb.rows.size())
            note(where + ": row count " + std::to_string(ta.rows.size()) + " vs " + std::to_string(tb.rows.size()));
        const std::size_t n = std::min(ta.rows.size(), tb.rows.size());
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < ta.columns.size(); ++c) {
                const Cell& x = ta.rows[r][c];
                const Cell& y = tb.rows[r][c];
                bool same = x == y;
                if (!same && std::holds_alternative<double>(x) && std::holds_alternative<double>(y)) {
                    const double u = std::get<double>(x);
                    const double v = std::get<double>(y);
                    same = std::fabs(u - v) <= rel_tol * std::max(std::fabs(u), std::fabs(v));
                }
                if (!same)
                    note(where + " row " + std::to_string(r + 1) + " column " + ta.columns[c] + ": " +
                         cell_to_string(x) + " vs " + cell_to_string(y));
            }
        }
    }
    return diffs;
}

std::string format_percent(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

}  // namespace chefs
