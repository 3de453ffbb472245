#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace chefs {

/// Null, count, fraction or label.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct ReportTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::optional<std::size_t> column_index(std::string_view column) const;
    std::string to_csv() const;
};

/// Named output of one analytics operation. The first table is the primary one;
/// some reports carry companion tables (edges, per_hazard, ...).
struct AggregateReport {
    std::string name;
    nlohmann::json params = nlohmann::json::object();
    std::deque<ReportTable> tables;  ///< deque: add_table references stay valid

    ReportTable& add_table(std::string table_name, std::vector<std::string> columns);
    const ReportTable& primary() const { return tables.front(); }
    const ReportTable* find(std::string_view table_name) const;

    nlohmann::json to_json(const nlohmann::json& provenance = nullptr) const;
    static AggregateReport from_json(const nlohmann::json& j);
};

/// Writes <name>.csv (primary), <name>__<table>.csv (others) and <name>.json.
void write_report_files(const AggregateReport& report, const std::filesystem::path& dir,
                        const nlohmann::json& provenance);

/// Integers and strings must match exactly; fractions within rel_tol relative.
std::vector<std::string> compare_reports(const AggregateReport& expected, const AggregateReport& actual,
                                         double rel_tol = 1e-12, std::size_t max_differences = 20);

/// Fraction rendered as a percentage with two decimals, e.g. 0.00093 -> "0.09%".
std::string format_percent(double fraction);

std::string cell_to_string(const Cell& c);

struct ReportRequest {
    std::string name;
    nlohmann::json params = nlohmann::json::object();
};

}  // namespace chefs
