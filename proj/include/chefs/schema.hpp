#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chefs/catalog.hpp"

namespace chefs {

enum class VariableLevel : std::uint8_t { Sample, Result };

struct VariableDef {
    std::string name;
    VariableLevel level = VariableLevel::Result;
    bool core = false;
    std::string description;
};

/// Canonical variable list, versioned, with the core/rest flag per variable.
class Schema {
public:
    static Schema parse(std::string_view json_text, std::string_view origin);
    static Schema load(const std::filesystem::path& path);
    static const Schema& builtin();

    const std::string& version() const noexcept { return version_; }
    const std::string& checksum_algorithm() const noexcept { return checksum_algorithm_; }
    const std::vector<VariableDef>& variables() const noexcept { return variables_; }
    const VariableDef* find(std::string_view name) const;
    /// Case-insensitive lookup, used as the last resolution step.
    const VariableDef* find_icase(std::string_view name) const;

private:
    std::string version_;
    std::string checksum_algorithm_;
    std::vector<VariableDef> variables_;
};

/// Column names reserved by the store: bookkeeping columns of the rest tables
/// plus the two id columns.
inline constexpr std::string_view kDerivedColumn = "_derived";
inline constexpr std::string_view kSourceFileColumn = "_source_file";
inline constexpr std::string_view kSourceRowColumn = "_source_row";
bool is_reserved_column(std::string_view name) noexcept;

struct SynonymEntry {
    std::string source_name;
    std::string canonical_name;
    std::optional<Era> era;
};

/// Source column name -> canonical variable, optionally restricted to one era.
class SynonymTable {
public:
    SynonymTable() = default;
    explicit SynonymTable(std::vector<SynonymEntry> entries);

    static SynonymTable parse(std::string_view csv_text, std::string_view origin);
    static SynonymTable load(const std::filesystem::path& path);
    static const SynonymTable& builtin();

    /// Exact name first (era-specific, then era-less), then case-insensitive.
    std::optional<std::string> lookup(std::string_view source_name, Era era) const;
    const std::vector<SynonymEntry>& entries() const noexcept { return entries_; }

private:
    std::vector<SynonymEntry> entries_;
};

}  // namespace chefs
