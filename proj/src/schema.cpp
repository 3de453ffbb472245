#include "chefs/schema.hpp"

#include <set>

#include <json.hpp>

#include "chefs/csv.hpp"
#include "chefs/embedded.hpp"
#include "chefs/error.hpp"

namespace chefs {

Schema Schema::parse(std::string_view json_text, std::string_view origin) {
    const std::string where(origin);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedFile, where + ": " + e.what());
    }
    Schema schema;
    try {
        schema.version_ = doc.at("schema_version").get<std::string>();
        schema.checksum_algorithm_ = doc.at("checksum_algorithm").get<std::string>();
        std::set<std::string> names;
        for (const auto& v : doc.at("variables")) {
            VariableDef def;
            def.name = v.at("name").get<std::string>();
            const auto level = v.at("level").get<std::string>();
            if (level == "sample") def.level = VariableLevel::Sample;
            else if (level == "result") def.level = VariableLevel::Result;
            else throw Error(ErrorCode::MalformedFile, where + ": variable " + def.name + " has unknown level " + level);
            def.core = v.at("core").get<bool>();
            def.description = v.value("description", "");
            if (!names.insert(def.name).second)
                throw Error(ErrorCode::MalformedFile, where + ": duplicate variable " + def.name);
            if (is_reserved_column(def.name))
                throw Error(ErrorCode::MalformedFile, where + ": reserved variable name " + def.name);
            schema.variables_.push_back(std::move(def));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedFile, where + ": " + e.what());
    }
    if (schema.checksum_algorithm_ != "sha256")
        throw Error(ErrorCode::MalformedFile, where + ": unsupported checksum algorithm " + schema.checksum_algorithm_);
    return schema;
}

Schema Schema::load(const std::filesystem::path& path) { return parse(read_text_file(path), path.string()); }

const Schema& Schema::builtin() {
    static const Schema schema = parse(embedded::schema_json(), "builtin:schema.json");
    return schema;
}

const VariableDef* Schema::find(std::string_view name) const {
    for (const auto& v : variables_)
        if (v.name == name) return &v;
    return nullptr;
}

const VariableDef* Schema::find_icase(std::string_view name) const {
    for (const auto& v : variables_)
        if (iequals(v.name, name)) return &v;
    return nullptr;
}

bool is_reserved_column(std::string_view name) noexcept {
    return name == kDerivedColumn || name == kSourceFileColumn || name == kSourceRowColumn || name == "sample_id" ||
           name == "result_id";
}

SynonymTable::SynonymTable(std::vector<SynonymEntry> entries) : entries_(std::move(entries)) {
    std::set<std::pair<std::string, int>> seen;
    for (const auto& e : entries_) {
        if (!seen.emplace(e.source_name, e.era ? static_cast<int>(*e.era) : -1).second)
            throw Error(ErrorCode::InvalidConfig, "synonym table maps '" + e.source_name + "' more than once");
    }
}

SynonymTable SynonymTable::parse(std::string_view csv_text, std::string_view origin) {
    const auto table = parse_csv_text(csv_text, origin);
    const std::string where(origin);
    if (table.header.size() != 3 || trim(table.header[0]) != "source_name" ||
        trim(table.header[1]) != "canonical_name" || trim(table.header[2]) != "era")
        throw Error(ErrorCode::MalformedFile, where + ": expected header source_name,canonical_name,era");
    std::vector<SynonymEntry> entries;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto row_no = std::to_string(i + 1);
        if (row.size() != 3) throw Error(ErrorCode::MalformedRow, where + " row " + row_no + ": expected 3 fields");
        SynonymEntry e{std::string(trim(row[0])), std::string(trim(row[1])), std::nullopt};
        if (e.source_name.empty() || e.canonical_name.empty())
            throw Error(ErrorCode::MalformedRow, where + " row " + row_no + ": empty name");
        if (!trim(row[2]).empty()) {
            e.era = parse_era(row[2]);
            if (!e.era) throw Error(ErrorCode::MalformedRow, where + " row " + row_no + ": unknown era '" + row[2] + "'");
        }
        entries.push_back(std::move(e));
    }
    return SynonymTable(std::move(entries));
}

SynonymTable SynonymTable::load(const std::filesystem::path& path) { return parse(read_text_file(path), path.string()); }

const SynonymTable& SynonymTable::builtin() {
    static const SynonymTable table = parse(embedded::synonyms_csv(), "builtin:synonyms.csv");
    return table;
}

std::optional<std::string> SynonymTable::lookup(std::string_view source_name, Era era) const {
    const SynonymEntry* eraless = nullptr;
    for (const auto& e : entries_) {
        if (e.source_name != source_name) continue;
        if (e.era == era) return e.canonical_name;
        if (!e.era) eraless = &e;
    }
    if (eraless) return eraless->canonical_name;
    for (const auto& e : entries_) {
        if (!iequals(e.source_name, source_name)) continue;
        if (!e.era || e.era == era) return e.canonical_name;
    }
    return std::nullopt;
}

}  // namespace chefs
