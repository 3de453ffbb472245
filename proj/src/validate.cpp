#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "chefs/csv.hpp"
#include "chefs/error.hpp"
#include "chefs/parallel.hpp"
#include "chefs/store.hpp"

namespace fs = std::filesystem;

namespace chefs {

namespace {

bool has(const std::vector<std::string>& v, std::string_view s) { return std::find(v.begin(), v.end(), s) != v.end(); }

Field extra_value(const Extras& extra, std::string_view key) {
    for (const auto& [k, v] : extra)
        if (k == key) return v;
    return std::nullopt;
}

Field sample_value(const Sample& s, std::string_view name) {
    if (has(s.derived, name)) return std::nullopt;
    if (name == "product_id") return s.product_id;
    if (name == "product_full_name") return s.product_full_name;
    if (name == "origin_country") return s.origin_country;
    if (name == "sampling_country") return s.sampling_country;
    if (name == "sampling_year") return s.sampling_year ? Field{std::to_string(*s.sampling_year)} : Field{};
    if (name == "sampling_date") return s.sampling_date;
    if (name == "strategy") return s.strategy_text;
    return extra_value(s.extra, name);
}

Field result_value(const AnalyticalResult& r, std::string_view name) {
    if (has(r.derived, name)) return std::nullopt;
    if (name == "contaminant_id") return r.contaminant_id;
    if (name == "contaminant_full_name") return r.contaminant_full_name;
    if (name == "result_value") return r.result_value_text;
    if (name == "loq") return r.loq_text;
    if (name == "eval_code") return r.eval_code_text;
    if (name == "analysis_date") return r.analysis_date;
    return extra_value(r.extra, name);
}

bool same_cell(std::string_view column, const Field& expected, const Field& actual) {
    if (expected == actual) return true;
    if (column == "sampling_year" && expected && actual) {
        const auto a = parse_integer(*expected);
        const auto b = parse_integer(*actual);
        return a && b && *a == *b;
    }
    return false;
}

struct ColumnPlan {
    std::string header;     ///< source column name, used in reports
    std::string name;       ///< canonical variable or unmapped source name
    bool sample_level = false;
};

class Collector {
public:
    Collector(PartitionValidation& v, std::size_t cap) : v_(v), cap_(cap) {}
    void mismatch(CellMismatch m) {
        ++v_.mismatch_count;
        if (v_.mismatches.size() < cap_) v_.mismatches.push_back(std::move(m));
    }
    void removed(const std::string& id) {
        ++v_.duplicates;
        if (v_.removed_ids.size() < cap_) v_.removed_ids.push_back(id);
    }

private:
    PartitionValidation& v_;
    std::size_t cap_;
};

PartitionValidation validate_one(const PartitionKey& key, const StoredPartition* stored,
                                 const std::vector<const FileManifestEntry*>& sources,
                                 const std::unordered_set<Id128, Id128Hash>& global_ids,
                                 const ValidateOptions& opt) {
    PartitionValidation v;
    v.key = key;
    v.in_store = stored != nullptr;
    Collector out(v, opt.cap);

    PartitionData data;
    data.key = key;
    if (stored) {
        v.checksums_ok = stored->checksums_ok;
        if (!stored->checksums_ok) v.notes.push_back("checksum verification failed: " + stored->problem);
        try {
            data = read_partition(*stored, false);
        } catch (const std::exception& e) {
            out.mismatch({key.relative_dir(), 0, "", "unreadable", std::string(e.what()), std::nullopt});
            return v;
        }
    }

    std::unordered_map<std::string_view, const Sample*> samples;
    for (const auto& s : data.samples) samples.emplace(s.sample_id, &s);
    std::unordered_set<std::string_view> partition_ids;
    std::map<std::string, std::unordered_map<std::size_t, std::size_t>, std::less<>> by_position;
    for (std::size_t i = 0; i < data.results.size(); ++i) {
        const auto& r = data.results[i];
        partition_ids.insert(r.result_id);
        by_position[r.source_file][r.source_row] = i;
    }
    std::vector<bool> visited(data.results.size(), false);

    if (stored && stored->manifest) {
        std::set<std::string> present;
        for (const auto* e : sources) present.insert(e->relative_path);
        for (const auto& s : stored->manifest->sources)
            if (!present.contains(s.relative_path)) v.notes.push_back("source not found: " + s.relative_path);
    }

    std::vector<std::string> fields;
    for (const auto* entry : sources) {
        ColumnMapping mapping;
        try {
            mapping = read_mapping(*entry, opt.ctx);
        } catch (const Error& e) {
            out.mismatch({entry->relative_path, 0, "", "unreadable", std::string(e.what()), std::nullopt});
            continue;
        }
        std::vector<ColumnPlan> plan(mapping.header.size());
        for (const auto& [name, idx] : mapping.resolved) {
            const auto* def = opt.ctx.schema->find(name);
            plan[idx] = {mapping.header[idx], name, def && def->level == VariableLevel::Sample};
        }
        for (const auto& [name, idx] : mapping.unmapped_sources) plan[idx] = {mapping.header[idx], name, false};

        const auto file_rows = by_position.find(entry->relative_path);
        RowHarmonizer harmonizer(*entry, mapping, opt.ctx);
        CsvReader reader(entry->path);
        reader.read_record(fields);
        while (reader.read_record(fields)) {
            ++v.rows_read;
            const std::size_t row = reader.record_number() - 1;
            auto outcome = harmonizer.process(fields, row);

            std::optional<std::size_t> stored_index;
            if (file_rows != by_position.end()) {
                const auto it = file_rows->second.find(row);
                if (it != file_rows->second.end()) stored_index = it->second;
            }
            if (!stored_index) {
                if (std::holds_alternative<MalformedRow>(outcome)) {
                    ++v.rows_malformed;
                    continue;
                }
                const auto& id = std::get<HarmonizedRow>(outcome).result.result_id;
                const auto compact = parse_id128(id);
                if (partition_ids.contains(id) || (compact && global_ids.contains(*compact))) out.removed(id);
                else out.mismatch({entry->relative_path, row, "", "missing_row", id, std::nullopt});
                continue;
            }

            visited[*stored_index] = true;
            ++v.rows_matched;
            const auto& r = data.results[*stored_index];
            const auto sit = samples.find(r.sample_id);
            if (sit == samples.end()) {
                out.mismatch({entry->relative_path, row, "sample_id", "cell", r.sample_id, std::nullopt});
                continue;
            }
            if (fields.size() != plan.size()) {
                out.mismatch({entry->relative_path, row, "", "cell",
                              std::to_string(fields.size()) + " fields", std::to_string(plan.size()) + " fields"});
                continue;
            }
            for (std::size_t c = 0; c < plan.size(); ++c) {
                const Field expected = normalize_cell(fields[c]);
                const Field actual =
                    plan[c].sample_level ? sample_value(*sit->second, plan[c].name) : result_value(r, plan[c].name);
                if (!same_cell(plan[c].name, expected, actual))
                    out.mismatch({entry->relative_path, row, plan[c].header, "cell", expected, actual});
            }
        }
    }

    for (std::size_t i = 0; i < data.results.size(); ++i)
        if (!visited[i]) {
            const auto& r = data.results[i];
            out.mismatch({r.source_file, r.source_row, "", "extra_row", std::nullopt, r.result_id});
        }
    return v;
}

nlohmann::json field_json(const Field& f) { return f ? nlohmann::json(*f) : nlohmann::json(nullptr); }

}  // namespace

ValidationReport round_trip_validate(const Store& store, const fs::path& input_root, const ValidateOptions& opt) {
    const auto discovery = discover_files(input_root, opt.ssd2_from_year);
    std::map<PartitionKey, std::vector<const FileManifestEntry*>> sources;
    for (const auto& e : discovery.entries) sources[e.key()].push_back(&e);
    std::map<PartitionKey, const StoredPartition*> stored;
    for (const auto& p : store.partitions()) {
        stored[p.key] = &p;
        sources.try_emplace(p.key);
    }

    std::unordered_set<Id128, Id128Hash> global_ids;
    for (const auto& p : store.partitions()) {
        try {
            for (const auto& id : read_result_ids(p))
                if (const auto c = parse_id128(id)) global_ids.insert(*c);
        } catch (const Error&) {
            // unreadable partitions are reported by validate_one
        }
    }

    std::vector<std::pair<PartitionKey, std::vector<const FileManifestEntry*>>> work(sources.begin(), sources.end());
    ValidationReport report;
    report.partitions.resize(work.size());
    parallel_for(work.size(), opt.jobs, [&](std::size_t i) {
        const auto it = stored.find(work[i].first);
        report.partitions[i] = validate_one(work[i].first, it == stored.end() ? nullptr : it->second, work[i].second,
                                            global_ids, opt);
    });
    for (const auto& p : report.partitions) report.mismatch_count += p.mismatch_count;
    return report;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["ok"] = ok();
    j["mismatch_count"] = mismatch_count;
    auto& parts = j["partitions"] = nlohmann::json::array();
    for (const auto& p : partitions) {
        nlohmann::json e;
        e["key"] = p.key.relative_dir();
        e["in_store"] = p.in_store;
        e["checksums_ok"] = p.checksums_ok;
        e["rows_read"] = p.rows_read;
        e["rows_matched"] = p.rows_matched;
        e["rows_malformed"] = p.rows_malformed;
        e["duplicates"] = p.duplicates;
        e["removed_ids"] = p.removed_ids;
        e["mismatch_count"] = p.mismatch_count;
        auto& ms = e["mismatches"] = nlohmann::json::array();
        for (const auto& m : p.mismatches)
            ms.push_back({{"file", m.file},
                          {"row", m.row},
                          {"column", m.column},
                          {"kind", m.kind},
                          {"expected", field_json(m.expected)},
                          {"actual", field_json(m.actual)}});
        e["notes"] = p.notes;
        parts.push_back(std::move(e));
    }
    return j;
}

}  // namespace chefs
