#include "chefs/store.hpp"

#include <algorithm>
#include <set>
#include <unistd.h>

#include "chefs/csv.hpp"
#include "chefs/error.hpp"
#include "chefs/hash.hpp"

namespace fs = std::filesystem;

namespace chefs {

const std::vector<std::string>& core_sample_columns() {
    static const std::vector<std::string> cols{"sample_id",        "product_id",    "origin_country", "sampling_country",
                                               "sampling_year",    "sampling_date", "strategy"};
    return cols;
}

const std::vector<std::string>& core_result_columns() {
    static const std::vector<std::string> cols{"result_id", "sample_id", "contaminant_id", "result_value",
                                               "loq",       "eval_code", "analysis_date",  "hazard"};
    return cols;
}

namespace {

constexpr std::string_view kTableFiles[] = {kCoreSamplesFile, kRestSamplesFile, kCoreResultsFile, kRestResultsFile};

std::string derived_cell(const std::vector<std::string>& derived) { return join(derived, ";"); }

Field lookup_extra(const Extras& extra, std::string_view key) {
    const auto it = std::lower_bound(extra.begin(), extra.end(), key,
                                     [](const auto& kv, std::string_view k) { return kv.first < k; });
    if (it != extra.end() && it->first == key) return it->second;
    return std::nullopt;
}

Field optional_year(const std::optional<int>& y) {
    if (!y) return std::nullopt;
    return std::to_string(*y);
}

struct Tables {
    std::string core_samples, rest_samples, core_results, rest_results;
};

Tables render_tables(PartitionData& data) {
    std::sort(data.samples.begin(), data.samples.end(),
              [](const Sample& a, const Sample& b) { return a.sample_id < b.sample_id; });
    std::sort(data.results.begin(), data.results.end(),
              [](const AnalyticalResult& a, const AnalyticalResult& b) { return a.result_id < b.result_id; });

    Tables t;
    append_csv_row(t.core_samples, core_sample_columns());
    std::set<std::string> sample_rest{"product_full_name", std::string(kDerivedColumn)};
    for (const auto& s : data.samples)
        for (const auto& [k, v] : s.extra) sample_rest.insert(k);
    std::vector<std::string> header{"sample_id"};
    header.insert(header.end(), sample_rest.begin(), sample_rest.end());
    append_csv_row(t.rest_samples, header);

    std::vector<Field> row;
    for (const auto& s : data.samples) {
        row = {s.sample_id,  s.product_id,    s.origin_country, s.sampling_country, optional_year(s.sampling_year),
               s.sampling_date, s.strategy_text};
        append_csv_row(t.core_samples, std::span<const Field>(row));
        row.assign(1, s.sample_id);
        for (const auto& col : sample_rest) {
            if (col == "product_full_name") row.push_back(s.product_full_name);
            else if (col == kDerivedColumn) row.push_back(s.derived.empty() ? Field{} : Field{derived_cell(s.derived)});
            else row.push_back(lookup_extra(s.extra, col));
        }
        append_csv_row(t.rest_samples, std::span<const Field>(row));
    }

    append_csv_row(t.core_results, core_result_columns());
    std::set<std::string> result_rest{"contaminant_full_name", std::string(kDerivedColumn),
                                      std::string(kSourceFileColumn), std::string(kSourceRowColumn)};
    for (const auto& r : data.results)
        for (const auto& [k, v] : r.extra) result_rest.insert(k);
    header.assign(1, "result_id");
    header.insert(header.end(), result_rest.begin(), result_rest.end());
    append_csv_row(t.rest_results, header);
    for (const auto& r : data.results) {
        row = {r.result_id,   r.sample_id,      r.contaminant_id,   r.result_value_text,
               r.loq_text,    r.eval_code_text, r.analysis_date,    std::string(hazard_code(r.hazard))};
        append_csv_row(t.core_results, std::span<const Field>(row));
        row.assign(1, r.result_id);
        for (const auto& col : result_rest) {
            if (col == "contaminant_full_name") row.push_back(r.contaminant_full_name);
            else if (col == kDerivedColumn) row.push_back(r.derived.empty() ? Field{} : Field{derived_cell(r.derived)});
            else if (col == kSourceFileColumn) row.push_back(r.source_file);
            else if (col == kSourceRowColumn) row.push_back(std::to_string(r.source_row));
            else row.push_back(lookup_extra(r.extra, col));
        }
        append_csv_row(t.rest_results, std::span<const Field>(row));
    }
    return t;
}

}  // namespace

nlohmann::json PartitionManifest::to_json(const Schema& schema) const {
    std::vector<std::string> variables;
    for (const auto& v : schema.variables()) variables.push_back(v.name);
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["key"] = {{"hazard", hazard_code(key.hazard)}, {"country", key.country}, {"year", key.year}};
    j["row_counts"] = {{"core_samples", sample_rows},
                       {"rest_samples", sample_rows},
                       {"core_results", result_rows},
                       {"rest_results", result_rows}};
    j["checksum_algorithm"] = checksum_algorithm;
    j["checksums"] = checksums;
    auto& src = j["sources"] = nlohmann::json::array();
    for (const auto& s : sources)
        src.push_back({{"relative_path", s.relative_path},
                       {"sha256", s.sha256},
                       {"era", to_string(s.era)},
                       {"stats", s.stats.to_json(variables)}});
    return j;
}

PartitionManifest PartitionManifest::from_json(const nlohmann::json& j) {
    PartitionManifest m;
    m.schema_version = j.at("schema_version").get<std::string>();
    const auto& k = j.at("key");
    const auto hazard = parse_hazard_code(k.at("hazard").get<std::string>());
    if (!hazard) throw Error(ErrorCode::InvalidPartition, "manifest has an unknown hazard");
    m.key = {*hazard, k.at("country").get<std::string>(), k.at("year").get<int>()};
    const auto& counts = j.at("row_counts");
    m.sample_rows = counts.at("core_samples").get<std::uint64_t>();
    m.result_rows = counts.at("core_results").get<std::uint64_t>();
    if (counts.at("rest_samples").get<std::uint64_t>() != m.sample_rows ||
        counts.at("rest_results").get<std::uint64_t>() != m.result_rows)
        throw Error(ErrorCode::InvalidPartition, "core and rest row counts differ");
    m.checksum_algorithm = j.at("checksum_algorithm").get<std::string>();
    m.checksums = j.at("checksums").get<std::map<std::string, std::string>>();
    for (const auto& s : j.at("sources")) {
        SourceRecord r;
        r.relative_path = s.at("relative_path").get<std::string>();
        r.sha256 = s.at("sha256").get<std::string>();
        r.era = parse_era(s.at("era").get<std::string>()).value_or(Era::SSD2);
        r.stats = IngestStats::from_json(s.at("stats"));
        m.sources.push_back(std::move(r));
    }
    return m;
}

std::string PartitionManifest::digest() const {
    Sha256 h;
    for (const auto& [file, sum] : checksums) {
        h.update(file);
        h.update(" ");
        h.update(sum);
        h.update("\n");
    }
    return h.hex_digest();
}

PartitionManifest write_partition(const fs::path& store_root, PartitionData& data, std::vector<SourceRecord> sources,
                                  const Schema& schema) {
    const Tables tables = render_tables(data);
    PartitionManifest m;
    m.schema_version = schema.version();
    m.key = data.key;
    m.sample_rows = data.samples.size();
    m.result_rows = data.results.size();
    m.checksum_algorithm = schema.checksum_algorithm();
    std::sort(sources.begin(), sources.end(),
              [](const auto& a, const auto& b) { return a.relative_path < b.relative_path; });
    m.sources = std::move(sources);

    const fs::path final_dir = store_root / data.key.relative_dir();
    const fs::path parent = final_dir.parent_path();
    const fs::path tmp = parent / ("." + final_dir.filename().string() + ".tmp-" + std::to_string(::getpid()));
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + parent.string() + ": " + ec.message());
    fs::remove_all(tmp, ec);
    fs::create_directory(tmp, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + tmp.string() + ": " + ec.message());

    const std::pair<std::string_view, const std::string*> files[] = {{kCoreSamplesFile, &tables.core_samples},
                                                                     {kRestSamplesFile, &tables.rest_samples},
                                                                     {kCoreResultsFile, &tables.core_results},
                                                                     {kRestResultsFile, &tables.rest_results}};
    for (const auto& [name, content] : files) {
        write_text_file(tmp / name, *content);
        m.checksums[std::string(name)] = sha256_hex(*content);
    }
    write_text_file(tmp / kManifestFile, m.to_json(schema).dump(2) + "\n");

    fs::remove_all(final_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot replace " + final_dir.string() + ": " + ec.message());
    fs::rename(tmp, final_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot finalize " + final_dir.string() + ": " + ec.message());
    return m;
}

namespace {

std::size_t column_index(const CsvTable& t, std::string_view name, const fs::path& file) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end())
        throw Error(ErrorCode::InvalidPartition, file.string() + ": missing column " + std::string(name));
    return static_cast<std::size_t>(it - t.header.begin());
}

Field cell(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s;
}

std::string load_table(const StoredPartition& p, std::string_view name, bool verify) {
    const fs::path file = p.dir / name;
    std::string content;
    try {
        content = read_text_file(file);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidPartition, e.what());
    }
    if (verify) {
        if (!p.manifest) throw Error(ErrorCode::InvalidPartition, p.dir.string() + ": no manifest");
        const auto it = p.manifest->checksums.find(std::string(name));
        if (it == p.manifest->checksums.end() || it->second != sha256_hex(content))
            throw Error(ErrorCode::InvalidPartition, file.string() + ": checksum mismatch");
    }
    return content;
}

std::vector<std::string> split_derived(const Field& f) {
    std::vector<std::string> out;
    if (!f) return out;
    for (auto part : split(*f, ";")) out.emplace_back(part);
    return out;
}

}  // namespace

PartitionData read_partition(const StoredPartition& p, bool verify) {
    PartitionData data;
    data.key = p.key;
    const auto core_s = parse_csv_text(load_table(p, kCoreSamplesFile, verify), (p.dir / kCoreSamplesFile).string());
    const auto rest_s = parse_csv_text(load_table(p, kRestSamplesFile, verify), (p.dir / kRestSamplesFile).string());
    const auto core_r = parse_csv_text(load_table(p, kCoreResultsFile, verify), (p.dir / kCoreResultsFile).string());
    const auto rest_r = parse_csv_text(load_table(p, kRestResultsFile, verify), (p.dir / kRestResultsFile).string());
    if (core_s.header != core_sample_columns() || core_r.header != core_result_columns())
        throw Error(ErrorCode::InvalidPartition, p.dir.string() + ": unexpected core columns");
    if (core_s.rows.size() != rest_s.rows.size() || core_r.rows.size() != rest_r.rows.size())
        throw Error(ErrorCode::InvalidPartition, p.dir.string() + ": core and rest row counts differ");
    const std::uint8_t bit = hazard_bit(p.key.hazard);

    data.samples.reserve(core_s.rows.size());
    for (std::size_t i = 0; i < core_s.rows.size(); ++i) {
        const auto& c = core_s.rows[i];
        const auto& r = rest_s.rows[i];
        if (c.size() != core_s.header.size() || r.size() != rest_s.header.size() || r[0] != c[0])
            throw Error(ErrorCode::InvalidPartition, p.dir.string() + ": sample tables out of step at row " +
                                                         std::to_string(i + 1));
        Sample s;
        s.sample_id = c[0];
        s.product_id = c[1];
        s.origin_country = cell(c[2]);
        s.sampling_country = c[3];
        if (!c[4].empty()) {
            const auto y = parse_integer(c[4]);
            if (!y) throw Error(ErrorCode::InvalidPartition, p.dir.string() + ": bad sampling_year " + c[4]);
            s.sampling_year = static_cast<int>(*y);
        }
        s.sampling_date = cell(c[5]);
        s.strategy_text = cell(c[6]);
        s.strategy = parse_strategy(s.strategy_text).strategy;
        s.hazards = bit;
        for (std::size_t k = 1; k < rest_s.header.size(); ++k) {
            const auto& name = rest_s.header[k];
            if (name == "product_full_name") s.product_full_name = cell(r[k]);
            else if (name == kDerivedColumn) s.derived = split_derived(cell(r[k]));
            else if (!r[k].empty()) s.extra.emplace_back(name, r[k]);
        }
        data.samples.push_back(std::move(s));
    }

    const std::size_t src_file = column_index(rest_r, kSourceFileColumn, p.dir / kRestResultsFile);
    const std::size_t src_row = column_index(rest_r, kSourceRowColumn, p.dir / kRestResultsFile);
    data.results.reserve(core_r.rows.size());
    for (std::size_t i = 0; i < core_r.rows.size(); ++i) {
        const auto& c = core_r.rows[i];
        const auto& r = rest_r.rows[i];
        if (c.size() != core_r.header.size() || r.size() != rest_r.header.size() || r[0] != c[0])
            throw Error(ErrorCode::InvalidPartition, p.dir.string() + ": result tables out of step at row " +
                                                         std::to_string(i + 1));
        AnalyticalResult a;
        a.result_id = c[0];
        a.sample_id = c[1];
        a.contaminant_id = c[2];
        a.result_value_text = cell(c[3]);
        if (a.result_value_text) a.result_value = parse_decimal(*a.result_value_text);
        a.loq_text = cell(c[4]);
        if (a.loq_text) a.loq = parse_decimal(*a.loq_text);
        a.eval_code_text = cell(c[5]);
        a.eval_code = EvaluationCode(c[5]);
        a.analysis_date = cell(c[6]);
        const auto hazard = parse_hazard_code(c[7]);
        if (!hazard) throw Error(ErrorCode::InvalidPartition, p.dir.string() + ": bad hazard " + c[7]);
        a.hazard = *hazard;
        for (std::size_t k = 1; k < rest_r.header.size(); ++k) {
            const auto& name = rest_r.header[k];
            if (name == "contaminant_full_name") a.contaminant_full_name = cell(r[k]);
            else if (name == kDerivedColumn) a.derived = split_derived(cell(r[k]));
            else if (k == src_file) a.source_file = r[k];
            else if (k == src_row) a.source_row = static_cast<std::size_t>(parse_integer(r[k]).value_or(0));
            else if (!r[k].empty()) a.extra.emplace_back(name, r[k]);
        }
        data.results.push_back(std::move(a));
    }
    return data;
}

std::vector<std::string> read_result_ids(const StoredPartition& p) {
    std::vector<std::string> ids;
    CsvReader reader(p.dir / kCoreResultsFile);
    std::vector<std::string> fields;
    if (!reader.read_record(fields)) return ids;
    while (reader.read_record(fields))
        if (!fields.empty()) ids.push_back(std::move(fields[0]));
    return ids;
}

namespace {

bool hidden(const fs::path& p) {
    const auto name = p.filename().string();
    return !name.empty() && name[0] == '.';
}

std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
        if (it->is_directory() && !hidden(it->path())) out.push_back(it->path());
    std::sort(out.begin(), out.end());
    return out;
}

void inspect(StoredPartition& p) {
    const fs::path manifest = p.dir / kManifestFile;
    try {
        p.manifest = PartitionManifest::from_json(nlohmann::json::parse(read_text_file(manifest)));
    } catch (const std::exception& e) {
        p.problem = std::string("unreadable manifest: ") + e.what();
        return;
    }
    if (!(p.manifest->key == p.key)) {
        p.problem = "manifest key does not match directory";
        return;
    }
    p.checksums_ok = true;
    for (auto name : kTableFiles) {
        const auto it = p.manifest->checksums.find(std::string(name));
        std::string actual;
        try {
            actual = sha256_file_hex(p.dir / name);
        } catch (const Error&) {
            p.checksums_ok = false;
            p.problem = std::string("missing table ") + std::string(name);
            return;
        }
        if (it == p.manifest->checksums.end() || it->second != actual) {
            p.checksums_ok = false;
            p.problem = std::string("checksum mismatch in ") + std::string(name);
            return;
        }
    }
    p.valid = true;
}

}  // namespace

Store::Store(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    if (!fs::is_directory(root_, ec)) throw Error(ErrorCode::Io, "store not found: " + root_.string());
    for (const auto& hdir : sorted_subdirs(root_)) {
        const auto hazard = parse_hazard_code(hdir.filename().string());
        if (!hazard || hdir.filename().string() != hazard_code(*hazard)) continue;
        for (const auto& cdir : sorted_subdirs(hdir)) {
            for (const auto& ydir : sorted_subdirs(cdir)) {
                const auto year = parse_integer(ydir.filename().string());
                if (!year) continue;
                StoredPartition p;
                p.key = {*hazard, cdir.filename().string(), static_cast<int>(*year)};
                p.dir = ydir;
                inspect(p);
                partitions_.push_back(std::move(p));
            }
        }
    }
    std::sort(partitions_.begin(), partitions_.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
}

std::vector<const StoredPartition*> Store::valid_partitions() const {
    std::vector<const StoredPartition*> out;
    for (const auto& p : partitions_)
        if (p.valid) out.push_back(&p);
    return out;
}

std::string Store::checksum() const {
    Sha256 h;
    for (const auto* p : valid_partitions()) {
        h.update(p->key.relative_dir());
        h.update(" ");
        h.update(p->manifest->digest());
        h.update("\n");
    }
    return h.hex_digest();
}

void write_store_summary(const fs::path& store_root, const Store& store, const nlohmann::json& extra) {
    nlohmann::json j = extra;
    j["schema_version"] = Schema::builtin().version();
    j["checksum_algorithm"] = Schema::builtin().checksum_algorithm();
    j["store_checksum"] = store.checksum();
    auto& parts = j["partitions"] = nlohmann::json::array();
    for (const auto& p : store.partitions()) {
        nlohmann::json e{{"key", p.key.relative_dir()}, {"valid", p.valid}};
        if (p.manifest) {
            e["sample_rows"] = p.manifest->sample_rows;
            e["result_rows"] = p.manifest->result_rows;
        }
        parts.push_back(std::move(e));
    }
    write_text_file(store_root / kStoreFile, j.dump(2) + "\n");
}

bool directory_is_empty(const fs::path& dir) {
    std::error_code ec;
    if (!fs::exists(dir, ec)) return true;
    return fs::is_directory(dir, ec) && fs::directory_iterator(dir, ec) == fs::directory_iterator();
}

}  // namespace chefs
