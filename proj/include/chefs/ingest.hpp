#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chefs/catalog.hpp"
#include "chefs/hash.hpp"
#include "chefs/model.hpp"
#include "chefs/schema.hpp"

namespace chefs {

/// (hazard, sampling country, reporting year): the unit of storage.
struct PartitionKey {
    HazardCategory hazard = HazardCategory::ChemicalContaminants;
    std::string country;
    int year = 0;

    auto operator<=>(const PartitionKey&) const = default;
    /// "<hazard>/<country>/<year>"
    std::string relative_dir() const;
};

struct FileManifestEntry {
    std::filesystem::path path;
    std::string relative_path;  ///< '/'-separated, relative to the input root
    HazardCategory hazard = HazardCategory::ChemicalContaminants;
    std::string country;
    int year = 0;
    Era era = Era::SSD2;
    std::uintmax_t size_bytes = 0;

    PartitionKey key() const { return {hazard, country, year}; }
};

struct SkippedFile {
    std::string relative_path;
    std::string reason;
};

struct Discovery {
    std::vector<FileManifestEntry> entries;  ///< sorted by relative path
    std::vector<SkippedFile> skipped;
};

/// Reporting years from this one on use the SSD2 catalogues.
inline constexpr int kDefaultSsd2FromYear = 2015;

/// Recursively lists `<HAZARD>_<COUNTRY>_<YEAR>[_<suffix>].csv[.gz]` files under
/// root. A `<file>.meta.json` sidecar (hazard/country/year/era) overrides or
/// supplies what the name does not. Other files are reported as skipped.
Discovery discover_files(const std::filesystem::path& root, int ssd2_from_year = kDefaultSsd2FromYear);

struct ParsedFileName {
    HazardCategory hazard;
    std::string country;
    int year;
};
std::optional<ParsedFileName> parse_data_file_name(std::string_view file_name);

struct ColumnMapping {
    std::map<std::string, std::size_t> resolved;                       ///< canonical -> source column
    std::vector<std::pair<std::string, std::size_t>> unmapped_sources;  ///< routed to `extra`
    std::vector<std::string> missing_canonicals;
    std::vector<std::string> header;

    std::optional<std::size_t> column(std::string_view canonical) const;
};

/// Throws Error(SchemaConflict) when two source columns land on one name and
/// Error(MalformedFile) for an empty header.
ColumnMapping resolve_columns(const std::vector<std::string>& header, const SynonymTable& synonyms, Era era,
                              const Schema& schema = Schema::builtin());

struct IngestContext {
    const SynonymTable* synonyms = &SynonymTable::builtin();
    const CatalogueIndex* catalogues = nullptr;
    const Schema* schema = &Schema::builtin();
};

struct Diagnostic {
    std::string file;
    std::size_t row = 0;
    std::string kind;  ///< malformed_row, unparsed_value, sample_conflict, unparsed_date, unknown_strategy
    std::string message;
};

struct IngestStats {
    std::uint64_t rows_read = 0;
    std::uint64_t rows_malformed = 0;
    std::uint64_t duplicates_removed = 0;
    std::uint64_t samples_emitted = 0;
    std::uint64_t results_emitted = 0;
    std::uint64_t unknown_eval_codes = 0;
    std::uint64_t unparsed_values = 0;
    std::uint64_t sample_conflicts = 0;
    std::uint64_t unrecognized_strategies = 0;
    std::map<std::string, std::uint64_t> non_empty_cells;  ///< per variable present in the file
    std::map<std::string, std::uint64_t> unknown_eval_code_texts;

    /// 1 - non_empty / rows_read for every variable seen plus the given extra names.
    std::map<std::string, double> missing_rate_per_variable(const std::vector<std::string>& all_variables = {}) const;
    void accumulate(const IngestStats& other);
    nlohmann::json to_json(const std::vector<std::string>& all_variables = {}) const;
    static IngestStats from_json(const nlohmann::json& j);
};

/// Canonical fields of one long-format row after synonym renaming and
/// missing-token normalization.
struct HarmonizedRow {
    std::size_t row = 0;
    Sample sample;
    AnalyticalResult result;
    std::vector<Diagnostic> diagnostics;
};

struct MalformedRow {
    std::size_t row = 0;
    std::string reason;
};

/// Turns raw records of one file into harmonized rows. Keeps the state needed
/// to number samples that carry no explicit sample code: the file-local ordinal
/// advances whenever the sample-level fields change between consecutive rows.
class RowHarmonizer {
public:
    RowHarmonizer(const FileManifestEntry& entry, const ColumnMapping& mapping, const IngestContext& ctx);

    std::variant<HarmonizedRow, MalformedRow> process(const std::vector<std::string>& fields, std::size_t row);

private:
    const FileManifestEntry& entry_;
    const ColumnMapping& mapping_;
    const IngestContext& ctx_;
    std::vector<std::pair<std::string, std::size_t>> sample_rest_;  ///< canonical sample-level rest vars
    std::vector<std::pair<std::string, std::size_t>> result_rest_;  ///< result-level rest vars + unmapped
    std::vector<std::size_t> sample_signature_columns_;
    std::string previous_signature_;
    bool have_previous_ = false;
    long long ordinal_ = 0;
};

struct SampleIds {
    std::string sample_id;
    std::string result_id;
};

/// Content-derived identifiers. Samples with a reported code hash that code;
/// otherwise the key tuple (sampling country, year, product, sampling date,
/// strategy, source file, file-local ordinal). Results hash the sample id with
/// contaminant, analysis date, value, LOQ and evaluation code as reported.
std::string make_sample_id(const Field& sample_code, std::string_view sampling_country, std::optional<int> year,
                           std::string_view product_id, const Field& sampling_date, const Field& strategy,
                           std::string_view source_file, long long ordinal);
std::string make_result_id(std::string_view sample_id, std::string_view contaminant_id, const Field& analysis_date,
                           const Field& result_value, const Field& loq, const Field& eval_code);

/// Streaming sink for ingest_file. on_sample fires once per new sample key in
/// the file (carrying the first row's sample fields).
struct RowSink {
    std::function<void(Sample&&)> on_sample;
    std::function<void(AnalyticalResult&&)> on_result;
    std::function<void(const Diagnostic&)> on_diagnostic;
};

/// Reads the header of a data file and resolves its columns.
ColumnMapping read_mapping(const FileManifestEntry& entry, const IngestContext& ctx);

/// Streams one file through the harmonizer. Fills rows_read, rows_malformed,
/// non_empty_cells, sample_conflicts, unparsed_values and unrecognized_strategies;
/// duplicate handling happens when batches are merged.
IngestStats ingest_file(const FileManifestEntry& entry, const ColumnMapping& mapping, const IngestContext& ctx,
                        const RowSink& sink);

/// First occurrence wins. Returns the number of removed results.
std::size_t dedup(std::vector<AnalyticalResult>& results);

/// Stateful first-occurrence filter over result ids.
class Deduplicator {
public:
    /// True when the id has not been seen before.
    bool admit(std::string_view result_id);
    std::size_t size() const noexcept { return ids_.size() + other_.size(); }

private:
    std::unordered_set<Id128, Id128Hash> ids_;
    std::unordered_set<std::string> other_;  ///< ids not in 32-hex form
};

}  // namespace chefs
