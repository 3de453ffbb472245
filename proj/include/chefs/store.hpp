#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chefs/ingest.hpp"
#include "chefs/model.hpp"
#include "chefs/schema.hpp"

namespace chefs {

inline constexpr std::string_view kCoreSamplesFile = "core_samples.csv";
inline constexpr std::string_view kRestSamplesFile = "rest_samples.csv";
inline constexpr std::string_view kCoreResultsFile = "core_results.csv";
inline constexpr std::string_view kRestResultsFile = "rest_results.csv";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kStoreFile = "store.json";

const std::vector<std::string>& core_sample_columns();
const std::vector<std::string>& core_result_columns();

/// One input file that contributed to a partition.
struct SourceRecord {
    std::string relative_path;
    std::string sha256;
    Era era = Era::SSD2;
    IngestStats stats;
};

struct PartitionManifest {
    std::string schema_version;
    PartitionKey key;
    std::uint64_t sample_rows = 0;
    std::uint64_t result_rows = 0;
    std::string checksum_algorithm = "sha256";
    std::map<std::string, std::string> checksums;  ///< table file name -> digest
    std::vector<SourceRecord> sources;

    nlohmann::json to_json(const Schema& schema = Schema::builtin()) const;
    static PartitionManifest from_json(const nlohmann::json& j);
    /// Digest over the table checksums; feeds the store checksum.
    std::string digest() const;
};

/// In-memory content of one partition. Rows need not be sorted.
struct PartitionData {
    PartitionKey key;
    std::vector<Sample> samples;
    std::vector<AnalyticalResult> results;
};

/// Writes store_root/<hazard>/<country>/<year>/ atomically: tables go to a
/// hidden temporary directory that is renamed into place once the manifest is
/// written. Rows are sorted by id. An existing partition directory is replaced.
PartitionManifest write_partition(const std::filesystem::path& store_root, PartitionData& data,
                                  std::vector<SourceRecord> sources, const Schema& schema = Schema::builtin());

struct StoredPartition {
    PartitionKey key;
    std::filesystem::path dir;
    std::optional<PartitionManifest> manifest;
    bool valid = false;
    std::string problem;  ///< why the partition is invalid
    bool checksums_ok = false;
};

/// Reads the four tables back into samples and results. With verify set,
/// throws Error(InvalidPartition) when a table does not match its checksum.
PartitionData read_partition(const StoredPartition& partition, bool verify = true);

/// Result ids of a partition, read from the core table only.
std::vector<std::string> read_result_ids(const StoredPartition& partition);

/// Read-only view of a store directory. Hidden directories (temporary writes)
/// are ignored; partitions lacking a readable manifest or with mismatching
/// checksums are listed but marked invalid.
class Store {
public:
    explicit Store(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    const std::vector<StoredPartition>& partitions() const noexcept { return partitions_; }
    std::vector<const StoredPartition*> valid_partitions() const;
    /// sha256 over the valid partitions' key and manifest digest, in key order.
    std::string checksum() const;

private:
    std::filesystem::path root_;
    std::vector<StoredPartition> partitions_;
};

/// Writes the top-level store.json summary.
void write_store_summary(const std::filesystem::path& store_root, const Store& store, const nlohmann::json& extra);

/// True when the directory is missing or empty.
bool directory_is_empty(const std::filesystem::path& dir);

// Selections -----------------------------------------------------------------

struct SelectionFilter {
    std::optional<int> year;
    std::optional<HazardCategory> hazard;
    std::optional<std::string> sampling_country;
    std::optional<ComplianceClass> eval_class;
    std::optional<SamplingStrategy> strategy;
};

struct SelectionResult {
    std::vector<std::string> columns;
    std::vector<std::vector<Field>> rows;
};

const std::vector<std::string>& selection_names();

/// Predefined read-only selections over the core tables. Rows come in
/// (partition key, result_id) order. Unknown names throw Error(UnknownSelection).
SelectionResult read_selection(const Store& store, std::string_view name, const SelectionFilter& filter = {});

// Round-trip validation ------------------------------------------------------

struct CellMismatch {
    std::string file;
    std::size_t row = 0;
    std::string column;
    std::string kind;  ///< cell, missing_row, extra_row, unreadable
    Field expected;
    Field actual;
};

struct PartitionValidation {
    PartitionKey key;
    bool in_store = false;
    bool checksums_ok = true;
    std::uint64_t rows_read = 0;
    std::uint64_t rows_matched = 0;
    std::uint64_t rows_malformed = 0;
    std::uint64_t duplicates = 0;
    std::vector<std::string> removed_ids;  ///< capped
    std::uint64_t mismatch_count = 0;
    std::vector<CellMismatch> mismatches;  ///< capped
    std::vector<std::string> notes;
};

struct ValidationReport {
    std::vector<PartitionValidation> partitions;
    std::uint64_t mismatch_count = 0;

    /// No cell mismatches and every stored table matches its checksum.
    bool ok() const noexcept {
        for (const auto& p : partitions)
            if (!p.checksums_ok) return false;
        return mismatch_count == 0;
    }
    nlohmann::json to_json() const;
};

struct ValidateOptions {
    IngestContext ctx;
    int ssd2_from_year = kDefaultSsd2FromYear;
    unsigned jobs = 1;
    std::size_t cap = 100;  ///< listed mismatches / removed ids per partition
};

/// Rebuilds the long format from core + rest and compares it cell by cell with
/// the sources after missing-token normalization and column renaming. Rows are
/// matched by source position; derived values are not compared. Checksum
/// failures are noted but do not stop the comparison.
ValidationReport round_trip_validate(const Store& store, const std::filesystem::path& input_root,
                                     const ValidateOptions& options = {});

}  // namespace chefs
