#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "chefs/ingest.hpp"
#include "chefs/store.hpp"

namespace chefs {

struct IngestOptions {
    std::filesystem::path input_root;
    std::filesystem::path store_root;
    IngestContext ctx;
    int ssd2_from_year = kDefaultSsd2FromYear;
    unsigned jobs = 1;
    bool overwrite = false;
    /// Input bytes buffered before a window of partitions is flushed.
    std::uintmax_t window_bytes = std::uintmax_t{512} << 20;
    std::size_t diagnostics_per_file = 20;
};

struct FileReport {
    FileManifestEntry entry;
    std::string sha256;
    IngestStats stats;
    std::uint64_t diagnostic_count = 0;
    std::vector<Diagnostic> diagnostics;  ///< first few only
};

struct IngestSummary {
    std::vector<FileReport> files;  ///< in relative-path order
    std::vector<SkippedFile> skipped;
    IngestStats totals;
    std::size_t partitions = 0;
    std::string store_checksum;

    nlohmann::json to_json() const;
};

/// discover -> resolve every header -> per window: ingest files in parallel,
/// deduplicate globally in (partition key, relative path, row) order, write the
/// window's partitions in parallel. Headers are resolved before anything is
/// written, so schema conflicts leave the store untouched.
IngestSummary run_ingest(const IngestOptions& options);

}  // namespace chefs
