#include "chefs/pipeline.hpp"

#include <algorithm>
#include <unordered_map>

#include "chefs/error.hpp"
#include "chefs/hash.hpp"
#include "chefs/log.hpp"
#include "chefs/parallel.hpp"

namespace fs = std::filesystem;

namespace chefs {

namespace {

struct FileBatch {
    std::vector<Sample> samples;
    std::vector<AnalyticalResult> results;
};

struct Group {
    PartitionKey key;
    std::vector<std::size_t> files;  ///< indexes into the sorted entry list
    std::uintmax_t bytes = 0;
};

void prepare_store(const IngestOptions& opt) {
    std::error_code ec;
    if (!directory_is_empty(opt.store_root)) {
        if (!opt.overwrite)
            throw Error(ErrorCode::InvalidConfig,
                        "store directory " + opt.store_root.string() + " is not empty; pass --overwrite to replace it");
        if (!fs::exists(opt.store_root / kStoreFile))
            throw Error(ErrorCode::InvalidConfig,
                        "refusing to overwrite " + opt.store_root.string() + ": it does not look like a store");
        for (fs::directory_iterator it(opt.store_root, ec), end; !ec && it != end; it.increment(ec))
            fs::remove_all(it->path());
    }
    fs::create_directories(opt.store_root, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create store " + opt.store_root.string() + ": " + ec.message());
}

}  // namespace

IngestSummary run_ingest(const IngestOptions& opt) {
    auto discovery = discover_files(opt.input_root, opt.ssd2_from_year);
    auto& entries = discovery.entries;
    // canonical order: partition key, then relative path
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.key() < b.key(); });
    for (const auto& s : discovery.skipped)
        log::warn("file_skipped", {{"file", s.relative_path}, {"reason", s.reason}});

    std::vector<ColumnMapping> mappings(entries.size());
    parallel_for(entries.size(), opt.jobs, [&](std::size_t i) { mappings[i] = read_mapping(entries[i], opt.ctx); });

    prepare_store(opt);

    std::vector<Group> groups;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (groups.empty() || !(groups.back().key == entries[i].key())) groups.push_back({entries[i].key(), {}, 0});
        groups.back().files.push_back(i);
        groups.back().bytes += entries[i].size_bytes;
    }

    IngestSummary summary;
    summary.skipped = discovery.skipped;
    summary.files.resize(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) summary.files[i].entry = entries[i];

    Deduplicator dedup;
    std::size_t g = 0;
    while (g < groups.size()) {
        std::size_t g_end = g;
        std::uintmax_t bytes = 0;
        while (g_end < groups.size() && (g_end == g || bytes + groups[g_end].bytes <= opt.window_bytes))
            bytes += groups[g_end++].bytes;
        const std::size_t f_begin = groups[g].files.front();
        const std::size_t f_end = groups[g_end - 1].files.back() + 1;

        std::vector<FileBatch> batches(f_end - f_begin);
        parallel_for(f_end - f_begin, opt.jobs, [&](std::size_t k) {
            const std::size_t i = f_begin + k;
            auto& report = summary.files[i];
            auto& batch = batches[k];
            RowSink sink;
            sink.on_sample = [&](Sample&& s) { batch.samples.push_back(std::move(s)); };
            sink.on_result = [&](AnalyticalResult&& r) { batch.results.push_back(std::move(r)); };
            sink.on_diagnostic = [&](const Diagnostic& d) {
                if (report.diagnostics.size() < opt.diagnostics_per_file) report.diagnostics.push_back(d);
                ++report.diagnostic_count;
            };
            report.stats = ingest_file(entries[i], mappings[i], opt.ctx, sink);
            report.sha256 = sha256_file_hex(entries[i].path);
        });

        std::vector<PartitionData> parts(g_end - g);
        std::vector<std::vector<SourceRecord>> part_sources(g_end - g);
        for (std::size_t gi = g; gi < g_end; ++gi) {
            auto& part = parts[gi - g];
            part.key = groups[gi].key;
            std::unordered_map<std::string, std::size_t> sample_index;
            for (const std::size_t i : groups[gi].files) {
                auto& batch = batches[i - f_begin];
                auto& stats = summary.files[i].stats;
                std::unordered_map<std::string_view, const Sample*> file_samples;
                for (const auto& s : batch.samples) file_samples.emplace(s.sample_id, &s);
                for (auto& r : batch.results) {
                    if (!dedup.admit(r.result_id)) {
                        ++stats.duplicates_removed;
                        continue;
                    }
                    ++stats.results_emitted;
                    auto [it, inserted] = sample_index.try_emplace(r.sample_id, part.samples.size());
                    if (inserted) {
                        part.samples.push_back(*file_samples.at(r.sample_id));
                        ++stats.samples_emitted;
                    } else {
                        part.samples[it->second].hazards |= hazard_bit(r.hazard);
                    }
                    part.results.push_back(std::move(r));
                }
                batch = {};
                part_sources[gi - g].push_back({entries[i].relative_path, summary.files[i].sha256, entries[i].era, stats});
            }
        }
        parallel_for(parts.size(), opt.jobs, [&](std::size_t k) {
            write_partition(opt.store_root, parts[k], std::move(part_sources[k]), *opt.ctx.schema);
            parts[k] = {};
        });
        log::debug("window_written", {{"partitions", g_end - g}, {"files", f_end - f_begin}});
        g = g_end;
    }

    for (const auto& f : summary.files) summary.totals.accumulate(f.stats);
    summary.partitions = groups.size();
    // relative-path order for reporting
    std::sort(summary.files.begin(), summary.files.end(),
              [](const auto& a, const auto& b) { return a.entry.relative_path < b.entry.relative_path; });

    const Store store(opt.store_root);
    summary.store_checksum = store.checksum();
    nlohmann::json totals = summary.totals.to_json();
    totals.erase("missing_rate_per_variable");
    write_store_summary(opt.store_root, store, {{"totals", totals}});
    return summary;
}

nlohmann::json IngestSummary::to_json() const {
    nlohmann::json j;
    j["partitions"] = partitions;
    j["store_checksum"] = store_checksum;
    j["totals"] = totals.to_json();
    auto& files_json = j["files"] = nlohmann::json::array();
    for (const auto& f : files) {
        nlohmann::json diags = nlohmann::json::array();
        for (const auto& d : f.diagnostics)
            diags.push_back({{"row", d.row}, {"kind", d.kind}, {"message", d.message}});
        files_json.push_back({{"file", f.entry.relative_path},
                              {"hazard", hazard_code(f.entry.hazard)},
                              {"country", f.entry.country},
                              {"year", f.entry.year},
                              {"era", to_string(f.entry.era)},
                              {"sha256", f.sha256},
                              {"stats", f.stats.to_json()},
                              {"diagnostic_count", f.diagnostic_count},
                              {"diagnostics", std::move(diags)}});
    }
    auto& skipped_json = j["skipped"] = nlohmann::json::array();
    for (const auto& s : skipped) skipped_json.push_back({{"file", s.relative_path}, {"reason", s.reason}});
    return j;
}

}  // namespace chefs
