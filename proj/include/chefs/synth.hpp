#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "chefs/catalog.hpp"
#include "chefs/model.hpp"
#include "chefs/report.hpp"

namespace chefs::synth {

/// Header layouts exercised by generated files.
///   canonical: canonical variable names
///   ssd2:      SSD2-style names (sampId, paramCode, resVal, ...), strategy as ST codes
///   legacy:    older names (labSampCode/sampleId, parameterCode, resultValue, ...)
///   sparse:    no sample code, origin or year columns; samples keyed by tuple
enum class Variant : std::uint8_t { Canonical, Ssd2, Legacy, Sparse };
std::string_view to_string(Variant v) noexcept;
std::optional<Variant> parse_variant(std::string_view s) noexcept;

struct FilePlan {
    HazardCategory hazard = HazardCategory::ChemicalContaminants;
    std::string country;
    int year = 2018;
    std::size_t rows = 0;  ///< data rows written, duplicates and malformed rows included
    Variant variant = Variant::Canonical;
    bool full_names = true;
    bool gzip = false;
    std::string suffix;  ///< optional file-name suffix, for several files per partition
};

/// Samples planted for one (origin -> destination) trade link. They are added
/// to the file of (hazard, destination, year), which is created if missing.
struct TradePair {
    std::string origin;
    std::string destination;
    HazardCategory hazard = HazardCategory::PesticideResidues;
    int year = 2018;
    std::size_t samples = 0;
    std::size_t noncompliant = 0;
};

struct Pools {
    std::vector<CatalogueTerm> contaminants;
    std::vector<HazardCategory> contaminant_hazards;  ///< parallel to contaminants
    std::vector<CatalogueTerm> products_ssd1;
    std::vector<CatalogueTerm> products_ssd2;
    std::vector<std::string> origins;

    static Pools builtin();
};

struct CorpusPlan {
    std::uint64_t seed = 1;
    std::vector<FilePlan> files;
    double duplicate_rate = 0.0;
    double noncompliance_rate = 0.01;
    double unknown_origin_rate = 0.1;
    double malformed_rate = 0.0;
    double undated_rate = 0.0;
    int max_results_per_sample = 6;
    std::vector<TradePair> trade_plan;
    Pools pools = Pools::builtin();

    /// Plan JSON: {"seed", "files" | "auto": {"files", "rows"}, rates..., "trade_plan", "pools"}.
    static CorpusPlan from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// Throws Error(InvalidConfig) for rates outside [0, 1] and similar.
    void validate() const;

    /// About `files` files over mixed hazards, countries, years and variants,
    /// `rows` rows in total.
    static CorpusPlan desk_scale(std::uint64_t seed, std::size_t files = 50, std::size_t rows = 1'000'000);
};

// Truth records --------------------------------------------------------------

struct TruthSample {
    std::string product_id;
    std::optional<std::string> product_full_name;
    std::string origin;  ///< normalized; UNKNOWN for absent, XX and UNKNOWN
    std::string sampling_country;
    int year = 0;  ///< 0 when undated
    SamplingStrategy strategy = SamplingStrategy::NotSpecified;
};

struct TruthResult {
    std::size_t sample = 0;  ///< index into Truth::samples
    std::string contaminant_id;
    std::optional<std::string> contaminant_full_name;
    std::string eval_code;  ///< canonical text
    HazardCategory hazard = HazardCategory::ChemicalContaminants;
};

struct TruthFile {
    std::string relative_path;
    HazardCategory hazard = HazardCategory::ChemicalContaminants;
    std::string country;
    int year = 0;
    std::uint64_t rows_read = 0;
    std::uint64_t rows_malformed = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t results = 0;
    std::map<std::string, std::uint64_t> non_empty_cells;  ///< canonical variable -> count
};

/// Deduplicated samples and results of a corpus plus per-file bookkeeping.
struct Truth {
    std::vector<TruthSample> samples;
    std::vector<TruthResult> results;
    std::vector<TruthFile> files;  ///< relative-path order
};

struct Corpus {
    Truth truth;
    nlohmann::json ledger;
};

/// Writes <out>/data/*.csv[.gz], <out>/catalogues/*.csv, <out>/plan.json and
/// <out>/ledger.json. Generation is single-threaded; the same plan yields
/// byte-identical output.
Corpus generate_corpus(const CorpusPlan& plan, const std::filesystem::path& out);

/// Straightforward recomputation of every report from truth records: plain
/// maps, no interning, no parallelism. Shares only report names and parameter
/// names with the analytics module.
std::vector<AggregateReport> naive_reports(const Truth& truth, const std::vector<ReportRequest>& requests,
                                           std::string_view grouping_dictionary_csv);
AggregateReport naive_report(const Truth& truth, const ReportRequest& request, std::string_view grouping_dictionary_csv);

/// Independent reading of a corpus directory: own CSV parsing, header mapping,
/// missing-token handling, sample keys and duplicate detection. Catalogues are
/// read from <root>/catalogues when present, else the shipped ones.
Truth oracle_parse(const std::filesystem::path& corpus_root);

/// Data directory of a corpus: <root>/data when it exists, else root.
std::filesystem::path corpus_data_dir(const std::filesystem::path& corpus_root);

}  // namespace chefs::synth
