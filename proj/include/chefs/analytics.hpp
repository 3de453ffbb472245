#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chefs/catalog.hpp"
#include "chefs/model.hpp"
#include "chefs/report.hpp"
#include "chefs/store.hpp"

namespace chefs {

/// Compact, interned in-memory view of the valid partitions of a store. A
/// sample's attributes come from the first partition (in key order) that holds
/// it; its hazard set is the union over partitions.
class Dataset {
public:
    static constexpr std::uint32_t kNone = 0xffffffffu;

    struct SampleRow {
        std::uint32_t product = kNone;
        std::uint32_t origin = kNone;            ///< country index, UNKNOWN folded in
        std::uint32_t sampling_country = kNone;  ///< country index
        int year = 0;                            ///< 0 when undated
        SamplingStrategy strategy = SamplingStrategy::NotSpecified;
        std::uint8_t hazards = 0;
    };
    struct ResultRow {
        std::uint32_t sample = 0;
        std::uint32_t contaminant = 0;
        std::uint32_t eval_code = 0;  ///< index into eval_codes()
        HazardCategory hazard = HazardCategory::ChemicalContaminants;
        ComplianceClass compliance = ComplianceClass::Unknown;
    };
    struct Term {
        std::string id;
        std::optional<std::string> full_name;  ///< lexicographically smallest observed
    };

    static Dataset load(const Store& store, unsigned jobs = 1);

    const std::vector<SampleRow>& samples() const noexcept { return samples_; }
    const std::vector<ResultRow>& results() const noexcept { return results_; }
    const std::vector<Term>& products() const noexcept { return products_; }
    const std::vector<Term>& contaminants() const noexcept { return contaminants_; }
    const std::vector<std::string>& countries() const noexcept { return countries_; }
    const std::vector<std::string>& eval_codes() const noexcept { return eval_codes_; }
    const std::vector<PartitionManifest>& manifests() const noexcept { return manifests_; }
    const std::string& store_checksum() const noexcept { return store_checksum_; }

private:
    std::vector<SampleRow> samples_;
    std::vector<ResultRow> results_;
    std::vector<Term> products_;
    std::vector<Term> contaminants_;
    std::vector<std::string> countries_;
    std::vector<std::string> eval_codes_;
    std::vector<PartitionManifest> manifests_;
    std::string store_checksum_;
};

struct AnalyticsContext {
    const GroupingDictionary* dictionary = &GroupingDictionary::builtin();
    unsigned jobs = 1;
};

/// Every report name, in the order `report all` emits them.
const std::vector<std::string>& report_names();

/// One request per report with default parameters.
std::vector<ReportRequest> standard_report_requests();

/// Runs one named report. Unknown names throw Error(UnknownReport); bad
/// parameters throw Error(InvalidConfig). The returned params are normalized
/// (defaults filled in).
AggregateReport run_report(const Dataset& data, const ReportRequest& request, const AnalyticsContext& ctx = {});

/// Display name of a term: last path segment, else the full name, else the id.
std::string short_name(const std::string& id, const std::optional<std::string>& full_name);

}  // namespace chefs
