#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chefs/text.hpp"

namespace chefs {

enum class HazardCategory : std::uint8_t { ChemicalContaminants, PesticideResidues, VMPR };

inline constexpr std::array<HazardCategory, 3> kAllHazards{
    HazardCategory::ChemicalContaminants, HazardCategory::PesticideResidues, HazardCategory::VMPR};

/// Short code used in file names and store paths: CC, PEST, VMPR.
std::string_view hazard_code(HazardCategory h) noexcept;
std::string_view hazard_label(HazardCategory h) noexcept;
std::optional<HazardCategory> parse_hazard_code(std::string_view code) noexcept;
constexpr std::uint8_t hazard_bit(HazardCategory h) noexcept { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(h)); }

/// Evaluation code in canonical form: lowercased, trimmed, internal whitespace collapsed.
class EvaluationCode {
public:
    EvaluationCode() = default;
    explicit EvaluationCode(std::string_view raw) : text_(canonicalize_text(raw)) {}

    const std::string& text() const noexcept { return text_; }
    bool empty() const noexcept { return text_.empty(); }
    friend bool operator==(const EvaluationCode&, const EvaluationCode&) = default;

private:
    std::string text_;
};

enum class ComplianceClass : std::uint8_t { NonCompliant, Compliant, NotEvaluated, NotDetected, OtherKnown, Unknown };

inline constexpr std::array<ComplianceClass, 6> kAllComplianceClasses{
    ComplianceClass::NonCompliant, ComplianceClass::Compliant,  ComplianceClass::NotEvaluated,
    ComplianceClass::NotDetected,  ComplianceClass::OtherKnown, ComplianceClass::Unknown};

std::string_view to_string(ComplianceClass c) noexcept;
std::optional<ComplianceClass> parse_compliance_class(std::string_view s) noexcept;

/// Maps a canonical evaluation code onto its compliance class. Matching is on
/// the whole canonical string; "detected" is non-compliant, "not detected" is not.
ComplianceClass classify_evaluation(const EvaluationCode& code) noexcept;

/// The eleven evaluation codes that appear in the published corpus.
const std::vector<std::string>& known_evaluation_codes();

enum class SamplingStrategy : std::uint8_t { Objective, Selective, Suspect, Convenient, Other, NotSpecified };

inline constexpr std::array<SamplingStrategy, 6> kAllStrategies{
    SamplingStrategy::Objective,  SamplingStrategy::Selective, SamplingStrategy::Suspect,
    SamplingStrategy::Convenient, SamplingStrategy::Other,     SamplingStrategy::NotSpecified};

std::string_view to_string(SamplingStrategy s) noexcept;

struct StrategyParse {
    SamplingStrategy strategy = SamplingStrategy::NotSpecified;
    bool recognized = true;  ///< false when non-empty text did not match any known label
};
/// Accepts labels ("Objective sampling"), short forms ("objective") and SSD2
/// codes ("ST10A"), case- and whitespace-insensitively. Absent input is NotSpecified.
StrategyParse parse_strategy(const Field& raw);
std::optional<SamplingStrategy> strategy_from_label(std::string_view label) noexcept;

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
    friend bool operator==(const Date&, const Date&) = default;
};

/// Parses YYYY-MM-DD, optionally followed by a time part ("T..." or " ...").
std::optional<Date> parse_date(std::string_view text) noexcept;

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

/// Reported year wins; otherwise the year of the sampling date; otherwise
/// nullopt (undated). Throws Error(MalformedRow) for a year outside [1900, 2100].
std::optional<int> extract_year(const std::optional<Date>& sample_date, std::optional<int> reported_year);

/// Origin code used for analytics: absent, "XX" and "UNKNOWN" all become "UNKNOWN".
inline constexpr std::string_view kUnknownCountry = "UNKNOWN";
std::string normalize_origin(const Field& raw);

/// Sparse key -> value map, kept sorted by key.
using Extras = std::vector<std::pair<std::string, std::string>>;

struct Sample {
    std::string sample_id;
    std::string product_id;
    Field product_full_name;
    Field origin_country;
    std::string sampling_country;
    std::optional<int> sampling_year;
    Field sampling_date;
    Field strategy_text;
    SamplingStrategy strategy = SamplingStrategy::NotSpecified;
    std::uint8_t hazards = 0;        ///< bit set of hazard_bit()
    Extras extra;                    ///< remaining sample-level variables
    std::vector<std::string> derived;  ///< variables filled by linkage or derivation, not read from the source
};

struct AnalyticalResult {
    std::string result_id;
    std::string sample_id;
    std::string contaminant_id;
    Field contaminant_full_name;
    HazardCategory hazard = HazardCategory::ChemicalContaminants;
    Field result_value_text;
    std::optional<double> result_value;
    Field loq_text;
    std::optional<double> loq;
    Field eval_code_text;  ///< as reported
    EvaluationCode eval_code;
    Field analysis_date;
    Extras extra;
    std::vector<std::string> derived;
    std::string source_file;
    std::size_t source_row = 0;  ///< 1-based data row within the source file
};

}  // namespace chefs
