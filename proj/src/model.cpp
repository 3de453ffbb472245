#include "chefs/model.hpp"

#include <unordered_map>

#include "chefs/error.hpp"

namespace chefs {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Io: return "Io";
        case ErrorCode::MalformedFile: return "MalformedFile";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::MalformedPath: return "MalformedPath";
        case ErrorCode::DuplicateTerm: return "DuplicateTerm";
        case ErrorCode::SchemaConflict: return "SchemaConflict";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidPartition: return "InvalidPartition";
        case ErrorCode::UnknownSelection: return "UnknownSelection";
        case ErrorCode::UnknownReport: return "UnknownReport";
    }
    return "Unknown";
}

std::string_view hazard_code(HazardCategory h) noexcept {
    switch (h) {
        case HazardCategory::ChemicalContaminants: return "CC";
        case HazardCategory::PesticideResidues: return "PEST";
        case HazardCategory::VMPR: return "VMPR";
    }
    return "CC";
}

std::string_view hazard_label(HazardCategory h) noexcept {
    switch (h) {
        case HazardCategory::ChemicalContaminants: return "chemical contaminants";
        case HazardCategory::PesticideResidues: return "pesticide residues";
        case HazardCategory::VMPR: return "veterinary medicinal product residues";
    }
    return "";
}

std::optional<HazardCategory> parse_hazard_code(std::string_view code) noexcept {
    code = trim(code);
    if (iequals(code, "CC")) return HazardCategory::ChemicalContaminants;
    if (iequals(code, "PEST")) return HazardCategory::PesticideResidues;
    if (iequals(code, "VMPR")) return HazardCategory::VMPR;
    return std::nullopt;
}

std::string_view to_string(ComplianceClass c) noexcept {
    switch (c) {
        case ComplianceClass::NonCompliant: return "NonCompliant";
        case ComplianceClass::Compliant: return "Compliant";
        case ComplianceClass::NotEvaluated: return "NotEvaluated";
        case ComplianceClass::NotDetected: return "NotDetected";
        case ComplianceClass::OtherKnown: return "OtherKnown";
        case ComplianceClass::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::optional<ComplianceClass> parse_compliance_class(std::string_view s) noexcept {
    for (auto c : kAllComplianceClasses)
        if (iequals(s, to_string(c))) return c;
    return std::nullopt;
}

namespace {
const std::unordered_map<std::string, ComplianceClass>& evaluation_table() {
    static const std::unordered_map<std::string, ComplianceClass> table{
        {"greater than max permissible quantities", ComplianceClass::NonCompliant},
        {"greater than maximum permissible quantities", ComplianceClass::NonCompliant},
        {"non-compliant", ComplianceClass::NonCompliant},
        {"detected", ComplianceClass::NonCompliant},
        {"unsatisfactory", ComplianceClass::NonCompliant},
        {"less than or equal to max permissible quantities", ComplianceClass::Compliant},
        {"less than or equal to maximum permissible quantities", ComplianceClass::Compliant},
        {"compliant", ComplianceClass::Compliant},
        {"compliant due to measurement uncertainty", ComplianceClass::Compliant},
        {"result not evaluated", ComplianceClass::NotEvaluated},
        {"not detected", ComplianceClass::NotDetected},
        {"acceptable", ComplianceClass::OtherKnown},
        {"satisfactory", ComplianceClass::OtherKnown},
    };
    return table;
}
}  // namespace

ComplianceClass classify_evaluation(const EvaluationCode& code) noexcept {
    const auto& table = evaluation_table();
    const auto it = table.find(code.text());
    return it == table.end() ? ComplianceClass::Unknown : it->second;
}

const std::vector<std::string>& known_evaluation_codes() {
    static const std::vector<std::string> codes{
        "Less than or equal to max permissible quantities",
        "Result not evaluated",
        "Not detected",
        "Compliant",
        "Compliant due to measurement uncertainty",
        "Greater than max permissible quantities",
        "Detected",
        "Acceptable",
        "Satisfactory",
        "Non-compliant",
        "Unsatisfactory",
    };
    return codes;
}

std::string_view to_string(SamplingStrategy s) noexcept {
    switch (s) {
        case SamplingStrategy::Objective: return "objective sampling";
        case SamplingStrategy::Selective: return "selective sampling";
        case SamplingStrategy::Suspect: return "suspect sampling";
        case SamplingStrategy::Convenient: return "convenient sampling";
        case SamplingStrategy::Other: return "other";
        case SamplingStrategy::NotSpecified: return "not specified";
    }
    return "not specified";
}

std::optional<SamplingStrategy> strategy_from_label(std::string_view label) noexcept {
    for (auto s : kAllStrategies)
        if (label == to_string(s)) return s;
    return std::nullopt;
}

StrategyParse parse_strategy(const Field& raw) {
    if (!raw) return {};
    static const std::unordered_map<std::string, SamplingStrategy> table{
        {"objective sampling", SamplingStrategy::Objective},   {"objective", SamplingStrategy::Objective},
        {"st10a", SamplingStrategy::Objective},                {"selective sampling", SamplingStrategy::Selective},
        {"selective", SamplingStrategy::Selective},            {"st20a", SamplingStrategy::Selective},
        {"suspect sampling", SamplingStrategy::Suspect},       {"suspect", SamplingStrategy::Suspect},
        {"st30a", SamplingStrategy::Suspect},                  {"convenient sampling", SamplingStrategy::Convenient},
        {"convenient", SamplingStrategy::Convenient},          {"st40a", SamplingStrategy::Convenient},
        {"census", SamplingStrategy::Other},                   {"st50a", SamplingStrategy::Other},
        {"other", SamplingStrategy::Other},                    {"st90a", SamplingStrategy::Other},
        {"not specified", SamplingStrategy::NotSpecified},     {"st00a", SamplingStrategy::NotSpecified},
    };
    const auto key = canonicalize_text(*raw);
    if (key.empty()) return {};
    const auto it = table.find(key);
    if (it == table.end()) return {SamplingStrategy::NotSpecified, false};
    return {it->second, true};
}

std::optional<Date> parse_date(std::string_view text) noexcept {
    text = trim(text);
    if (text.size() < 10) return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    if (text[4] != '-' || text[7] != '-') return std::nullopt;
    const auto y = parse_integer(text.substr(0, 4));
    const auto m = parse_integer(text.substr(5, 2));
    const auto d = parse_integer(text.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    if (*m < 1 || *m > 12 || *d < 1) return std::nullopt;
    static constexpr int days[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (*d > days[*m - 1]) return std::nullopt;
    const bool leap = (*y % 4 == 0 && *y % 100 != 0) || *y % 400 == 0;
    if (*m == 2 && *d == 29 && !leap) return std::nullopt;
    return Date{static_cast<int>(*y), static_cast<int>(*m), static_cast<int>(*d)};
}

std::optional<int> extract_year(const std::optional<Date>& sample_date, std::optional<int> reported_year) {
    std::optional<int> year = reported_year;
    if (!year && sample_date) year = sample_date->year;
    if (year && (*year < kMinYear || *year > kMaxYear))
        throw Error(ErrorCode::MalformedRow, "year " + std::to_string(*year) + " outside [1900, 2100]");
    return year;
}

std::string normalize_origin(const Field& raw) {
    if (!raw) return std::string(kUnknownCountry);
    const auto t = trim(*raw);
    if (t.empty() || iequals(t, "XX") || iequals(t, "UNKNOWN")) return std::string(kUnknownCountry);
    return std::string(t);
}

}  // namespace chefs
