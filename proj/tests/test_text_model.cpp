#include <random>

#include <gtest/gtest.h>

#include "chefs/error.hpp"
#include "chefs/model.hpp"
#include "chefs/report.hpp"
#include "chefs/text.hpp"

namespace chefs {
namespace {

TEST(Text, CanonicalizeTrimsCollapsesAndLowercases) {
    EXPECT_EQ(canonicalize_text("  Non-Compliant \t\t Result \n"), "non-compliant result");
    EXPECT_EQ(canonicalize_text(""), "");
    EXPECT_EQ(canonicalize_text("   "), "");
}

TEST(Text, MissingTokens) {
    for (const char* s : {"", "  ", "NA", "na", " N/A ", "n/a", "NULL", "null"}) EXPECT_TRUE(is_missing_token(s)) << s;
    for (const char* s : {"0", "N", "NAN", "none", "-"}) EXPECT_FALSE(is_missing_token(s)) << s;
    EXPECT_FALSE(normalize_cell(" NA ").has_value());
    EXPECT_EQ(normalize_cell(" x "), " x ");
}

TEST(Text, StrictNumberParsing) {
    EXPECT_EQ(parse_integer(" 2017 "), 2017);
    EXPECT_FALSE(parse_integer("20l7"));
    EXPECT_FALSE(parse_integer("2017.0"));
    EXPECT_FALSE(parse_integer(""));
    EXPECT_DOUBLE_EQ(*parse_decimal("0.015"), 0.015);
    EXPECT_FALSE(parse_decimal("<LOQ"));
}

TEST(Text, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 2.5e-7, 0.0, 123456.789}) EXPECT_EQ(std::stod(format_double(v)), v);
}

// The eleven codes of the evaluation table.
const std::vector<std::pair<std::string, ComplianceClass>> kTableCodes{
    {"Less than or equal to max permissible quantities", ComplianceClass::Compliant},
    {"Result not evaluated", ComplianceClass::NotEvaluated},
    {"Not detected", ComplianceClass::NotDetected},
    {"Compliant", ComplianceClass::Compliant},
    {"Compliant due to measurement uncertainty", ComplianceClass::Compliant},
    {"Greater than max permissible quantities", ComplianceClass::NonCompliant},
    {"Detected", ComplianceClass::NonCompliant},
    {"Acceptable", ComplianceClass::OtherKnown},
    {"Satisfactory", ComplianceClass::OtherKnown},
    {"Non-compliant", ComplianceClass::NonCompliant},
    {"Unsatisfactory", ComplianceClass::NonCompliant},
};

TEST(Classification, TableCodesPartition) {
    std::map<ComplianceClass, int> counts;
    for (const auto& [code, expected] : kTableCodes) {
        EXPECT_EQ(classify_evaluation(EvaluationCode(code)), expected) << code;
        ++counts[classify_evaluation(EvaluationCode(code))];
    }
    EXPECT_EQ(counts[ComplianceClass::NonCompliant], 4);
    EXPECT_EQ(counts[ComplianceClass::Compliant], 3);
    EXPECT_EQ(counts[ComplianceClass::NotEvaluated], 1);
    EXPECT_EQ(counts[ComplianceClass::NotDetected], 1);
    EXPECT_EQ(counts[ComplianceClass::OtherKnown], 2);
}

TEST(Classification, LongFormSpellingsOfTheNonCompliantCodes) {
    for (const char* s : {"Greater Than Maximum Permissible Quantities", "Non-Compliant", "Detected", "Unsatisfactory"})
        EXPECT_EQ(classify_evaluation(EvaluationCode(s)), ComplianceClass::NonCompliant) << s;
    EXPECT_EQ(classify_evaluation(EvaluationCode("Not detected")), ComplianceClass::NotDetected);
    EXPECT_EQ(classify_evaluation(EvaluationCode("pending")), ComplianceClass::Unknown);
    EXPECT_EQ(classify_evaluation(EvaluationCode("")), ComplianceClass::Unknown);
}

TEST(Classification, TableCountsGiveHeadlineNonComplianceShare) {
    // per-code result counts of the evaluation table
    const std::vector<std::pair<std::string, long long>> rows{
        {"Less than or equal to max permissible quantities", 270'592'813},
        {"Result not evaluated", 94'197'203},
        {"Not detected", 25'580'634},
        {"Compliant", 1'445'071},
        {"Compliant due to measurement uncertainty", 351'142},
        {"Greater than max permissible quantities", 59'549},
        {"Detected", 35'274},
        {"Acceptable", 3'230},
        {"Satisfactory", 2'564},
        {"Non-compliant", 2'401},
        {"Unsatisfactory", 30},
    };
    long long total = 0, nc = 0;
    for (const auto& [code, n] : rows) {
        total += n;
        if (classify_evaluation(EvaluationCode(code)) == ComplianceClass::NonCompliant) nc += n;
    }
    EXPECT_EQ(total, 392'269'911);
    EXPECT_EQ(nc, 97'254);
    EXPECT_EQ(format_percent(static_cast<double>(nc) / static_cast<double>(total)), "0.02%");
    EXPECT_NEAR(100.0 * static_cast<double>(nc) / static_cast<double>(total), 0.025, 0.0005);
}

std::string scramble(const std::string& s, std::mt19937_64& rng) {
    std::string out(rng() % 3, ' ');
    for (char c : s) {
        if (c == ' ') {
            out.append(1 + rng() % 3, rng() % 2 ? ' ' : '\t');
            continue;
        }
        out += rng() % 2 ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    }
    out.append(rng() % 3, rng() % 2 ? ' ' : '\t');
    return out;
}

TEST(Classification, CasingAndWhitespaceNeverChangeTheClass) {
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < 20000; ++i) {
        const auto& [code, expected] = kTableCodes[rng() % kTableCodes.size()];
        const auto noisy = scramble(code, rng);
        ASSERT_EQ(classify_evaluation(EvaluationCode(noisy)), expected) << "'" << noisy << "'";
    }
}

TEST(Classification, CanonicalFormIsIdempotent) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 5000; ++i) {
        const auto noisy = scramble(kTableCodes[rng() % kTableCodes.size()].first, rng);
        const EvaluationCode once(noisy);
        const EvaluationCode twice(once.text());
        ASSERT_EQ(once.text(), twice.text());
        ASSERT_EQ(classify_evaluation(once), classify_evaluation(twice));
    }
}

TEST(Strategy, LabelsCodesAndShortForms) {
    EXPECT_EQ(parse_strategy(std::string("Objective sampling")).strategy, SamplingStrategy::Objective);
    EXPECT_EQ(parse_strategy(std::string("ST20A")).strategy, SamplingStrategy::Selective);
    EXPECT_EQ(parse_strategy(std::string(" suspect ")).strategy, SamplingStrategy::Suspect);
    const auto odd = parse_strategy(std::string("random pick"));
    EXPECT_EQ(odd.strategy, SamplingStrategy::NotSpecified);
    EXPECT_FALSE(odd.recognized);
    EXPECT_TRUE(parse_strategy(std::nullopt).recognized);
}

TEST(Dates, ParseAndYearExtraction) {
    EXPECT_EQ(parse_date("2019-02-28"), (Date{2019, 2, 28}));
    EXPECT_EQ(parse_date("2019-02-28T10:00:00"), (Date{2019, 2, 28}));
    EXPECT_FALSE(parse_date("2019-02-29"));
    EXPECT_FALSE(parse_date("28/02/2019"));
    EXPECT_EQ(extract_year(Date{2019, 1, 1}, std::nullopt), 2019);
    EXPECT_EQ(extract_year(Date{2019, 1, 1}, 2018), 2018);
    EXPECT_FALSE(extract_year(std::nullopt, std::nullopt));
    EXPECT_THROW(extract_year(std::nullopt, 1850), Error);
}

TEST(Origin, UnknownVariantsFold) {
    EXPECT_EQ(normalize_origin(std::nullopt), "UNKNOWN");
    EXPECT_EQ(normalize_origin(std::string(" xx ")), "UNKNOWN");
    EXPECT_EQ(normalize_origin(std::string("Unknown")), "UNKNOWN");
    EXPECT_EQ(normalize_origin(std::string(" CN")), "CN");
}

TEST(Hazard, Codes) {
    for (auto h : kAllHazards) EXPECT_EQ(parse_hazard_code(hazard_code(h)), h);
    EXPECT_EQ(parse_hazard_code("pest"), HazardCategory::PesticideResidues);
    EXPECT_FALSE(parse_hazard_code("ZZ"));
}

}  // namespace
}  // namespace chefs
