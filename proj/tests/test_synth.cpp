#include <gtest/gtest.h>

#include "chefs/analytics.hpp"
#include "chefs/csv.hpp"
#include "chefs/embedded.hpp"
#include "chefs/error.hpp"
#include "chefs/synth.hpp"
#include "test_util.hpp"

namespace chefs::synth {
namespace {

namespace fs = std::filesystem;
using test::TempDir;

CorpusPlan small_plan(std::uint64_t seed) {
    auto plan = CorpusPlan::desk_scale(seed, 18, 6000);
    plan.trade_plan = {{"KH", "CZ", HazardCategory::PesticideResidues, 2021, 30, 12}};
    return plan;
}

using ResultKey = std::tuple<std::string, std::optional<std::string>, std::string, std::string, int, int, std::string,
                             std::optional<std::string>, std::string, int>;

std::vector<ResultKey> result_keys(const Truth& t) {
    std::vector<ResultKey> out;
    for (const auto& r : t.results) {
        const auto& s = t.samples[r.sample];
        out.emplace_back(s.product_id, s.product_full_name, s.origin, s.sampling_country, s.year,
                         static_cast<int>(s.strategy), r.contaminant_id, r.contaminant_full_name, r.eval_code,
                         static_cast<int>(r.hazard));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::map<std::string, std::string> slurp_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_text_file(e.path());
    return files;
}

TEST(Plan, JsonRoundTrip) {
    const auto plan = small_plan(3);
    const auto again = CorpusPlan::from_json(plan.to_json());
    EXPECT_EQ(again.to_json().dump(), plan.to_json().dump());
    const auto autop = CorpusPlan::from_json({{"seed", 9}, {"auto", {{"files", 5}, {"rows", 700}}}});
    ASSERT_EQ(autop.files.size(), 5u);
    std::size_t rows = 0;
    for (const auto& f : autop.files) rows += f.rows;
    EXPECT_EQ(rows, 700u);
}

TEST(Plan, ValidationRejectsBadPlans) {
    auto expect_invalid = [](const CorpusPlan& p) {
        try {
            p.validate();
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
        }
    };
    auto p = small_plan(1);
    p.duplicate_rate = 1.5;
    expect_invalid(p);
    p = small_plan(1);
    p.duplicate_rate = 0.6;
    p.malformed_rate = 0.6;
    expect_invalid(p);
    p = small_plan(1);
    p.max_results_per_sample = 0;
    expect_invalid(p);
    p = small_plan(1);
    p.max_results_per_sample = 500;
    expect_invalid(p);
    p = small_plan(1);
    p.files[0].country = "nl";
    expect_invalid(p);
    p = small_plan(1);
    p.files.push_back(p.files[0]);
    expect_invalid(p);
    p = small_plan(1);
    p.trade_plan[0].noncompliant = 31;
    expect_invalid(p);
    p = small_plan(1);
    p.trade_plan[0].origin = "CZ";
    expect_invalid(p);
    EXPECT_THROW(CorpusPlan::from_json({{"seed", "x"}}), Error);
}

TEST(Generate, SameSeedSameBytes) {
    TempDir a, b;
    generate_corpus(small_plan(11), a.path());
    generate_corpus(small_plan(11), b.path());
    EXPECT_EQ(slurp_tree(a.path()), slurp_tree(b.path()));
    TempDir c;
    generate_corpus(small_plan(12), c.path());
    EXPECT_NE(slurp_tree(a.path()), slurp_tree(c.path()));
}

TEST(Generate, LedgerIsConsistentWithPlan) {
    TempDir dir;
    const auto plan = small_plan(5);
    const auto corpus = generate_corpus(plan, dir.path());
    const auto ledger = nlohmann::json::parse(read_text_file(dir / "ledger.json"));
    EXPECT_EQ(ledger, corpus.ledger);
    std::uint64_t planned = 0;
    for (const auto& f : plan.files) planned += f.rows;
    const auto& totals = ledger.at("totals");
    EXPECT_GE(totals.at("rows_read").get<std::uint64_t>(), planned);
    EXPECT_EQ(totals.at("rows_read").get<std::uint64_t>(),
              totals.at("rows_malformed").get<std::uint64_t>() + totals.at("duplicates_removed").get<std::uint64_t>() +
                  totals.at("results_emitted").get<std::uint64_t>());
    EXPECT_EQ(totals.at("results_emitted").get<std::size_t>(), corpus.truth.results.size());
    EXPECT_EQ(ledger.at("reports").size(), report_names().size());
    EXPECT_TRUE(fs::exists(dir / "plan.json"));
    EXPECT_TRUE(fs::exists(dir / "catalogues/param.csv"));
    EXPECT_EQ(CorpusPlan::from_json(nlohmann::json::parse(read_text_file(dir / "plan.json"))).to_json(), plan.to_json());
}

TEST(Generate, DuplicateAndMalformedCountsFollowRates) {
    TempDir dir;
    CorpusPlan plan;
    plan.seed = 4;
    plan.duplicate_rate = 0.2;
    plan.malformed_rate = 0.01;
    plan.files = {{HazardCategory::VMPR, "PL", 2016, 1000, Variant::Ssd2, true, false, ""},
                  {HazardCategory::ChemicalContaminants, "PT", 2003, 100, Variant::Legacy, false, true, ""}};
    plan.noncompliance_rate = 0.0;
    plan.duplicate_rate = 0.2;
    const auto corpus = generate_corpus(plan, dir.path());
    ASSERT_EQ(corpus.truth.files.size(), 2u);
    const auto& pl = corpus.truth.files[1];
    EXPECT_EQ(pl.relative_path, "VMPR_PL_2016.csv");
    EXPECT_EQ(pl.rows_read, 1000u);
    EXPECT_EQ(pl.duplicates, 200u);
    EXPECT_EQ(pl.rows_malformed, 10u);
    EXPECT_EQ(pl.results, 790u);
    EXPECT_TRUE(fs::exists(dir / "data/CC_PT_2003.csv.gz"));
    EXPECT_EQ(corpus.ledger.at("totals").at("noncompliant_results"), 0);
}

TEST(Generate, NoNoiseFileKeepsEveryRow) {
    TempDir dir;
    CorpusPlan plan;
    plan.files = {{HazardCategory::PesticideResidues, "FR", 2020, 100, Variant::Canonical, true, false, ""}};
    plan.noncompliance_rate = 0.0;
    const auto corpus = generate_corpus(plan, dir.path());
    EXPECT_EQ(corpus.truth.results.size(), 100u);
    EXPECT_EQ(corpus.ledger.at("totals").at("noncompliant_results"), 0);
}

TEST(Generate, TradePairsLandInDestinationFile) {
    TempDir dir;
    const auto corpus = generate_corpus(small_plan(8), dir.path());
    std::size_t kh = 0, nc_samples = 0;
    std::vector<std::uint8_t> nc(corpus.truth.samples.size(), 0);
    for (const auto& r : corpus.truth.results)
        if (classify_evaluation(EvaluationCode(r.eval_code)) == ComplianceClass::NonCompliant) nc[r.sample] = 1;
    for (std::size_t i = 0; i < corpus.truth.samples.size(); ++i) {
        const auto& s = corpus.truth.samples[i];
        if (s.origin != "KH") continue;
        EXPECT_EQ(s.sampling_country, "CZ");
        EXPECT_EQ(s.year, 2021);
        ++kh;
        nc_samples += nc[i];
    }
    EXPECT_EQ(kh, 30u);
    EXPECT_EQ(nc_samples, 12u);
}

TEST(Oracle, IndependentParseMatchesTruth) {
    TempDir dir;
    const auto corpus = generate_corpus(small_plan(21), dir.path());
    const auto parsed = oracle_parse(dir.path());
    EXPECT_EQ(parsed.samples.size(), corpus.truth.samples.size());
    EXPECT_EQ(result_keys(parsed), result_keys(corpus.truth));
    ASSERT_EQ(parsed.files.size(), corpus.truth.files.size());
    for (std::size_t i = 0; i < parsed.files.size(); ++i) {
        const auto& a = parsed.files[i];
        const auto& b = corpus.truth.files[i];
        EXPECT_EQ(a.relative_path, b.relative_path);
        EXPECT_EQ(a.rows_read, b.rows_read) << a.relative_path;
        EXPECT_EQ(a.rows_malformed, b.rows_malformed) << a.relative_path;
        EXPECT_EQ(a.duplicates, b.duplicates) << a.relative_path;
        EXPECT_EQ(a.results, b.results) << a.relative_path;
        EXPECT_EQ(a.non_empty_cells, b.non_empty_cells) << a.relative_path;
    }
}

TEST(Oracle, ReportsOfParsedCorpusEqualLedger) {
    TempDir dir;
    const auto corpus = generate_corpus(small_plan(22), dir.path());
    const auto parsed = oracle_parse(dir.path());
    const auto reports = naive_reports(parsed, standard_report_requests(), embedded::grouping_dictionary_csv());
    for (const auto& rep : reports) {
        const auto expected = AggregateReport::from_json(corpus.ledger.at("reports").at(rep.name));
        const auto diffs = compare_reports(expected, rep);
        EXPECT_TRUE(diffs.empty()) << rep.name << ": " << (diffs.empty() ? "" : diffs.front());
    }
}

TEST(Oracle, DetectsSchemaConflict) {
    TempDir dir;
    test::write_file(dir / "PEST_NL_2019.csv", "paramCode,contaminant_id,product_id\nA,B,C\n");
    try {
        oracle_parse(dir.path());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemaConflict);
    }
}

TEST(Naive, HandCountedReports) {
    Truth t;
    t.samples = {{"P1", "m::whole eggs", "CN", "NL", 2019, SamplingStrategy::Objective},
                 {"P2", "m::citrus fruits::oranges", "UNKNOWN", "NL", 2020, SamplingStrategy::Suspect}};
    t.results = {{0, "C1", "a::b::c1", "detected", HazardCategory::PesticideResidues},
                 {0, "C2", "a::d::c2", "compliant", HazardCategory::PesticideResidues},
                 {1, "C1", "a::b::c1", "not detected", HazardCategory::VMPR}};
    const auto dict = embedded::grouping_dictionary_csv();
    const auto trend = naive_report(t, {"yearly_trend", {{"hazard", nullptr}, {"from", 2000}, {"to", 2024}}}, dict);
    EXPECT_EQ(trend.primary().rows,
              (std::vector<std::vector<Cell>>{{2019, "PEST", 2, 1, 0.5}, {2020, "VMPR", 1, 0, 0.0}}));
    const auto cats = naive_report(t, {"product_category_stats", {{"hazard", nullptr}, {"top", 10}}}, dict);
    EXPECT_EQ(std::get<std::string>(cats.primary().rows[0][2]), "Eggs and Egg products");
    const auto overlap = naive_report(t, {"contaminant_overlap", nlohmann::json::object()}, dict);
    EXPECT_EQ(overlap.find("summary")->rows, (std::vector<std::vector<Cell>>{{2, 3}}));
}

}  // namespace
}  // namespace chefs::synth
