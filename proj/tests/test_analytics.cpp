#include <gtest/gtest.h>

#include "chefs/analytics.hpp"
#include "chefs/error.hpp"
#include "chefs/pipeline.hpp"
#include "test_util.hpp"

namespace chefs {
namespace {

using test::TempDir;

const std::string kHeader =
    "sample_code,product_id,product_full_name,origin_country,sampling_year,strategy,contaminant_id,"
    "contaminant_full_name,eval_code\n";

Dataset ingest_and_load(const TempDir& dir) {
    const auto cats = CatalogueIndex::builtin();
    IngestOptions o;
    o.input_root = dir / "in";
    o.store_root = dir / "store";
    o.ctx.catalogues = &cats;
    run_ingest(o);
    return Dataset::load(Store(dir / "store"));
}

using Row = std::vector<Cell>;

const ReportTable& table(const AggregateReport& r, std::string_view name = {}) {
    if (name.empty()) return r.primary();
    const auto* t = r.find(name);
    if (!t) throw std::runtime_error("missing table " + std::string(name));
    return *t;
}

// Seven results over four samples; every expected number below is counted by hand.
class TinyDataset : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir;
        test::write_file(*dir_ / "in/PEST_NL_2019.csv",
                         kHeader +
                             "S1,P1,m::whole eggs,CN,2019,ST10A,C1,pesticides::insecticides::x1,Non-compliant\n"
                             "S1,P1,m::whole eggs,CN,2019,ST10A,C2,pesticides::fungicides::x2,Compliant\n"
                             "S2,P1,m::whole eggs,CN,2019,ST10A,C1,pesticides::insecticides::x1,compliant\n"
                             "S3,P2,m::citrus fruits::oranges,,2019,ST20A,C1,pesticides::insecticides::x1,Not detected\n");
        test::write_file(*dir_ / "in/CC_NL_2020.csv",
                         kHeader +
                             "S4,P2,m::citrus fruits::oranges,TR,2020,,C3,chemical::metals::lead,Detected\n"
                             "S4,P2,m::citrus fruits::oranges,TR,2020,,C1,pesticides::insecticides::x1,COMPLIANT\n"
                             "S1,P1,m::whole eggs,CN,2019,ST10A,C3,chemical::metals::lead,Compliant\n");
        data_ = new Dataset(ingest_and_load(*dir_));
    }
    static void TearDownTestSuite() {
        delete data_;
        delete dir_;
    }

    static AggregateReport run(const std::string& name, nlohmann::json params = nlohmann::json::object()) {
        return run_report(*data_, {name, std::move(params)});
    }

    static inline TempDir* dir_ = nullptr;
    static inline Dataset* data_ = nullptr;
};

TEST_F(TinyDataset, Shape) {
    EXPECT_EQ(data_->samples().size(), 4u);
    EXPECT_EQ(data_->results().size(), 7u);
    EXPECT_EQ(data_->contaminants().size(), 3u);
}

TEST_F(TinyDataset, YearlyTrend) {
    const auto r = run("yearly_trend");
    EXPECT_EQ(table(r).rows, (std::vector<Row>{{2019, "CC", 1, 0, 0.0}, {2019, "PEST", 4, 1, 0.25}, {2020, "CC", 2, 1, 0.5}}));
    const auto only = run("yearly_trend", {{"hazard", "CC"}, {"from", 2020}});
    EXPECT_EQ(table(only).rows, (std::vector<Row>{{2020, "CC", 2, 1, 0.5}}));
}

TEST_F(TinyDataset, TopContaminants) {
    const auto r = run("top_contaminants");
    EXPECT_EQ(table(r).rows, (std::vector<Row>{{"CC", 1, "C3", "lead", 2, 2.0 / 3.0, 1, 0.5},
                                               {"CC", 2, "C1", "x1", 1, 1.0 / 3.0, 0, 0.0},
                                               {"PEST", 1, "C1", "x1", 3, 0.75, 1, 1.0 / 3.0},
                                               {"PEST", 2, "C2", "x2", 1, 0.25, 0, 0.0}}));
    EXPECT_EQ(table(run("top_contaminants", {{"hazard", "PEST"}, {"n", 1}})).rows.size(), 1u);
}

TEST_F(TinyDataset, HazardProductTable) {
    const auto r = run("hazard_product_table", {{"hazard", "PEST"}});
    EXPECT_EQ(table(r).rows,
              (std::vector<Row>{{"PEST", 1, "C1", "x1", 3, 1, "P1", "whole eggs", 2, 1, 0.5},
                                {"PEST", 1, "C1", "x1", 3, 2, "P2", "oranges", 1, 0, 0.0},
                                {"PEST", 2, "C2", "x2", 1, 1, "P1", "whole eggs", 1, 0, 0.0}}));
    const auto p = run("product_hazard_table", {{"hazard", "PEST"}, {"top_products", 1}});
    EXPECT_EQ(table(p).rows, (std::vector<Row>{{"PEST", 1, "P1", "whole eggs", 3, 1, "C1", "x1", 2, 1, 0.5},
                                               {"PEST", 1, "P1", "whole eggs", 3, 2, "C2", "x2", 1, 0, 0.0}}));
}

TEST_F(TinyDataset, OntologyGroups) {
    EXPECT_EQ(table(run("ontology_group_stats", {{"hazard", "PEST"}})).rows,
              (std::vector<Row>{{"PEST", "pesticides", 0, 4, 1, 0.25, 2}}));
    EXPECT_EQ(table(run("ontology_group_stats", {{"hazard", "PEST"}, {"level", 2}})).rows,
              (std::vector<Row>{{"PEST", "insecticides", 0, 3, 1, 1.0 / 3.0, 1}, {"PEST", "fungicides", 0, 1, 0, 0.0, 1}}));
    EXPECT_EQ(table(run("ontology_group_stats", {{"hazard", "CC"}, {"level", 5}})).rows,
              (std::vector<Row>{{"CC", "lead", 1, 2, 1, 0.5, 1}, {"CC", "x1", 1, 1, 0, 0.0, 1}}));
    EXPECT_EQ(table(run("ontology_group_stats", {{"hazard", "CC"}, {"parent", "chemical"}})).rows,
              (std::vector<Row>{{"CC", "chemical", 0, 2, 1, 0.5, 1}}));
}

TEST_F(TinyDataset, ProductCategories) {
    EXPECT_EQ(table(run("product_category_stats")).rows,
              (std::vector<Row>{{"CC", 1, "Fruits", 2, 2.0 / 3.0, 1, 0.5},
                                {"CC", 2, "Eggs and Egg products", 1, 1.0 / 3.0, 0, 0.0},
                                {"PEST", 1, "Eggs and Egg products", 3, 0.75, 1, 1.0 / 3.0},
                                {"PEST", 2, "Fruits", 1, 0.25, 0, 0.0}}));
}

TEST_F(TinyDataset, CountryStats) {
    EXPECT_EQ(table(run("country_stats")).rows,
              (std::vector<Row>{{1, "NL", 7, 1.0, 2, 2.0 / 7.0, 3, 1, 4, 1, 0, 0}}));
}

TEST_F(TinyDataset, StrategyBreakdown) {
    EXPECT_EQ(table(run("sampling_strategy_breakdown")).rows,
              (std::vector<Row>{{"objective sampling", 2, 0.5, 4, 1, 0.25},
                                {"selective sampling", 1, 0.25, 1, 0, 0.0},
                                {"not specified", 1, 0.25, 2, 1, 0.5}}));
    const auto by_year = table(run("sampling_strategy_breakdown", {{"group_by", "year"}}));
    EXPECT_EQ(by_year.rows.front(), (Row{2019, "objective sampling", 2, 2.0 / 3.0, 4, 1, 0.25}));
    EXPECT_EQ(by_year.rows.back(), (Row{2020, "not specified", 1, 1.0, 2, 1, 0.5}));
    const auto by_ch = table(run("sampling_strategy_breakdown", {{"group_by", "country_hazard"}}));
    // S1 counts for both CC and PEST
    EXPECT_EQ(by_ch.rows.front(), (Row{"NL", "CC", "objective sampling", 1, 0.5, 1, 0, 0.0}));
    EXPECT_THROW(run("sampling_strategy_breakdown", {{"group_by", "month"}}), Error);
}

TEST_F(TinyDataset, TradeLinksAreStrictlyAboveThreshold) {
    EXPECT_EQ(table(run("trade_links", {{"min_samples", 1}})).rows, (std::vector<Row>{{1, "CN", "NL", 2, 1, 0.5}}));
    EXPECT_TRUE(table(run("trade_links", {{"min_samples", 2}})).rows.empty());
}

TEST_F(TinyDataset, UnknownOrigins) {
    EXPECT_EQ(table(run("unknown_origin_trend")).rows, (std::vector<Row>{{2019, 3, 1, 1.0 / 3.0}, {2020, 1, 0, 0.0}}));
}

TEST_F(TinyDataset, ResultsPerSample) {
    const auto r = run("results_per_sample_distribution");
    EXPECT_EQ(table(r).rows, (std::vector<Row>{{1, 2}, {2, 1}, {3, 1}}));
    EXPECT_EQ(table(r, "per_hazard").rows, (std::vector<Row>{{"CC", 3, 2, 1.5, 3.0 / 7.0, 0.5},
                                                            {"PEST", 4, 3, 4.0 / 3.0, 4.0 / 7.0, 0.75}}));
}

TEST_F(TinyDataset, ContaminantOverlap) {
    const auto r = run("contaminant_overlap");
    EXPECT_EQ(table(r, "cardinality").rows, (std::vector<Row>{{1, 2, 2.0 / 3.0}, {2, 1, 1.0 / 3.0}, {3, 0, 0.0}}));
    EXPECT_EQ(table(r, "regions").rows,
              (std::vector<Row>{{"CC", 1}, {"PEST", 1}, {"VMPR", 0}, {"CC+PEST", 1}, {"CC+VMPR", 0}, {"PEST+VMPR", 0},
                                {"CC+PEST+VMPR", 0}}));
    EXPECT_EQ(table(r, "summary").rows, (std::vector<Row>{{3, 4}}));
}

TEST_F(TinyDataset, EvaluationSummary) {
    const auto r = run("evaluation_summary");
    EXPECT_EQ(table(r).rows, (std::vector<Row>{{"compliant", "Compliant", 4, 4.0 / 7.0},
                                               {"detected", "NonCompliant", 1, 1.0 / 7.0},
                                               {"non-compliant", "NonCompliant", 1, 1.0 / 7.0},
                                               {"not detected", "NotDetected", 1, 1.0 / 7.0}}));
    EXPECT_EQ(table(r, "classes").rows.front(), (Row{"NonCompliant", 2, 2.0 / 7.0}));
}

TEST_F(TinyDataset, Sparsity) {
    const auto r = run("sparsity");
    const auto& t = table(r);
    const auto var = *t.column_index("variable");
    const auto rate = *t.column_index("missing_rate");
    for (const auto& row : t.rows) {
        if (std::get<std::string>(row[0]) != "PEST_NL_2019.csv") continue;
        const auto& v = std::get<std::string>(row[var]);
        if (v == "origin_country") EXPECT_EQ(std::get<double>(row[rate]), 0.25);
        if (v == "sampling_date") EXPECT_EQ(std::get<double>(row[rate]), 1.0);
        if (v == "contaminant_id") EXPECT_EQ(std::get<double>(row[rate]), 0.0);
    }
}

TEST_F(TinyDataset, UnknownReportAndBadParams) {
    try {
        run("no_such_report");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownReport);
    }
    EXPECT_THROW(run("top_contaminants", {{"n", 0}}), Error);
    EXPECT_THROW(run("top_contaminants", {{"bogus", 1}}), Error);
    EXPECT_THROW(run("top_contaminants", {{"hazard", "XYZ"}}), Error);
}

TEST_F(TinyDataset, JobCountDoesNotChangeOutput) {
    for (const auto& req : standard_report_requests()) {
        const auto one = run_report(*data_, req, {.jobs = 1});
        const auto many = run_report(*data_, req, {.jobs = 5});
        EXPECT_EQ(one.to_json().dump(), many.to_json().dump()) << req.name;
    }
}

TEST(TradeLinks, OrderingAndTieBreaks) {
    TempDir dir;
    std::string body;
    int n = 0;
    auto add = [&](const std::string& origin, int samples, int nc) {
        for (int i = 0; i < samples; ++i)
            body += "S" + std::to_string(++n) + ",P1,m::x," + origin + ",2019,,C1,a::b," +
                    (i < nc ? "detected" : "compliant") + "\n";
    };
    add("DE", 4, 2);
    add("BE", 2, 1);
    add("AT", 2, 1);
    add("DK", 3, 3);
    add("ES", 2, 0);
    add("FR", 3, 1);
    add("IT", 6, 2);
    add("NL", 9, 9);  // self link
    test::write_file(dir / "in/CC_NL_2019.csv", kHeader + body);
    const auto data = ingest_and_load(dir);
    const auto r = run_report(data, {"trade_links", {{"min_samples", 1}}});
    std::vector<std::string> order;
    for (const auto& row : table(r).rows) order.push_back(std::get<std::string>(row[1]));
    EXPECT_EQ(order, (std::vector<std::string>{"DK", "DE", "AT", "BE", "IT", "FR", "ES"}));
    EXPECT_EQ(table(r, "edges").rows.size(), 7u);
    const auto top = run_report(data, {"trade_links", {{"min_samples", 2}, {"top", 2}}});
    EXPECT_EQ(table(top).rows, (std::vector<Row>{{1, "DK", "NL", 3, 3, 1.0}, {2, "DE", "NL", 4, 2, 0.5}}));
    const auto window = run_report(data, {"trade_links", {{"min_samples", 1}, {"to", 2018}}});
    EXPECT_TRUE(table(window).rows.empty());
}

TEST(Analytics, EmptyStore) {
    TempDir dir;
    std::filesystem::create_directories(dir / "store");
    const auto data = Dataset::load(Store(dir / "store"));
    for (const auto& req : standard_report_requests()) {
        const auto r = run_report(data, req);
        EXPECT_EQ(r.name, req.name);
        EXPECT_TRUE(r.primary().rows.empty() || req.name == "contaminant_overlap") << req.name;
    }
}

TEST(Reports, CompareHonoursTolerance) {
    AggregateReport a;
    a.name = "x";
    a.add_table("t", {"v", "n"}).rows = {{0.1, 3}};
    auto b = a;
    std::get<double>(b.tables[0].rows[0][0]) = 0.1 * (1 + 1e-13);
    EXPECT_TRUE(compare_reports(a, b).empty());
    std::get<double>(b.tables[0].rows[0][0]) = 0.1 * (1 + 1e-10);
    EXPECT_FALSE(compare_reports(a, b).empty());
    b = a;
    b.tables[0].rows[0][1] = std::int64_t{4};
    EXPECT_FALSE(compare_reports(a, b).empty());
}

TEST(Reports, JsonRoundTrip) {
    AggregateReport a;
    a.name = "x";
    a.params = {{"n", 3}};
    a.add_table("t", {"s", "n", "f", "z"}).rows = {{std::string("a,\"b\""), std::int64_t{3}, 1.0 / 3.0, std::monostate{}}};
    const auto b = AggregateReport::from_json(a.to_json());
    EXPECT_TRUE(compare_reports(a, b, 0.0).empty());
    EXPECT_EQ(a.primary().to_csv(), "s,n,f,z\n\"a,\"\"b\"\"\",3," + format_double(1.0 / 3.0) + ",\n");
}

}  // namespace
}  // namespace chefs
