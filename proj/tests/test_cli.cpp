#include <cstdlib>
#include <regex>

#include <gtest/gtest.h>

#include "chefs/cli.hpp"
#include "chefs/csv.hpp"
#include "chefs/report.hpp"
#include "chefs/synth.hpp"
#include "test_util.hpp"

namespace chefs {
namespace {

namespace fs = std::filesystem;
using test::TempDir;

int run(std::vector<std::string> args) {
    args.insert(args.begin(), {"--log-level", "off"});
    return cli::run(args);
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

class CliCorpus : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir;
        corpus_ = (*dir_ / "corpus").string();
        store_ = (*dir_ / "store").string();
        ASSERT_EQ(run({"synth", "generate", "--seed", "5", "--files", "12", "--rows", "8000", "-o", corpus_}), 0);
        ASSERT_EQ(run({"ingest", "-i", corpus_ + "/data", "--catalogues", corpus_ + "/catalogues", "--store", store_}), 0);
    }
    static void TearDownTestSuite() { delete dir_; }

    static inline TempDir* dir_ = nullptr;
    static inline std::string corpus_, store_;
};

TEST_F(CliCorpus, IngestWritesStats) {
    const auto stats = nlohmann::json::parse(read_text_file(fs::path(store_) / "ingest_stats.json"));
    const auto ledger = nlohmann::json::parse(read_text_file(fs::path(corpus_) / "ledger.json"));
    EXPECT_EQ(stats.at("totals").at("results_emitted"), ledger.at("totals").at("results_emitted"));
    EXPECT_EQ(stats.at("config").at("command"), "ingest");
}

TEST_F(CliCorpus, ReingestNeedsOverwrite) {
    const std::vector<std::string> base{"ingest", "-i", corpus_ + "/data", "--catalogues", corpus_ + "/catalogues",
                                        "--store", store_};
    EXPECT_EQ(run(base), cli::kFatal);
    auto with = base;
    with.push_back("--overwrite");
    EXPECT_EQ(run(with), cli::kOk);
}

TEST_F(CliCorpus, ValidateCleanStore) {
    const auto out = (*dir_ / "validation").string();
    EXPECT_EQ(run({"validate", "-i", corpus_ + "/data", "--catalogues", corpus_ + "/catalogues", "--store", store_,
                   "-o", out}),
              cli::kOk);
    const auto j = nlohmann::json::parse(read_text_file(fs::path(out) / "validation.json"));
    EXPECT_EQ(j.at("mismatch_count"), 0);
    EXPECT_TRUE(j.at("ok").get<bool>());
}

TEST_F(CliCorpus, ReportAllMatchesOracle) {
    const auto out = (*dir_ / "reports").string();
    ASSERT_EQ(run({"report", "all", "--store", store_, "-o", out}), cli::kOk);
    EXPECT_TRUE(fs::exists(fs::path(out) / "config.json"));
    const auto ledger = nlohmann::json::parse(read_text_file(fs::path(corpus_) / "ledger.json"));
    for (const auto& [name, rep] : ledger.at("reports").items()) {
        const auto j = nlohmann::json::parse(read_text_file(fs::path(out) / (name + ".json")));
        const auto diffs = compare_reports(AggregateReport::from_json(rep), AggregateReport::from_json(j));
        EXPECT_TRUE(diffs.empty()) << name;
        EXPECT_TRUE(fs::exists(fs::path(out) / (name + ".csv")));
    }
    EXPECT_EQ(run({"synth", "oracle", "--corpus", corpus_}), cli::kOk);
}

TEST_F(CliCorpus, ReportOutputIsLocationIndependent) {
    const auto a = (*dir_ / "ra").string();
    const auto b = (*dir_ / "rb").string();
    ASSERT_EQ(run({"report", "top_contaminants", "--store", store_, "-o", a, "--n", "3"}), 0);
    ASSERT_EQ(run({"-j", "3", "report", "top_contaminants", "--store", store_, "-o", b, "--n", "3"}), 0);
    EXPECT_EQ(read_text_file(fs::path(a) / "top_contaminants.json"), read_text_file(fs::path(b) / "top_contaminants.json"));
    const auto j = nlohmann::json::parse(read_text_file(fs::path(a) / "top_contaminants.json"));
    EXPECT_EQ(j.at("params").at("n"), 3);
    EXPECT_LE(AggregateReport::from_json(j).primary().rows.size(), 9u);
}

TEST_F(CliCorpus, StoreFromEnvironment) {
    const auto out = (*dir_ / "env").string();
    ::setenv("CHEFS_STORE", store_.c_str(), 1);
    EXPECT_EQ(run({"report", "evaluation_summary", "-o", out}), cli::kOk);
    ::unsetenv("CHEFS_STORE");
    EXPECT_TRUE(fs::exists(fs::path(out) / "evaluation_summary.csv"));
    EXPECT_EQ(run({"report", "evaluation_summary", "-o", out}), cli::kFatal);
}

TEST_F(CliCorpus, ConfigFileWithFlagOverride) {
    const auto cfg = *dir_ / "cfg.json";
    const auto out = (*dir_ / "cfgout").string();
    write_text_file(cfg, nlohmann::json{{"store", store_}, {"n", 2}, {"output", out}}.dump());
    ASSERT_EQ(run({"--config", cfg.string(), "report", "top_contaminants", "--n", "4"}), cli::kOk);
    const auto j = nlohmann::json::parse(read_text_file(fs::path(out) / "top_contaminants.json"));
    EXPECT_EQ(j.at("params").at("n"), 4);
    write_text_file(cfg, R"({"stroe": "x"})");
    EXPECT_EQ(run({"--config", cfg.string(), "report", "top_contaminants"}), cli::kFatal);
}

TEST_F(CliCorpus, ErrorsMapToExitCodes) {
    const auto out = (*dir_ / "err").string();
    EXPECT_EQ(run({"report", "nope", "--store", store_, "-o", out}), cli::kFatal);
    EXPECT_EQ(run({"report", "top_contaminants", "--store", store_, "-o", out, "--n", "0"}), cli::kFatal);
    EXPECT_EQ(run({"report", "top_contaminants", "--store", (*dir_ / "missing").string(), "-o", out}), cli::kFatal);
    EXPECT_EQ(run({"plot", "sparsity", "--store", store_, "-o", out}), cli::kFatal);
    EXPECT_EQ(run({"bogus-command"}), cli::kFatal);
}

TEST_F(CliCorpus, PlotsCarryTheirData) {
    const auto out = (*dir_ / "plots").string();
    ASSERT_EQ(run({"plot", "all", "--store", store_, "-o", out}), cli::kOk);
    ASSERT_EQ(run({"report", "all", "--store", store_, "-o", out}), cli::kOk);
    auto rows = [&](const std::string& name) {
        return AggregateReport::from_json(nlohmann::json::parse(read_text_file(fs::path(out) / (name + ".json"))))
            .primary()
            .rows.size();
    };
    const auto trend = read_text_file(fs::path(out) / "yearly_trend.svg");
    EXPECT_EQ(count(trend, "<circle class=\"point\""), rows("yearly_trend"));
    EXPECT_GE(count(trend, "<polyline class=\"series\""), 1u);
    const auto top = read_text_file(fs::path(out) / "top_contaminants.svg");
    EXPECT_EQ(count(top, "<rect class=\"bar\""), rows("top_contaminants"));

    const auto ten = (*dir_ / "ten").string();
    ASSERT_EQ(run({"plot", "top_contaminants", "--hazard", "PEST", "--store", store_, "-o", ten}), cli::kOk);
    EXPECT_EQ(count(read_text_file(fs::path(ten) / "top_contaminants.svg"), "<rect class=\"bar\""), 10u);

    const auto trade = read_text_file(fs::path(out) / "trade_links.svg");
    EXPECT_EQ(count(trade, "<path class=\"chord\""), rows("trade_links"));
    std::smatch m;
    ASSERT_TRUE(std::regex_search(trade, m, std::regex(R"re(data-origin="KH" data-destination="CZ" data-samples="(\d+)" data-noncompliant="(\d+)")re")));
    EXPECT_EQ(m[1], "165");
    EXPECT_EQ(m[2], "100");

    const auto empty = (*dir_ / "empty").string();
    ASSERT_EQ(run({"plot", "trade_links", "--min-samples", "100000000", "--store", store_, "-o", empty}), cli::kOk);
    EXPECT_NE(read_text_file(fs::path(empty) / "trade_links.svg").find("no data"), std::string::npos);
}

TEST_F(CliCorpus, CorruptedStoreFailsValidation) {
    TempDir copy;
    fs::copy(store_, copy.path(), fs::copy_options::recursive);
    fs::path victim;
    for (const auto& e : fs::recursive_directory_iterator(copy.path()))
        if (e.path().filename() == "core_results.csv") {
            victim = e.path();
            break;
        }
    ASSERT_FALSE(victim.empty());
    auto table = read_csv_table(victim);
    table.rows[0][5] = table.rows[0][5] == "x" ? "y" : "x";  // eval_code
    std::string out;
    append_csv_row(out, table.header);
    for (const auto& r : table.rows) append_csv_row(out, r);
    write_text_file(victim, out);
    EXPECT_EQ(run({"validate", "-i", corpus_ + "/data", "--catalogues", corpus_ + "/catalogues", "--store",
                   copy.path().string()}),
              cli::kValidationFailed);
}

TEST(Cli, SchemaConflictExitsTwo) {
    TempDir dir;
    test::write_file(dir / "in/PEST_NL_2019.csv", "paramCode,contaminant_id,product_id\nA,B,C\n");
    EXPECT_EQ(run({"ingest", "-i", (dir / "in").string(), "--store", (dir / "store").string()}), cli::kSchemaConflict);
    EXPECT_FALSE(fs::exists(dir / "store/PEST"));
}

TEST(Cli, OracleReportsLedgerDifferences) {
    TempDir dir;
    const auto corpus = (dir / "c").string();
    ASSERT_EQ(run({"synth", "generate", "--seed", "2", "--files", "4", "--rows", "800", "-o", corpus}), 0);
    auto ledger = nlohmann::json::parse(read_text_file(fs::path(corpus) / "ledger.json"));
    auto& rows = ledger["reports"]["evaluation_summary"]["tables"][0]["rows"];
    ASSERT_FALSE(rows.empty());
    rows[0][2] = rows[0][2].get<int>() + 1;
    write_text_file(fs::path(corpus) / "ledger.json", ledger.dump());
    EXPECT_EQ(run({"synth", "oracle", "--corpus", corpus}), cli::kValidationFailed);
}

TEST(Cli, BinaryRuns) {
    TempDir dir;
    const std::string cmd = std::string(CHEFS_BIN) + " --log-level off synth generate --seed 1 --files 3 --rows 300 -o " +
                            (dir / "c").string() + " > /dev/null";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir / "c/ledger.json"));
    const std::string bad = std::string(CHEFS_BIN) + " --log-level off report nope -o " + (dir / "o").string() +
                            " --store " + (dir / "c").string() + " > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 1);
}

}  // namespace
}  // namespace chefs
