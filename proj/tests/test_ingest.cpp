#include <gtest/gtest.h>

#include "chefs/csv.hpp"
#include "chefs/error.hpp"
#include "chefs/ingest.hpp"
#include "chefs/pipeline.hpp"
#include "chefs/store.hpp"
#include "test_util.hpp"

namespace chefs {
namespace {

using test::TempDir;

const std::string kHeader =
    "sample_code,product_id,origin_country,sampling_year,sampling_date,strategy,contaminant_id,result_value,loq,"
    "eval_code\n";

IngestOptions options_for(const TempDir& dir, const CatalogueIndex& cats) {
    IngestOptions o;
    o.input_root = dir / "in";
    o.store_root = dir / "store";
    o.ctx.catalogues = &cats;
    return o;
}

TEST(ResolveColumns, CanonicalSynonymAndCaseInsensitive) {
    const auto m = resolve_columns({"sampId", "PRODUCT_ID", "ParameterCode", "resVal", "my_note"},
                                   SynonymTable::builtin(), Era::SSD2);
    EXPECT_EQ(m.column("sample_code"), 0u);
    EXPECT_EQ(m.column("product_id"), 1u);
    EXPECT_EQ(m.column("contaminant_id"), 2u);
    EXPECT_EQ(m.column("result_value"), 3u);
    ASSERT_EQ(m.unmapped_sources.size(), 1u);
    EXPECT_EQ(m.unmapped_sources[0].first, "my_note");
}

TEST(ResolveColumns, EraSpecificSynonym) {
    const auto ssd1 = resolve_columns({"labSampCode"}, SynonymTable::builtin(), Era::SSD1);
    EXPECT_TRUE(ssd1.column("sample_code"));
    const auto ssd2 = resolve_columns({"labSampCode"}, SynonymTable::builtin(), Era::SSD2);
    EXPECT_FALSE(ssd2.column("sample_code"));
}

TEST(ResolveColumns, TwoColumnsOnOneVariableConflict) {
    try {
        resolve_columns({"paramCode", "contaminant_id"}, SynonymTable::builtin(), Era::SSD2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemaConflict);
    }
}

TEST(ResolveColumns, ReservedNamesConflict) {
    for (const char* name : {"_derived", "_source_file", "_source_row", "sample_id", "result_id"}) {
        try {
            resolve_columns({"paramCode", name}, SynonymTable::builtin(), Era::SSD2);
            FAIL() << name;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::SchemaConflict) << name;
        }
    }
}

TEST(Ids, SampleCodeDominatesAndTupleIsPositional) {
    const auto a = make_sample_id(std::string("S1"), "NL", 2019, "P", std::nullopt, std::nullopt, "f.csv", 1);
    const auto b = make_sample_id(std::string("S1"), "DE", 2020, "Q", std::nullopt, std::nullopt, "g.csv", 9);
    EXPECT_EQ(a, b);
    const auto t1 = make_sample_id(std::nullopt, "NL", 2019, "P", std::nullopt, std::nullopt, "f.csv", 1);
    const auto t2 = make_sample_id(std::nullopt, "NL", 2019, "P", std::nullopt, std::nullopt, "f.csv", 2);
    EXPECT_NE(t1, t2);
    EXPECT_EQ(t1.size(), 32u);
}

TEST(Ids, ResultIdSeparatesAbsentFromEmptyAndShiftedFields) {
    const auto x = make_result_id("s", "c", std::string("ab"), std::string("c"), std::nullopt, std::nullopt);
    const auto y = make_result_id("s", "c", std::string("a"), std::string("bc"), std::nullopt, std::nullopt);
    const auto z = make_result_id("s", "c", std::nullopt, std::string("c"), std::nullopt, std::nullopt);
    EXPECT_NE(x, y);
    EXPECT_NE(x, z);
}

TEST(Deduplicator, FirstOccurrenceWins) {
    std::vector<AnalyticalResult> rs(4);
    rs[0].result_id = rs[2].result_id = "0123456789abcdef0123456789abcdef";
    rs[1].result_id = "x";
    rs[3].result_id = "x";
    rs[0].source_row = 1;
    rs[2].source_row = 3;
    EXPECT_EQ(dedup(rs), 2u);
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs[0].source_row, 1u);
}

TEST(Discovery, NamesAndSidecars) {
    TempDir dir;
    test::write_file(dir / "a/PEST_NL_2019.csv", kHeader);
    test::write_file(dir / "b/CC_DE_2012_part2.csv.gz", "");
    test::write_file(dir / "notes.txt", "x");
    test::write_file(dir / "odd.csv", kHeader);
    test::write_file(dir / "odd.csv.meta.json", R"({"hazard":"VMPR","country":"IT","year":2016})");
    const auto d = discover_files(dir.path());
    ASSERT_EQ(d.entries.size(), 3u);
    EXPECT_EQ(d.entries[0].relative_path, "a/PEST_NL_2019.csv");
    EXPECT_EQ(d.entries[0].era, Era::SSD2);
    EXPECT_EQ(d.entries[1].era, Era::SSD1);
    EXPECT_EQ(d.entries[1].country, "DE");
    EXPECT_EQ(d.entries[2].hazard, HazardCategory::VMPR);
    EXPECT_EQ(d.entries[2].year, 2016);
    EXPECT_FALSE(d.skipped.empty());
}

TEST(RunIngest, MalformedRowsAreCountedAndSkipped) {
    TempDir dir;
    test::write_file(dir / "in/PEST_NL_2019.csv",
                     kHeader +
                         "S1,P1,CN,2019,2019-03-01,ST10A,C1,0.1,0.01,compliant\n"
                         "S2,P1,CN,2019,,,,0.1,0.01,compliant\n"            // no contaminant
                         "S3,NA,CN,2019,,,C1,0.1,0.01,compliant\n"          // no product
                         "S4,P1,CN,1850,,,C1,0.1,0.01,compliant\n"          // year out of range
                         "S5,P1,CN,20l7,,,C1,0.1,0.01,compliant\n"          // year not a number
                         "S6,P1,CN,2019,,C1,0.1,0.01,compliant\n"           // field count
                         "S7,P1,,,,,C2,,,\n");                              // undated but fine
    const auto cats = CatalogueIndex::builtin();
    const auto s = run_ingest(options_for(dir, cats));
    EXPECT_EQ(s.totals.rows_read, 7u);
    EXPECT_EQ(s.totals.rows_malformed, 5u);
    EXPECT_EQ(s.totals.results_emitted, 2u);
    EXPECT_EQ(s.totals.samples_emitted, 2u);
}

TEST(RunIngest, DuplicateRowsAcrossFilesKeepFirst) {
    TempDir dir;
    std::string body;
    for (int i = 0; i < 800; ++i)
        body += "S" + std::to_string(i) + ",P1,CN,2019,,,C1," + std::to_string(i) + ",0.01,compliant\n";
    std::string dups;
    for (int i = 0; i < 200; ++i)
        dups += "S" + std::to_string(i) + ",P1,CN,2019,,,C1," + std::to_string(i) + ",0.01,compliant\n";
    test::write_file(dir / "in/PEST_NL_2019.csv", kHeader + body);
    test::write_file(dir / "in/PEST_NL_2019_b.csv", kHeader + dups);
    const auto cats = CatalogueIndex::builtin();
    const auto s = run_ingest(options_for(dir, cats));
    EXPECT_EQ(s.totals.rows_read, 1000u);
    EXPECT_EQ(s.totals.duplicates_removed, 200u);
    EXPECT_EQ(s.totals.results_emitted, 800u);
    ASSERT_EQ(s.files.size(), 2u);
    EXPECT_EQ(s.files[1].stats.duplicates_removed, 200u);
}

TEST(RunIngest, SameFileTwiceIsEntirelyDuplicate) {
    TempDir dir;
    const std::string content = kHeader + "S1,P1,CN,2019,,,C1,0.1,0.01,compliant\nS1,P1,CN,2019,,,C2,0.2,0.01,\n";
    test::write_file(dir / "in/PEST_NL_2019.csv", content);
    test::write_file(dir / "in/PEST_NL_2019_copy.csv", content);
    const auto cats = CatalogueIndex::builtin();
    const auto s = run_ingest(options_for(dir, cats));
    EXPECT_EQ(s.files[1].stats.duplicates_removed, 2u);
    EXPECT_EQ(s.files[1].stats.results_emitted, 0u);
    EXPECT_EQ(s.totals.results_emitted, 2u);
}

TEST(RunIngest, SchemaConflictLeavesStoreUntouched) {
    TempDir dir;
    test::write_file(dir / "in/PEST_NL_2019.csv", kHeader + "S1,P1,CN,2019,,,C1,0.1,0.01,compliant\n");
    test::write_file(dir / "in/PEST_NL_2020.csv", "paramCode,contaminant_id\nA,B\n");
    const auto cats = CatalogueIndex::builtin();
    try {
        run_ingest(options_for(dir, cats));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemaConflict);
    }
    EXPECT_TRUE(directory_is_empty(dir / "store"));
}

TEST(RunIngest, RefusesForeignDirectory) {
    TempDir dir;
    test::write_file(dir / "in/PEST_NL_2019.csv", kHeader + "S1,P1,CN,2019,,,C1,0.1,0.01,compliant\n");
    test::write_file(dir / "store/precious.txt", "keep");
    const auto cats = CatalogueIndex::builtin();
    auto opt = options_for(dir, cats);
    opt.overwrite = true;
    EXPECT_THROW(run_ingest(opt), Error);
    EXPECT_TRUE(std::filesystem::exists(dir / "store/precious.txt"));
}

TEST(RunIngest, MissingRatesPerVariable) {
    TempDir dir;
    test::write_file(dir / "in/PEST_NL_2019.csv",
                     kHeader + "S1,P1,CN,2019,,,C1,0.1,0.01,compliant\nS2,P1,NA,2019,,,C1,,0.01,\n"
                               "S3,P1,,2019,,,C1,0.3,0.01,\nS4,P1,XX,2019,,,C1,0.4,0.01,\n");
    const auto cats = CatalogueIndex::builtin();
    const auto s = run_ingest(options_for(dir, cats));
    const auto rates = s.totals.missing_rate_per_variable({"lod"});
    EXPECT_DOUBLE_EQ(rates.at("origin_country"), 0.5);
    EXPECT_DOUBLE_EQ(rates.at("result_value"), 0.25);
    EXPECT_DOUBLE_EQ(rates.at("eval_code"), 0.75);
    EXPECT_DOUBLE_EQ(rates.at("sample_code"), 0.0);
    EXPECT_DOUBLE_EQ(rates.at("lod"), 1.0);
}

TEST(RunIngest, CatalogueLinkageMarksDerived) {
    TempDir dir;
    const auto cats = CatalogueIndex::builtin();
    test::write_file(dir / "in/PEST_NL_2019.csv", kHeader + "S1,UNLISTED,CN,2019,,,ALSO-UNLISTED,0.1,0.01,\n"
                                                            "S2,A031G,CN,2019,,,RF-0001-CC,0.1,0.01,\n");
    const auto s = run_ingest(options_for(dir, cats));
    EXPECT_EQ(s.totals.results_emitted, 2u);
    Store store(dir / "store");
    ASSERT_EQ(store.valid_partitions().size(), 1u);
    const auto data = read_partition(*store.valid_partitions()[0]);
    ASSERT_EQ(data.results.size(), 2u);
    for (const auto& r : data.results) {
        if (r.contaminant_id == "RF-0001-CC") {
            EXPECT_EQ(r.contaminant_full_name, "chemical elements::heavy metals::lead (pb)");
            EXPECT_EQ(r.derived, std::vector<std::string>{"contaminant_full_name"});
        } else {
            EXPECT_FALSE(r.contaminant_full_name);
            EXPECT_TRUE(r.derived.empty());
        }
    }
    for (const auto& smp : data.samples) {
        const bool linked = smp.product_id == "A031G";
        EXPECT_EQ(smp.product_full_name.has_value(), linked);
        EXPECT_EQ(std::find(smp.derived.begin(), smp.derived.end(), "product_full_name") != smp.derived.end(), linked);
    }
}

}  // namespace
}  // namespace chefs
