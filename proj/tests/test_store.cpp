#include <gtest/gtest.h>

#include "chefs/csv.hpp"
#include "chefs/error.hpp"
#include "chefs/pipeline.hpp"
#include "chefs/store.hpp"
#include "test_util.hpp"

namespace chefs {
namespace {

namespace fs = std::filesystem;
using test::TempDir;

const std::string kHeader =
    "sampId,prodCode,origCountry,sampY,sampDate,sampStrategy,paramCode,resVal,resLOQ,evalCode,lab note\n";

class SmallStore : public ::testing::Test {
protected:
    void SetUp() override {
        test::write_file(dir_ / "in/PEST_NL_2019.csv",
                         kHeader +
                             "S1,A031G,CN,2019,2019-03-01,ST10A,RF-0001-CC,0.1,0.01,Compliant,\"a, b\"\n"
                             "S1,A031G,CN,2019,2019-03-01,ST10A,RF-0002-CC,NA,0.01,not detected,\n"
                             "S2,A01DJ,XX,2019,,ST20A,RF-0001-CC,0.7,0.01,Non-compliant,\"say \"\"hi\"\"\"\n"
                             "S2,A01DJ,XX,2019,,ST20A,RF-0001-CC,0.7,0.01,Non-compliant,\"say \"\"hi\"\"\"\n");
        test::write_file(dir_ / "in/CC_DE_2012.csv",
                         "product_id,sampling_date,contaminant_id,result_value\n"
                         "P9,2012-05-05,C1,1\nP9,2012-05-05,C2,2\nP8,2012-05-05,C1,3\n");
        opt_.input_root = dir_ / "in";
        opt_.store_root = dir_ / "store";
        opt_.ctx.catalogues = &cats_;
        summary_ = run_ingest(opt_);
    }

    ValidationReport validate() const {
        ValidateOptions v;
        v.ctx = opt_.ctx;
        return round_trip_validate(Store(dir_ / "store"), dir_ / "in", v);
    }

    TempDir dir_;
    CatalogueIndex cats_ = CatalogueIndex::builtin();
    IngestOptions opt_;
    IngestSummary summary_;
};

TEST_F(SmallStore, LayoutAndCounts) {
    EXPECT_EQ(summary_.partitions, 2u);
    EXPECT_EQ(summary_.totals.duplicates_removed, 1u);
    EXPECT_EQ(summary_.totals.results_emitted, 6u);
    EXPECT_EQ(summary_.totals.samples_emitted, 4u);
    const auto part = dir_ / "store/PEST/NL/2019";
    for (auto f : {kCoreSamplesFile, kRestSamplesFile, kCoreResultsFile, kRestResultsFile, kManifestFile})
        EXPECT_TRUE(fs::exists(part / f)) << f;
    EXPECT_TRUE(fs::exists(dir_ / "store" / kStoreFile));
    const auto core = read_csv_table(part / kCoreResultsFile);
    EXPECT_EQ(core.header, core_result_columns());
    EXPECT_EQ(core.rows.size(), 3u);
}

TEST_F(SmallStore, RoundTripHasNoMismatches) {
    const auto r = validate();
    EXPECT_TRUE(r.ok()) << r.to_json().dump(2);
    EXPECT_EQ(r.mismatch_count, 0u);
    std::uint64_t dups = 0, read = 0;
    for (const auto& p : r.partitions) {
        dups += p.duplicates;
        read += p.rows_read;
        EXPECT_TRUE(p.checksums_ok);
    }
    EXPECT_EQ(dups, 1u);
    EXPECT_EQ(read, 7u);
}

TEST_F(SmallStore, MutatedCellIsLocated) {
    const auto path = dir_ / "store/PEST/NL/2019" / kCoreResultsFile;
    auto table = read_csv_table(path);
    const auto rest = read_csv_table(dir_ / "store/PEST/NL/2019" / kRestResultsFile);
    const auto value_col = static_cast<std::size_t>(
        std::find(table.header.begin(), table.header.end(), "result_value") - table.header.begin());
    const auto row_col = static_cast<std::size_t>(
        std::find(rest.header.begin(), rest.header.end(), "_source_row") - rest.header.begin());
    // rest rows are in the same id order as core rows
    ASSERT_EQ(rest.rows[0][0], table.rows[0][0]);
    const auto source_row = std::stoul(rest.rows[0][row_col]);
    table.rows[0][value_col] = "12345";
    std::string out;
    append_csv_row(out, table.header);
    for (const auto& r : table.rows) append_csv_row(out, r);
    write_text_file(path, out);

    const auto r = validate();
    EXPECT_EQ(r.mismatch_count, 1u);
    bool found = false;
    for (const auto& p : r.partitions) {
        if (p.key.country != "NL") continue;
        EXPECT_FALSE(p.checksums_ok);
        ASSERT_EQ(p.mismatches.size(), 1u);
        const auto& m = p.mismatches[0];
        EXPECT_EQ(m.file, "PEST_NL_2019.csv");
        EXPECT_EQ(m.row, source_row);
        EXPECT_EQ(m.column, "resVal");
        EXPECT_EQ(m.actual, "12345");
        found = true;
    }
    EXPECT_TRUE(found);
}

TEST_F(SmallStore, ChangedSourceIsDetected) {
    auto text = read_text_file(dir_ / "in/CC_DE_2012.csv");
    text.replace(text.find("C2,2"), 4, "C2,5");
    write_text_file(dir_ / "in/CC_DE_2012.csv", text);
    const auto r = validate();
    EXPECT_FALSE(r.ok());
}

TEST_F(SmallStore, ChecksumVerificationOnRead) {
    Store store(dir_ / "store");
    ASSERT_EQ(store.valid_partitions().size(), 2u);
    const auto before = store.checksum();
    EXPECT_EQ(Store(dir_ / "store").checksum(), before);

    const auto path = dir_ / "store/CC/DE/2012" / kCoreSamplesFile;
    write_text_file(path, read_text_file(path) + "\n");
    Store tampered(dir_ / "store");
    EXPECT_EQ(tampered.valid_partitions().size(), 1u);
    EXPECT_NE(tampered.checksum(), before);
    for (const auto& p : tampered.partitions())
        if (!p.valid) EXPECT_THROW(read_partition(p, true), Error);
}

TEST_F(SmallStore, ReingestIsByteIdentical) {
    const auto first = read_text_file(dir_ / "store" / kStoreFile);
    const auto manifest = read_text_file(dir_ / "store/PEST/NL/2019" / kManifestFile);
    auto opt = opt_;
    opt.overwrite = true;
    opt.jobs = 3;
    run_ingest(opt);
    EXPECT_EQ(read_text_file(dir_ / "store" / kStoreFile), first);
    EXPECT_EQ(read_text_file(dir_ / "store/PEST/NL/2019" / kManifestFile), manifest);
}

TEST_F(SmallStore, ExistingStoreNeedsOverwrite) { EXPECT_THROW(run_ingest(opt_), Error); }

TEST_F(SmallStore, HiddenDirectoriesAreIgnored) {
    fs::create_directories(dir_ / "store/.tmp-PEST-NL-2020/x");
    fs::create_directories(dir_ / "store/PEST/.tmp-partial");
    Store store(dir_ / "store");
    EXPECT_EQ(store.partitions().size(), 2u);
}

TEST_F(SmallStore, MissingManifestMarksInvalid) {
    fs::remove(dir_ / "store/CC/DE/2012" / kManifestFile);
    Store store(dir_ / "store");
    EXPECT_EQ(store.partitions().size(), 2u);
    EXPECT_EQ(store.valid_partitions().size(), 1u);
}

TEST_F(SmallStore, PartitionReadBack) {
    Store store(dir_ / "store");
    for (const auto* p : store.valid_partitions()) {
        const auto data = read_partition(*p);
        if (p->key.country != "DE") continue;
        EXPECT_EQ(p->key.year, 2012);
        EXPECT_EQ(data.samples.size(), 2u);
        ASSERT_EQ(data.results.size(), 3u);
        for (const auto& s : data.samples) {
            EXPECT_EQ(s.sampling_country, "DE");
            EXPECT_EQ(s.sampling_year, 2012);
            EXPECT_FALSE(s.origin_country);
            EXPECT_NE(std::find(s.derived.begin(), s.derived.end(), "sampling_year"), s.derived.end());
        }
    }
}

TEST_F(SmallStore, Selections) {
    Store store(dir_ / "store");
    const auto nc = read_selection(store, "noncompliant_results");
    ASSERT_EQ(nc.rows.size(), 1u);
    const auto ctx = read_selection(store, "results_with_sample_context", {.hazard = HazardCategory::PesticideResidues});
    EXPECT_EQ(ctx.rows.size(), 3u);
    const auto counts = read_selection(store, "per_year_hazard_counts");
    EXPECT_EQ(counts.rows.size(), 2u);
    EXPECT_THROW(read_selection(store, "nope"), Error);
}

TEST(StoreWrite, PartitionIsAtomicAndSorted) {
    TempDir dir;
    PartitionData data;
    data.key = {HazardCategory::VMPR, "IT", 2016};
    for (int i = 3; i > 0; --i) {
        Sample s;
        s.sample_id = "s" + std::to_string(i);
        s.product_id = "P";
        s.sampling_country = "IT";
        data.samples.push_back(s);
        AnalyticalResult r;
        r.result_id = "r" + std::to_string(i);
        r.sample_id = s.sample_id;
        r.contaminant_id = "C";
        r.hazard = HazardCategory::VMPR;
        r.source_file = "f.csv";
        r.source_row = static_cast<std::size_t>(i);
        data.results.push_back(r);
    }
    const auto m = write_partition(dir.path(), data, {});
    EXPECT_EQ(m.result_rows, 3u);
    EXPECT_EQ(m.checksums.size(), 4u);
    const auto core = read_csv_table(dir / "VMPR/IT/2016/core_results.csv");
    EXPECT_EQ(core.rows[0][0], "r1");
    EXPECT_EQ(core.rows[2][0], "r3");
    for (const auto& e : fs::directory_iterator(dir.path()))
        EXPECT_NE(e.path().filename().string().front(), '.') << e.path();
}

}  // namespace
}  // namespace chefs
