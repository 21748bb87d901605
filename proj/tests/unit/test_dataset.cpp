#include <filesystem>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "waferbench/dataset.hpp"
#include "waferbench/errors.hpp"

using namespace waferbench;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("wb_dataset_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path file(const std::string& name, const std::string& body) {
        const auto p = dir_ / name;
        oracle::write_text(p, body);
        return p;
    }
    fs::path dir_;
};

using Dataset = TempDir;

}  // namespace

TEST_F(Dataset, MinimalRow) {
    const auto recs = load_ucr_split(file("a.csv", "1,0.0,0.0\n"));
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].label, 1);
    EXPECT_EQ(recs[0].values, (std::vector<double>{0.0, 0.0}));
}

TEST_F(Dataset, DetectsTabsAndWhitespace) {
    auto tab = load_ucr_split(file("t.tsv", "-1\t1.5\t2\n1\t3\t4\n"));
    ASSERT_EQ(tab.size(), 2u);
    EXPECT_EQ(tab[0].label, -1);
    EXPECT_DOUBLE_EQ(tab[1].values[1], 4.0);
    auto ws = load_ucr_split(file("w.txt", "  -1   1.5e0  2\n 1  3 4  \n"));
    EXPECT_EQ(ws[0].values, tab[0].values);
    EXPECT_EQ(ws[1].source_index, 1u);
}

TEST_F(Dataset, SkipsBlankLinesAndCrlf) {
    auto recs = load_ucr_split(file("c.csv", "1,1,2\r\n\r\n-1,3,4\r\n"));
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_DOUBLE_EQ(recs[1].values[1], 4.0);
}

TEST_F(Dataset, RejectsMalformedRows) {
    EXPECT_THROW(load_ucr_split(file("r.csv", "1,1,2\n1,1\n")), DatasetError);
    EXPECT_THROW(load_ucr_split(file("n.csv", "1,1,abc\n")), DatasetError);
    EXPECT_THROW(load_ucr_split(file("l.csv", "2,1,1\n")), DatasetError);
    EXPECT_THROW(load_ucr_split(file("e.csv", "1\n")), DatasetError);
    EXPECT_THROW(load_ucr_split(dir_ / "missing.csv"), DatasetError);
}

TEST_F(Dataset, TruncatesToSeriesLength) {
    const auto p = file("t.csv", "1,1,2,3\n-1,4,5,6\n");
    auto recs = load_ucr_split(p, std::nullopt, 2);
    EXPECT_EQ(recs[1].values, (std::vector<double>{4.0, 5.0}));
    EXPECT_THROW(load_ucr_split(p, std::nullopt, 4), DatasetError);
}

TEST_F(Dataset, LoadChecksPairing) {
    const auto a = file("a.csv", "1,1,2\n");
    const auto b = file("b.csv", "1,1,2,3\n");
    const auto empty = file("e.csv", "\n");
    EXPECT_THROW(load_ucr(a, a), DatasetError);
    EXPECT_THROW(load_ucr(a, b), DatasetError);
    EXPECT_THROW(load_ucr(a, empty), DatasetError);
    EXPECT_THROW(load_ucr(a, dir_ / "nope.csv"), DatasetError);
    auto d = load_ucr(a, b, std::nullopt, 2);
    EXPECT_EQ(d.series_length, 2u);
}

TEST(DatasetBalance, CountsLabels) {
    SplitDataset d;
    d.train = {{1, {0.0}, 0}};
    d.test = {{1, {0.0}, 0}, {-1, {0.0}, 1}, {1, {0.0}, 2}, {1, {0.0}, 3}};
    const auto b = class_balance(d);
    EXPECT_DOUBLE_EQ(b.train_normal_fraction, 1.0);
    EXPECT_DOUBLE_EQ(b.test_normal_fraction, 0.75);
    EXPECT_THROW(normal_fraction({}), DatasetError);
}

TEST(DatasetScale, DefinitionExample) {
    SplitDataset d;
    d.train = {{1, {4.0, -2.0, 1.0}, 0}};
    d.test = {{-1, {8.0, -4.0, 0.0}, 0}};
    EXPECT_DOUBLE_EQ(scale_factor(d, 0.5), 0.125);
    const auto s = scale_inputs(d, 0.5);
    EXPECT_EQ(s.train[0].values, (std::vector<double>{0.5, -0.25, 0.125}));
    // Test values beyond the train maximum are not clipped.
    EXPECT_DOUBLE_EQ(s.test[0].values[0], 1.0);
    EXPECT_THROW(scale_inputs(d, 0.0), DatasetError);
    SplitDataset zero;
    zero.train = {{1, {0.0, 0.0}, 0}};
    EXPECT_THROW(scale_inputs(zero, 0.5), DatasetError);
}

TEST(DatasetScale, TrainMaximumLandsExactlyOnTarget) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SplitDataset d;
        d.train = oracle::synthetic_split(50, 40, seed);
        d.test = oracle::synthetic_split(20, 40, seed + 100);
        for (double target : {0.1, 0.5, 0.3}) {
            const auto s = scale_inputs(d, target);
            EXPECT_EQ(max_abs_value(s.train), target);
        }
    }
}

TEST_F(Dataset, WriteRoundTripIsExact) {
    auto recs = oracle::synthetic_split(7, 13, 3);
    const auto p = dir_ / "rt.csv";
    write_ucr_split(p, recs);
    EXPECT_EQ(load_ucr_split(p), recs);
    write_ucr_split(p, recs, '\t');
    EXPECT_EQ(load_ucr_split(p), recs);
}

TEST_F(Dataset, FindsWaferFiles) {
    EXPECT_FALSE(find_wafer_files(dir_));
    file("Wafer_TRAIN.tsv", "1\t1\n");
    file("Wafer_TEST.tsv", "1\t1\n");
    const auto found = find_wafer_files(dir_);
    ASSERT_TRUE(found);
    EXPECT_EQ(found->first.filename(), "Wafer_TRAIN.tsv");
}
