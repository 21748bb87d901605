// Drives the built waferbench executable end to end on a small synthetic
// fixture: byte-identical reruns and the exit code contract.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "oracles.hpp"
#include "waferbench/dataset.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root_ = fs::temp_directory_path() / ("wb_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(root_);
        fs::create_directories(root_);
        waferbench::write_ucr_split(root_ / "train.csv", oracle::synthetic_split(80, 40, 1, 0.25));
        waferbench::write_ucr_split(root_ / "test.csv", oracle::synthetic_split(60, 40, 2, 0.25));
        config_ = root_ / "config.json";
        oracle::write_text(config_, R"({
  "architecture": "perceptron",
  "seed": 5,
  "dataset": {"train": ")" + (root_ / "train.csv").string() + R"(", "test": ")" +
                                        (root_ / "test.csv").string() + R"(", "series_length": 40},
  "train": {"epochs": 2},
  "network": {"ann_hidden": 8},
  "htm": {"num_columns": 64, "active_columns": 4},
  "analog": {"table2_indices": [1, 2, 60], "fig2_index": 3},
  "cost": {"memristor_area_um2": 1.0, "neuron_area_um2": 2688.0, "gate_block_area_um2": 15241.325,
           "memristor_power_mw": 0.125, "neuron_power_mw": 41.75, "gate_block_power_mw": 1.3625}
}
)");
    }
    static void TearDownTestSuite() { fs::remove_all(root_); }

    static int run(const std::string& args) {
        const std::string cmd = std::string(WAFERBENCH_CLI) + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string out(const std::string& name) { return (root_ / name).string(); }
    static std::string cfg() { return "--config " + config_.string(); }

    static void expect_same(const std::string& a, const std::string& b, const std::string& file) {
        ASSERT_TRUE(fs::exists(fs::path(a) / file)) << a << "/" << file;
        EXPECT_EQ(oracle::read_text(fs::path(a) / file), oracle::read_text(fs::path(b) / file)) << file;
    }

    static inline fs::path root_;
    static inline fs::path config_;
};

}  // namespace

TEST_F(Cli, TrainIsByteIdentical) {
    for (const std::string arch : {"perceptron", "ann", "dnn", "lstm_sequential", "lstm_windowed", "htm"}) {
        const auto a = out("train_a_" + arch), b = out("train_b_" + arch);
        ASSERT_EQ(run("train " + cfg() + " --arch " + arch + " --out " + a), 0) << arch;
        ASSERT_EQ(run("train " + cfg() + " --arch " + arch + " --out " + b), 0) << arch;
        expect_same(a, b, "metrics.json");
        if (arch != "htm") expect_same(a, b, "checkpoint.txt");
        EXPECT_TRUE(fs::exists(fs::path(a) / "report.json"));
    }
}

TEST_F(Cli, CheckpointSubcommandsAreByteIdentical) {
    const auto model = out("seq_model");
    ASSERT_EQ(run("train " + cfg() + " --arch lstm_sequential --out " + model), 0);
    const auto ck = (fs::path(model) / "checkpoint.txt").string();
    const std::string lstm = cfg() + " --arch lstm_sequential --checkpoint " + ck;
    for (const std::string sub : {"eval", "analog", "table2", "fig2"}) {
        const auto a = out(sub + "_a"), b = out(sub + "_b");
        ASSERT_EQ(run(sub + " " + lstm + " --out " + a), 0) << sub;
        ASSERT_EQ(run(sub + " " + lstm + " --out " + b), 0) << sub;
        expect_same(a, b, "metrics.json");
    }
    expect_same(out("analog_a"), out("analog_b"), "agreement.csv");
    expect_same(out("table2_a"), out("table2_b"), "table2.csv");
    expect_same(out("fig2_a"), out("fig2_b"), "fig2.csv");
    expect_same(out("fig2_a"), out("fig2_b"), "fig2_long.csv");
    // eval reproduces the trained model's metrics.
    const auto trained = nlohmann::json::parse(oracle::read_text(fs::path(model) / "metrics.json"));
    const auto evaluated = nlohmann::json::parse(oracle::read_text(fs::path(out("eval_a")) / "metrics.json"));
    EXPECT_EQ(trained["test"], evaluated["test"]);
    EXPECT_EQ(trained["train"], evaluated["train"]);
    const auto t2 = oracle::read_text(fs::path(out("table2_a")) / "table2.csv");
    EXPECT_EQ(std::count(t2.begin(), t2.end(), '\n'), 4);
    const auto f2 = oracle::read_text(fs::path(out("fig2_a")) / "fig2.csv");
    EXPECT_EQ(std::count(f2.begin(), f2.end(), '\n'), 41);
}

TEST_F(Cli, CostAndTable1) {
    ASSERT_EQ(run("cost " + cfg() + " --series-length 152 --out " + out("cost_a")), 0);
    ASSERT_EQ(run("cost " + cfg() + " --series-length 152 --out " + out("cost_b")), 0);
    expect_same(out("cost_a"), out("cost_b"), "cost.json");
    EXPECT_NE(oracle::read_text(fs::path(out("cost_a")) / "cost.json").find("\"memristor_count\": 306"),
              std::string::npos);

    ASSERT_EQ(run("table1 " + cfg() + " --series-length 152 --cost-only --out " + out("t1c")), 0);
    const auto csv = oracle::read_text(fs::path(out("t1c")) / "table1.csv");
    EXPECT_NE(csv.find("perceptron,,,2994.00,80.00,calibrated"), std::string::npos);
    EXPECT_NE(csv.find("lstm_sequential,,,257503.20,255.80,calibrated"), std::string::npos);

    ASSERT_EQ(run("table1 " + cfg() + " --out " + out("t1a")), 0);
    ASSERT_EQ(run("table1 " + cfg() + " --out " + out("t1b")), 0);
    expect_same(out("t1a"), out("t1b"), "table1.csv");
    expect_same(out("t1a"), out("t1b"), "metrics.json");
    const auto full = oracle::read_text(fs::path(out("t1a")) / "table1.csv");
    EXPECT_EQ(std::count(full.begin(), full.end(), '\n'), 7);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("train " + cfg() + " --out " + out("ok")), 0);
    EXPECT_EQ(run("train " + cfg() + " --out " + out("ok")), 5);

    const auto bad = root_ / "bad.json";
    oracle::write_text(bad, R"({"architecture": "perceptron"})");
    EXPECT_EQ(run("train --config " + bad.string() + " --out " + out("e1")), 2);
    oracle::write_text(bad, "{ not json");
    EXPECT_EQ(run("train --config " + bad.string() + " --out " + out("e2")), 2);
    EXPECT_EQ(run("train " + cfg() + " --arch svm --out " + out("e3")), 2);
    EXPECT_EQ(run("train " + cfg() + " --no-such-flag"), 2);
    EXPECT_EQ(run(""), 2);

    EXPECT_EQ(run("train " + cfg() + " --train " + out("missing.csv") + " --out " + out("e4")), 3);
    EXPECT_EQ(run("train " + cfg() + " --series-length 41 --out " + out("e5")), 3);

    EXPECT_EQ(run("train " + cfg() + " --arch lstm_windowed --lr 1e308 --out " + out("e6")), 4);

    const auto dense = out("dense_model");
    ASSERT_EQ(run("train " + cfg() + " --out " + dense), 0);
    const auto ck = (fs::path(dense) / "checkpoint.txt").string();
    EXPECT_EQ(run("fig2 " + cfg() + " --checkpoint " + ck + " --out " + out("e7")), 2);
    EXPECT_EQ(run("table2 " + cfg() + " --arch lstm_sequential --checkpoint " + ck + " --out " + out("e8")), 2);
}
