#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "waferbench/checkpoint.hpp"
#include "waferbench/errors.hpp"
#include "waferbench/hwcost.hpp"

using namespace waferbench;
using namespace waferbench::hwcost;

namespace {

// Constants fitted so that the perceptron and sequential LSTM rows land on
// the reference area/power cells. Mirrors configs/calibration.json.
CostTable calibrated() {
    return {1.0, 2688.0, 15241.325, 0.125, 41.75, 1.3625};
}

}  // namespace

TEST(Inventory, DenseHandCounts) {
    EXPECT_EQ(inventory(NetworkSpec::perceptron(152)), (Inventory{306, 1, 0}));
    auto nobias = NetworkSpec::perceptron(152);
    nobias.use_bias = false;
    EXPECT_EQ(inventory(nobias), (Inventory{304, 1, 0}));
    // 152*300 + 300*1 weights and 300 + 1 biases, two devices each.
    EXPECT_EQ(inventory(NetworkSpec::ann(152)), (Inventory{2 * (45900 + 301), 301, 0}));
    const std::size_t dnn_w = 152 * 300 + 300 * 50 + 50 * 100 + 100 * 1;
    const std::size_t dnn_b = 300 + 50 + 100 + 1;
    EXPECT_EQ(inventory(NetworkSpec::dnn(152)), (Inventory{2 * (dnn_w + dnn_b), dnn_b, 0}));
    EXPECT_EQ(inventory(NetworkSpec{}), (Inventory{0, 0, 0}));
}

TEST(Inventory, LstmHandCounts) {
    // Sequential: 4 gates x (4x1 input + 4x4 recurrent) + 4 head weights,
    // 4 gates x 4 biases + 1 head bias.
    EXPECT_EQ(inventory(LstmConfig::sequential(152)), (Inventory{2 * (84 + 17), 5, 16}));
    EXPECT_EQ(inventory(LstmConfig::windowed(152)), (Inventory{2 * (4 * 153 + 1 + 5), 2, 4}));
}

TEST(Inventory, SpatialPoolerCounts) {
    htm::SpatialPoolerConfig sp;
    sp.num_columns = 10;
    sp.active_columns = 2;
    sp.potential_fraction = 0.5;
    EXPECT_EQ(inventory(sp, 40), (Inventory{2 * (10 * 20 + 10 + 1), 11, 0}));
}

TEST(Estimate, ZeroAndLinear) {
    const auto t = calibrated();
    const auto z = estimate(Inventory{}, t);
    EXPECT_EQ(z.area_um2, 0.0);
    EXPECT_EQ(z.power_mw, 0.0);
    const auto e = estimate(Inventory{2, 1, 1}, t);
    EXPECT_DOUBLE_EQ(e.area_um2, 2.0 + 2688.0 + 15241.325);
    CostTable bad;
    bad.neuron_area_um2 = -1.0;
    EXPECT_THROW(estimate(Inventory{}, bad), ConfigError);
}

TEST(Estimate, CalibrationReproducesPublishedCells) {
    const auto t = calibrated();
    char buf[64];
    const auto p = estimate(inventory(NetworkSpec::perceptron(152)), t);
    std::snprintf(buf, sizeof buf, "%.2f %.2f", p.area_um2, p.power_mw);
    EXPECT_STREQ(buf, "2994.00 80.00");
    const auto l = estimate(inventory(LstmConfig::sequential(152)), t);
    std::snprintf(buf, sizeof buf, "%.2f %.2f", l.area_um2, l.power_mw);
    EXPECT_STREQ(buf, "257503.20 255.80");
}

TEST(Checkpoint, DenseRoundTripIsBitExact) {
    for (const auto& spec : {NetworkSpec::perceptron(7), NetworkSpec::dnn(9)}) {
        DenseModel m{spec, init_params(spec, 5)};
        m.params.layers[0].bias[0] = 0.1 + 0.2;
        std::stringstream ss;
        save_checkpoint(ss, m);
        const auto text = ss.str();
        const auto back = load_checkpoint(ss);
        ASSERT_TRUE(std::holds_alternative<DenseModel>(back));
        EXPECT_EQ(std::get<DenseModel>(back), m);
        std::ostringstream again;
        save_checkpoint(again, back);
        EXPECT_EQ(again.str(), text);
    }
}

TEST(Checkpoint, LstmRoundTripIsBitExact) {
    for (const auto& cfg : {LstmConfig::sequential(12, 3), LstmConfig::windowed(12)}) {
        LstmModel m{cfg, init_lstm_params(cfg, 6)};
        std::stringstream ss;
        save_checkpoint(ss, m);
        const auto back = load_checkpoint(ss);
        ASSERT_TRUE(std::holds_alternative<LstmModel>(back));
        EXPECT_EQ(std::get<LstmModel>(back), m);
    }
}

TEST(Checkpoint, RejectsBadInput) {
    std::istringstream empty("");
    EXPECT_THROW(load_checkpoint(empty), CheckpointError);
    std::istringstream version("waferbench-checkpoint 99\nkind dense\n");
    EXPECT_THROW(load_checkpoint(version), CheckpointError);
    std::istringstream kind("waferbench-checkpoint 1\nkind tree\n");
    EXPECT_THROW(load_checkpoint(kind), CheckpointError);

    std::stringstream ss;
    save_checkpoint(ss, Model{DenseModel{NetworkSpec::perceptron(3), init_params(NetworkSpec::perceptron(3), 1)}});
    auto text = ss.str();
    std::istringstream truncated(text.substr(0, text.size() / 2));
    EXPECT_THROW(load_checkpoint(truncated), CheckpointError);
    EXPECT_THROW(load_checkpoint(std::filesystem::path("/nonexistent/ck.txt")), CheckpointError);
}
