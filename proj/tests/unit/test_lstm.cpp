#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "waferbench/errors.hpp"
#include "waferbench/lstm.hpp"

using namespace waferbench;

namespace {

LstmParams random_params(const LstmConfig& cfg, std::uint64_t seed, double scale = 0.8) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    auto p = zero_lstm_params(cfg);
    oracle::for_each_param(p, [&](double& v) { v = u(gen); });
    return p;
}

std::vector<double> random_series(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    return v;
}

double lstm_loss(const LstmParams& p, const LstmConfig& cfg, const std::vector<double>& series, double target) {
    const double y = oracle::lstm_forward(p, cfg, series).y;
    return 0.5 * (y - target) * (y - target);
}

}  // namespace

TEST(LstmConfig, Modes) {
    const auto seq = LstmConfig::sequential(152);
    EXPECT_EQ(seq.input_dim, 1u);
    EXPECT_EQ(seq.hidden_dim, 4u);
    EXPECT_EQ(seq.time_steps, 152u);
    const auto win = LstmConfig::windowed(152);
    EXPECT_EQ(win.input_dim, 152u);
    EXPECT_EQ(win.hidden_dim, 1u);
    EXPECT_EQ(win.time_steps, 1u);
    EXPECT_EQ(parse_lstm_mode("parallel"), LstmMode::windowed);
    EXPECT_THROW(parse_lstm_mode("bidirectional"), ConfigError);
    LstmConfig bad{152, 1, 2, LstmMode::windowed};
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(LstmInit, ForgetBiasAndOrthogonalRecurrence) {
    const auto cfg = LstmConfig::sequential(20, 4);
    const auto p = init_lstm_params(cfg, 3);
    EXPECT_EQ(p.cell.gates[forget_gate].bias, Vector(4, 1.0));
    EXPECT_EQ(p.cell.gates[input_gate].bias, Vector(4, 0.0));
    for (const auto& g : p.cell.gates) {
        const auto& u = g.recurrent_weights;
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                double s = 0.0;
                for (std::size_t k = 0; k < 4; ++k) s += u(a, k) * u(b, k);
                EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-12);
            }
        }
    }
    EXPECT_EQ(p, init_lstm_params(cfg, 3));
    EXPECT_EQ(p.weight_count(), 4u * (4 + 16) + 4);
    EXPECT_EQ(p.bias_count(), 17u);
}

TEST(LstmCell, ZeroParameters) {
    const auto cfg = LstmConfig::sequential(5, 3);
    const auto p = zero_lstm_params(cfg);
    const Vector zero(3, 0.0);
    const auto s = cell_forward(p.cell, std::vector<double>{0.7}, zero, zero);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(s.input[j], 0.5);
        EXPECT_EQ(s.forget[j], 0.5);
        EXPECT_EQ(s.output[j], 0.5);
        EXPECT_EQ(s.candidate[j], 0.0);
        EXPECT_EQ(s.c[j], 0.0);
        EXPECT_EQ(s.h[j], 0.0);
    }
}

TEST(LstmCell, SaturatedGatesHoldMemory) {
    const auto cfg = LstmConfig::sequential(5, 2);
    auto p = random_params(cfg, 1);
    p.cell.gates[forget_gate].bias.assign(2, 60.0);
    p.cell.gates[input_gate].bias.assign(2, -60.0);
    const Vector c_prev{0.3, -0.7};
    const auto s = cell_forward(p.cell, std::vector<double>{0.2}, Vector{0.1, -0.1}, c_prev);
    EXPECT_NEAR(s.c[0], 0.3, 1e-12);
    EXPECT_NEAR(s.c[1], -0.7, 1e-12);
}

TEST(LstmCell, MatchesScalarOracle) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const LstmConfig cfg{3, 2, 6, LstmMode::sequential};
        const auto p = random_params(cfg, seed);
        const auto series = random_series(cfg.series_length(), seed + 1000);
        const auto state = unroll_forward(p.cell, cfg, series);
        const auto want = oracle::lstm_forward(p, cfg, series);
        ASSERT_EQ(state.steps.size(), 6u);
        for (std::size_t t = 0; t < 6; ++t) {
            for (std::size_t j = 0; j < 2; ++j) {
                EXPECT_LE(oracle::relative_error(state.steps[t].h[j], want.h[t][j], 1e-300), 1e-12);
            }
        }
        EXPECT_LE(oracle::relative_error(predict(p, cfg, series), want.y, 1e-300), 1e-12);
    }
}

TEST(LstmUnroll, StepCounts) {
    const auto seq = LstmConfig::sequential(152);
    const auto win = LstmConfig::windowed(152);
    const auto series = random_series(152, 4);
    EXPECT_EQ(unroll_forward(init_lstm_params(seq, 1).cell, seq, series).steps.size(), 152u);
    EXPECT_EQ(unroll_forward(init_lstm_params(win, 1).cell, win, series).steps.size(), 1u);
    const auto zero = zero_lstm_params(seq);
    EXPECT_EQ(unroll_forward(zero.cell, seq, std::vector<double>(152, 0.0)).final_h(), Vector(4, 0.0));
    EXPECT_THROW(unroll_forward(zero.cell, seq, std::vector<double>(151, 0.0)), ShapeError);
}

TEST(LstmHead, ZeroStateGivesBias) {
    DenseHead head{{0.3, -0.2}, 0.25};
    EXPECT_EQ(output_layer(Vector{0.0, 0.0}, head), 0.25);
}

TEST(Bptt, FiniteDifferenceSequential) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const LstmConfig cfg{1, 2, 3, LstmMode::sequential};
        const auto p = random_params(cfg, seed);
        const auto series = random_series(3, seed + 50);
        const double target = seed % 2 ? 1.0 : -1.0;
        const auto analytic = oracle::flatten(bptt(p, cfg, unroll_forward(p.cell, cfg, series), target));
        const auto numeric = oracle::numeric_gradient<LstmParams>(
            p, [&](const LstmParams& q) { return lstm_loss(q, cfg, series, target); });
        EXPECT_LT(oracle::max_relative_error(analytic, numeric), 1e-4) << "seed " << seed;
    }
}

TEST(Bptt, FiniteDifferenceWindowedAndWide) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (const LstmConfig& cfg : {LstmConfig{8, 1, 1, LstmMode::windowed}, LstmConfig{2, 3, 4, LstmMode::sequential}}) {
            const auto p = random_params(cfg, seed + 7);
            const auto series = random_series(cfg.series_length(), seed + 70);
            const auto analytic = oracle::flatten(bptt(p, cfg, unroll_forward(p.cell, cfg, series), -1.0));
            const auto numeric = oracle::numeric_gradient<LstmParams>(
                p, [&](const LstmParams& q) { return lstm_loss(q, cfg, series, -1.0); });
            EXPECT_LT(oracle::max_relative_error(analytic, numeric), 1e-4);
        }
    }
}

TEST(Bptt, ZeroResidualAndWindowedIsOneStep) {
    const LstmConfig cfg{1, 2, 5, LstmMode::sequential};
    const auto p = random_params(cfg, 2);
    const auto series = random_series(5, 3);
    const auto state = unroll_forward(p.cell, cfg, series);
    const double y = output_layer(state.final_h(), p.head);
    EXPECT_EQ(squared_norm(bptt(p, cfg, state, y)), 0.0);

    // A windowed gradient is the one-step gradient of the same cell.
    const LstmConfig win{5, 2, 1, LstmMode::windowed};
    const LstmConfig one{5, 2, 1, LstmMode::sequential};
    const auto pw = random_params(win, 4);
    const auto gw = bptt(pw, win, unroll_forward(pw.cell, win, series), 1.0);
    const auto g1 = bptt(pw, one, unroll_forward(pw.cell, one, series), 1.0);
    EXPECT_EQ(gw, g1);
}

TEST(Bptt, ClippingBoundsGlobalNorm) {
    const LstmConfig cfg{1, 3, 10, LstmMode::sequential};
    const auto p = random_params(cfg, 5, 3.0);
    const auto state = unroll_forward(p.cell, cfg, random_series(10, 6));
    const auto raw = bptt(p, cfg, state, 50.0);
    ASSERT_GT(std::sqrt(squared_norm(raw)), 0.01);
    const auto clipped = bptt(p, cfg, state, 50.0, 0.01);
    EXPECT_NEAR(std::sqrt(squared_norm(clipped)), 0.01, 1e-12);
    const auto loose = bptt(p, cfg, state, 50.0, 1e9);
    EXPECT_EQ(loose, raw);
}

TEST(LstmTraining, DefaultsAndDeterminism) {
    EXPECT_EQ(default_lstm_train_config(LstmConfig::sequential(152)).gradient_clip_norm, 5.0);
    EXPECT_FALSE(default_lstm_train_config(LstmConfig::windowed(152)).gradient_clip_norm);

    const auto data = oracle::synthetic_split(40, 12, 3);
    const auto cfg = LstmConfig::sequential(12, 2);
    TrainConfig tc;
    tc.epochs = 2;
    tc.seed = 9;
    const auto a = train_lstm(cfg, data, tc);
    EXPECT_EQ(a.updates, 80u);
    EXPECT_EQ(a.params, train_lstm(cfg, data, tc).params);
}

TEST(LstmTraining, WindowedLearnsSeparableSeries) {
    const auto tr = oracle::synthetic_split(300, 24, 11, 0.3);
    const auto te = oracle::synthetic_split(200, 24, 12, 0.3);
    const auto cfg = LstmConfig::windowed(24, 1);
    TrainConfig tc;
    tc.epochs = 30;
    tc.learning_rate = 0.05;
    tc.seed = 1;
    const auto r = train_lstm(cfg, tr, tc);
    EXPECT_LT(r.trace.back().mean_loss, r.trace.front().mean_loss);
    EXPECT_GE(evaluate(r.params, cfg, te).accuracy(), 0.95);
}

TEST(LstmTraces, ShapeBoundsAndCsv) {
    const auto cfg = LstmConfig::sequential(152);
    const auto p = init_lstm_params(cfg, 8);
    const auto series = random_series(152, 9);
    const auto tr = export_unit_traces(p, cfg, series);
    EXPECT_EQ(tr.rows, 152u);
    EXPECT_EQ(tr.cols, 4u);
    for (double v : tr.data) {
        EXPECT_GT(v, -1.0);
        EXPECT_LT(v, 1.0);
    }
    const auto z = export_unit_traces(zero_lstm_params(cfg), cfg, series);
    for (double v : z.data) EXPECT_EQ(v, 0.0);

    std::ostringstream csv;
    write_unit_traces_csv(csv, tr);
    const auto text = csv.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "t,h1,h2,h3,h4");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 153);
}
