#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "waferbench/dataset.hpp"
#include "waferbench/metrics.hpp"
#include "waferbench/tensor.hpp"
#include "waferbench/training.hpp"

namespace waferbench {

enum class LstmMode { sequential, windowed };

std::string_view to_string(LstmMode m);
LstmMode parse_lstm_mode(std::string_view name);

struct LstmConfig {
    std::size_t input_dim = 1;
    std::size_t hidden_dim = 4;
    std::size_t time_steps = 152;
    LstmMode mode = LstmMode::sequential;

    std::size_t series_length() const { return input_dim * time_steps; }
    void validate() const;

    // One sample per step, `hidden` units.
    static LstmConfig sequential(std::size_t series_length, std::size_t hidden = 4);
    // Whole series as one step.
    static LstmConfig windowed(std::size_t series_length, std::size_t hidden = 1);

    bool operator==(const LstmConfig&) const = default;
};

enum Gate : std::size_t { input_gate = 0, forget_gate = 1, output_gate = 2, candidate_gate = 3 };
inline constexpr std::size_t gate_count = 4;

struct GateParams {
    Matrix input_weights;      // hidden x input
    Matrix recurrent_weights;  // hidden x hidden
    Vector bias;               // hidden

    bool operator==(const GateParams&) const = default;
};

struct LstmCellParams {
    std::array<GateParams, gate_count> gates;

    std::size_t input_dim() const { return gates[0].input_weights.cols; }
    std::size_t hidden_dim() const { return gates[0].input_weights.rows; }

    bool operator==(const LstmCellParams&) const = default;
};

// Linear read-out y = w.h + b.
struct DenseHead {
    Vector weights;
    double bias = 0.0;

    bool operator==(const DenseHead&) const = default;
};

struct LstmParams {
    LstmCellParams cell;
    DenseHead head;

    std::size_t weight_count() const;
    std::size_t bias_count() const;
    bool operator==(const LstmParams&) const = default;
};

using LstmGradients = LstmParams;

// Everything one time step needs for BPTT.
struct CellStep {
    Vector x, h_prev, c_prev;
    Vector input, forget, output, candidate;  // gate activations
    Vector c, tanh_c, h;
};

struct LstmState {
    std::vector<CellStep> steps;

    const Vector& final_h() const { return steps.back().h; }
};

LstmParams zero_lstm_params(const LstmConfig& config);

// Input weights and the head are Glorot-uniform, recurrent weights orthogonal,
// biases zero except the forget gate which starts at 1.
LstmParams init_lstm_params(const LstmConfig& config, std::uint64_t seed);

void check_shapes(const LstmConfig& config, const LstmParams& params);

// i, f, o = sigmoid(W x + U h + b); candidate = tanh(...); c = f*c_prev + i*candidate;
// h = o * tanh(c)
CellStep cell_forward(const LstmCellParams& cell, std::span<const double> x, std::span<const double> h_prev,
                      std::span<const double> c_prev);

// Runs the cell over the series from zero state.
LstmState unroll_forward(const LstmCellParams& cell, const LstmConfig& config, std::span<const double> series);

double output_layer(std::span<const double> h_final, const DenseHead& head);

double predict(const LstmParams& params, const LstmConfig& config, std::span<const double> series);

// Gradient of 0.5*(y - target)^2, summed over time steps. With clip_norm set
// the whole gradient is rescaled to that global L2 norm at most.
LstmGradients bptt(const LstmParams& params, const LstmConfig& config, const LstmState& state, double target,
                   std::optional<double> clip_norm = std::nullopt);

double squared_norm(const LstmGradients& g);
void scale(LstmGradients& g, double factor);
void sgd_step_inplace(LstmParams& params, const LstmGradients& grads, double learning_rate);
LstmParams sgd_step(const LstmParams& params, const LstmGradients& grads, double learning_rate);

// Default clip is 5.0 in sequential mode and none in windowed mode.
TrainConfig default_lstm_train_config(const LstmConfig& config);

TrainResult<LstmParams> train_lstm(const LstmConfig& config, const std::vector<TimeSeriesRecord>& records,
                                   const TrainConfig& train_config);

TrainResult<LstmParams> train_lstm_from(const LstmConfig& config, LstmParams params,
                                        const std::vector<TimeSeriesRecord>& records,
                                        const TrainConfig& train_config);

Metrics evaluate(const LstmParams& params, const LstmConfig& config, const std::vector<TimeSeriesRecord>& records);

// time_steps x hidden_dim matrix of h_t.
Matrix export_unit_traces(const LstmParams& params, const LstmConfig& config, std::span<const double> series);

// CSV `t,h1,...,hN`, t starting at 1.
void write_unit_traces_csv(std::ostream& out, const Matrix& traces);

}  // namespace waferbench
