#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "waferbench/lstm.hpp"
#include "waferbench/nn.hpp"
#include "waferbench/random.hpp"
#include "waferbench/tensor.hpp"

namespace waferbench::crossbar {

struct DeviceModel {
    double g_min = 1e-6;  // siemens
    double g_max = 1e-4;
    std::optional<int> levels;       // nullopt = continuous
    double read_noise_sigma = 0.01;  // relative to each device's conductance
    double gain_error_sigma = 0.01;  // relative, per output column

    void validate() const;

    // Continuous levels, no noise, unit gain.
    static DeviceModel ideal();
};

// Output scale so that an ideal output of +-1 reads as +-500 mV.
inline constexpr double default_output_scale_mv = 500.0;

// Differential pair encoding of one weight matrix: w ~ (g_plus - g_minus).
struct CrossbarProgram {
    Matrix g_plus;
    Matrix g_minus;
    double w_max = 0.0;
    double output_scale_mv = default_output_scale_mv;
    Vector column_gain;  // one multiplicative gain per output line

    std::size_t rows() const { return g_plus.rows; }
    std::size_t cols() const { return g_plus.cols; }
};

// Per-matrix normalization by w_max = max|W|; positive weights go on g_plus,
// negative on g_minus, the partner device stays at g_min. Conductances are
// then snapped to `levels` uniform steps. Column gains are drawn from
// gain_seed.
CrossbarProgram program_weights(const Matrix& weights, const DeviceModel& device,
                                double output_scale_mv = default_output_scale_mv, std::uint64_t gain_seed = 0);

// Weight matrix the program represents without read noise or gain error.
Matrix reconstruct_weights(const CrossbarProgram& program, const DeviceModel& device);

// y_j = gain_j * sum_i (g+ - g- + read noise) x_i, converted back to weight
// units and scaled to millivolts. Noise comes from `noise`.
Vector analog_matvec(const CrossbarProgram& program, const DeviceModel& device, std::span<const double> x,
                     Rng& noise);
Vector analog_matvec(const CrossbarProgram& program, const DeviceModel& device, std::span<const double> x,
                     std::uint64_t noise_seed);

// Dense network on crossbars. Each layer is one crossbar over [W | b] driven
// by [x, 1].
struct AnalogDense {
    NetworkSpec spec;
    std::vector<CrossbarProgram> layers;
};

// LSTM on crossbars: one crossbar per gate over [W | U | b] driven by
// [x, h, 1], plus one for the read-out head.
struct AnalogLstm {
    LstmConfig config;
    std::array<CrossbarProgram, gate_count> gates;
    CrossbarProgram head;
};

AnalogDense compile_dense(const NetworkSpec& spec, const Parameters& params, const DeviceModel& device,
                          double output_scale_mv = default_output_scale_mv, std::uint64_t gain_seed = 0);
AnalogLstm compile_lstm(const LstmConfig& config, const LstmParams& params, const DeviceModel& device,
                        double output_scale_mv = default_output_scale_mv, std::uint64_t gain_seed = 0);

// Scalar prediction in millivolts. The noise stream is derived from
// (noise_seed, stream) so the evaluation order of records never matters.
double analog_forward(const AnalogDense& net, const DeviceModel& device, std::span<const double> x,
                      std::uint64_t noise_seed, std::uint64_t stream = 0);
double analog_forward(const AnalogLstm& net, const DeviceModel& device, std::span<const double> series,
                      std::uint64_t noise_seed, std::uint64_t stream = 0);

// Per-step hidden outputs of the analog LSTM in millivolts (time_steps x hidden).
Matrix analog_unit_traces(const AnalogLstm& net, const DeviceModel& device, std::span<const double> series,
                          std::uint64_t noise_seed, std::uint64_t stream = 0);

struct AgreementRow {
    std::size_t index = 0;
    double analog_mv = 0.0;
    double software = 0.0;
    bool sign_agree = false;
    int label = 0;
};

struct AgreementReport {
    std::vector<AgreementRow> rows;

    double agreement() const;  // 1.0 for an empty report
};

AgreementReport agreement_report(std::span<const double> analog_mv, std::span<const double> software,
                                 std::span<const int> labels, std::span<const std::size_t> indices = {});

// CSV `index,analog_mv,software,sign_agree,class`.
void write_agreement_csv(std::ostream& out, const AgreementReport& report);

// CSV `t,unit,analog_mv,software`, one row per (step, unit).
void write_trace_long_csv(std::ostream& out, const Matrix& analog_mv, const Matrix& software);

// CSV `t,analog_mv_h1..N,software_h1..N`, one row per step.
void write_trace_wide_csv(std::ostream& out, const Matrix& analog_mv, const Matrix& software);

}  // namespace waferbench::crossbar
