#include "waferbench/lstm.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "waferbench/activation.hpp"
#include "waferbench/errors.hpp"
#include "waferbench/random.hpp"

namespace waferbench {

std::string_view to_string(LstmMode m) { return m == LstmMode::windowed ? "windowed" : "sequential"; }

LstmMode parse_lstm_mode(std::string_view name) {
    if (name == "sequential") return LstmMode::sequential;
    if (name == "windowed" || name == "parallel") return LstmMode::windowed;
    throw ConfigError("unknown LSTM mode '" + std::string(name) + "'");
}

void LstmConfig::validate() const {
    if (input_dim == 0 || hidden_dim == 0 || time_steps == 0) {
        throw ConfigError("LSTM dimensions must be positive");
    }
    if (mode == LstmMode::windowed && time_steps != 1) throw ConfigError("windowed LSTM runs exactly one step");
}

LstmConfig LstmConfig::sequential(std::size_t series_length, std::size_t hidden) {
    return {1, hidden, series_length, LstmMode::sequential};
}

LstmConfig LstmConfig::windowed(std::size_t series_length, std::size_t hidden) {
    return {series_length, hidden, 1, LstmMode::windowed};
}

std::size_t LstmParams::weight_count() const {
    std::size_t n = head.weights.size();
    for (const auto& g : cell.gates) n += g.input_weights.size() + g.recurrent_weights.size();
    return n;
}

std::size_t LstmParams::bias_count() const {
    std::size_t n = 1;
    for (const auto& g : cell.gates) n += g.bias.size();
    return n;
}

LstmParams zero_lstm_params(const LstmConfig& config) {
    config.validate();
    LstmParams p;
    for (auto& g : p.cell.gates) {
        g.input_weights = Matrix(config.hidden_dim, config.input_dim);
        g.recurrent_weights = Matrix(config.hidden_dim, config.hidden_dim);
        g.bias.assign(config.hidden_dim, 0.0);
    }
    p.head.weights.assign(config.hidden_dim, 0.0);
    return p;
}

namespace {

void fill_orthogonal(Matrix& m, Rng& rng) {
    const std::size_t n = m.rows;
    for (double& v : m.data) v = rng.normal();
    // Modified Gram-Schmidt over rows.
    for (std::size_t r = 0; r < n; ++r) {
        auto row = m.row(r);
        for (std::size_t q = 0; q < r; ++q) {
            const auto prev = m.row(q);
            const double proj = dot(row, prev);
            for (std::size_t c = 0; c < n; ++c) row[c] -= proj * prev[c];
        }
        const double norm = std::sqrt(dot(row, row));
        for (double& v : row) v /= norm;
    }
}

}  // namespace

LstmParams init_lstm_params(const LstmConfig& config, std::uint64_t seed) {
    LstmParams p = zero_lstm_params(config);
    Rng rng(seed);
    const double kernel_limit =
        std::sqrt(6.0 / static_cast<double>(config.input_dim + gate_count * config.hidden_dim));
    for (auto& g : p.cell.gates) {
        for (double& w : g.input_weights.data) w = rng.uniform(-kernel_limit, kernel_limit);
    }
    for (auto& g : p.cell.gates) fill_orthogonal(g.recurrent_weights, rng);
    p.cell.gates[forget_gate].bias.assign(config.hidden_dim, 1.0);
    const double head_limit = std::sqrt(6.0 / static_cast<double>(config.hidden_dim + 1));
    for (double& w : p.head.weights) w = rng.uniform(-head_limit, head_limit);
    return p;
}

void check_shapes(const LstmConfig& config, const LstmParams& params) {
    config.validate();
    for (const auto& g : params.cell.gates) {
        if (g.input_weights.rows != config.hidden_dim || g.input_weights.cols != config.input_dim ||
            g.recurrent_weights.rows != config.hidden_dim || g.recurrent_weights.cols != config.hidden_dim ||
            g.bias.size() != config.hidden_dim) {
            throw ShapeError("LSTM gate shapes do not match config");
        }
    }
    if (params.head.weights.size() != config.hidden_dim) throw ShapeError("dense head width does not match config");
}

CellStep cell_forward(const LstmCellParams& cell, std::span<const double> x, std::span<const double> h_prev,
                      std::span<const double> c_prev) {
    const std::size_t hidden = cell.hidden_dim();
    if (x.size() != cell.input_dim()) throw ShapeError("cell_forward: input width mismatch");
    if (h_prev.size() != hidden || c_prev.size() != hidden) throw ShapeError("cell_forward: state width mismatch");

    CellStep s;
    s.x.assign(x.begin(), x.end());
    s.h_prev.assign(h_prev.begin(), h_prev.end());
    s.c_prev.assign(c_prev.begin(), c_prev.end());

    std::array<Vector, gate_count> z;
    for (std::size_t g = 0; g < gate_count; ++g) {
        const auto& gp = cell.gates[g];
        z[g] = matvec(gp.input_weights, x);
        const Vector rec = matvec(gp.recurrent_weights, h_prev);
        for (std::size_t j = 0; j < hidden; ++j) z[g][j] += rec[j] + gp.bias[j];
    }
    s.input.resize(hidden);
    s.forget.resize(hidden);
    s.output.resize(hidden);
    s.candidate.resize(hidden);
    s.c.resize(hidden);
    s.tanh_c.resize(hidden);
    s.h.resize(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        s.input[j] = sigmoid(z[input_gate][j]);
        s.forget[j] = sigmoid(z[forget_gate][j]);
        s.output[j] = sigmoid(z[output_gate][j]);
        s.candidate[j] = std::tanh(z[candidate_gate][j]);
        s.c[j] = s.forget[j] * c_prev[j] + s.input[j] * s.candidate[j];
        s.tanh_c[j] = std::tanh(s.c[j]);
        s.h[j] = s.output[j] * s.tanh_c[j];
    }
    return s;
}

LstmState unroll_forward(const LstmCellParams& cell, const LstmConfig& config, std::span<const double> series) {
    config.validate();
    if (series.size() != config.series_length()) {
        throw ShapeError("unroll_forward: series length " + std::to_string(series.size()) + " != " +
                         std::to_string(config.series_length()));
    }
    LstmState state;
    state.steps.reserve(config.time_steps);
    Vector h(config.hidden_dim, 0.0);
    Vector c(config.hidden_dim, 0.0);
    for (std::size_t t = 0; t < config.time_steps; ++t) {
        auto step = cell_forward(cell, series.subspan(t * config.input_dim, config.input_dim), h, c);
        h = step.h;
        c = step.c;
        state.steps.push_back(std::move(step));
    }
    return state;
}

double output_layer(std::span<const double> h_final, const DenseHead& head) {
    if (h_final.size() != head.weights.size()) throw ShapeError("output_layer: width mismatch");
    return dot(head.weights, h_final) + head.bias;
}

double predict(const LstmParams& params, const LstmConfig& config, std::span<const double> series) {
    return output_layer(unroll_forward(params.cell, config, series).final_h(), params.head);
}

LstmGradients bptt(const LstmParams& params, const LstmConfig& config, const LstmState& state, double target,
                   std::optional<double> clip_norm) {
    check_shapes(config, params);
    if (state.steps.size() != config.time_steps) throw ShapeError("bptt: state does not match config");
    const std::size_t hidden = config.hidden_dim;

    LstmGradients g = zero_lstm_params(config);
    const Vector& h_last = state.final_h();
    const double dy = output_layer(h_last, params.head) - target;
    for (std::size_t j = 0; j < hidden; ++j) g.head.weights[j] = dy * h_last[j];
    g.head.bias = dy;

    Vector dh(hidden);
    for (std::size_t j = 0; j < hidden; ++j) dh[j] = dy * params.head.weights[j];
    Vector dc(hidden, 0.0);
    std::array<Vector, gate_count> dz;
    for (auto& v : dz) v.assign(hidden, 0.0);

    for (std::size_t t = state.steps.size(); t-- > 0;) {
        const CellStep& s = state.steps[t];
        for (std::size_t j = 0; j < hidden; ++j) {
            dc[j] += dh[j] * s.output[j] * (1.0 - s.tanh_c[j] * s.tanh_c[j]);
            dz[output_gate][j] = dh[j] * s.tanh_c[j] * s.output[j] * (1.0 - s.output[j]);
            dz[input_gate][j] = dc[j] * s.candidate[j] * s.input[j] * (1.0 - s.input[j]);
            dz[candidate_gate][j] = dc[j] * s.input[j] * (1.0 - s.candidate[j] * s.candidate[j]);
            dz[forget_gate][j] = dc[j] * s.c_prev[j] * s.forget[j] * (1.0 - s.forget[j]);
        }
        Vector dh_prev(hidden, 0.0);
        for (std::size_t k = 0; k < gate_count; ++k) {
            auto& gg = g.cell.gates[k];
            add_outer(gg.input_weights, dz[k], s.x);
            add_outer(gg.recurrent_weights, dz[k], s.h_prev);
            for (std::size_t j = 0; j < hidden; ++j) gg.bias[j] += dz[k][j];
            add_matvec_transposed(params.cell.gates[k].recurrent_weights, dz[k], dh_prev);
        }
        for (std::size_t j = 0; j < hidden; ++j) dc[j] *= s.forget[j];
        dh = std::move(dh_prev);
    }

    const double sq = squared_norm(g);
    if (!std::isfinite(sq)) throw NonFiniteGradient("bptt produced a non-finite gradient");
    const double factor = clip_factor(sq, clip_norm);
    if (factor != 1.0) scale(g, factor);
    return g;
}

double squared_norm(const LstmGradients& g) {
    double s = dot(g.head.weights, g.head.weights) + g.head.bias * g.head.bias;
    for (const auto& gg : g.cell.gates) {
        s += dot(gg.input_weights.data, gg.input_weights.data);
        s += dot(gg.recurrent_weights.data, gg.recurrent_weights.data);
        s += dot(gg.bias, gg.bias);
    }
    return s;
}

void scale(LstmGradients& g, double factor) {
    auto mul = [factor](std::vector<double>& v) {
        for (double& x : v) x *= factor;
    };
    for (auto& gg : g.cell.gates) {
        mul(gg.input_weights.data);
        mul(gg.recurrent_weights.data);
        mul(gg.bias);
    }
    mul(g.head.weights);
    g.head.bias *= factor;
}

void sgd_step_inplace(LstmParams& params, const LstmGradients& grads, double learning_rate) {
    if (!std::isfinite(squared_norm(grads))) throw NonFiniteGradient("non-finite LSTM gradient");
    auto axpy = [learning_rate](std::vector<double>& p, const std::vector<double>& d) {
        if (p.size() != d.size()) throw ShapeError("sgd_step: shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= learning_rate * d[i];
    };
    for (std::size_t k = 0; k < gate_count; ++k) {
        axpy(params.cell.gates[k].input_weights.data, grads.cell.gates[k].input_weights.data);
        axpy(params.cell.gates[k].recurrent_weights.data, grads.cell.gates[k].recurrent_weights.data);
        axpy(params.cell.gates[k].bias, grads.cell.gates[k].bias);
    }
    axpy(params.head.weights, grads.head.weights);
    params.head.bias -= learning_rate * grads.head.bias;
}

LstmParams sgd_step(const LstmParams& params, const LstmGradients& grads, double learning_rate) {
    LstmParams out = params;
    sgd_step_inplace(out, grads, learning_rate);
    return out;
}

TrainConfig default_lstm_train_config(const LstmConfig& config) {
    TrainConfig tc;
    if (config.mode == LstmMode::sequential) tc.gradient_clip_norm = 5.0;
    return tc;
}

TrainResult<LstmParams> train_lstm_from(const LstmConfig& config, LstmParams params,
                                        const std::vector<TimeSeriesRecord>& records,
                                        const TrainConfig& train_config) {
    check_shapes(config, params);
    auto [trace, updates] =
        run_online_sgd(records, train_config, [&](const TimeSeriesRecord& rec, std::size_t epoch) {
            const auto state = unroll_forward(params.cell, config, rec.values);
            const double y = output_layer(state.final_h(), params.head);
            const double residual = y - static_cast<double>(rec.label);
            try {
                const auto grads =
                    bptt(params, config, state, static_cast<double>(rec.label), train_config.gradient_clip_norm);
                sgd_step_inplace(params, grads, train_config.learning_rate);
            } catch (const NonFiniteGradient& e) {
                throw DivergenceError(epoch, e.what());
            }
            return std::pair{0.5 * residual * residual, y};
        });
    return {std::move(params), std::move(trace), updates};
}

TrainResult<LstmParams> train_lstm(const LstmConfig& config, const std::vector<TimeSeriesRecord>& records,
                                   const TrainConfig& train_config) {
    return train_lstm_from(config, init_lstm_params(config, train_config.seed), records, train_config);
}

Metrics evaluate(const LstmParams& params, const LstmConfig& config, const std::vector<TimeSeriesRecord>& records) {
    if (records.empty()) throw DatasetError("evaluate: no records");
    check_shapes(config, params);
    Metrics m;
    for (const auto& rec : records) m.add(rec.label, predicted_class(predict(params, config, rec.values)));
    return m;
}

Matrix export_unit_traces(const LstmParams& params, const LstmConfig& config, std::span<const double> series) {
    const auto state = unroll_forward(params.cell, config, series);
    Matrix traces(config.time_steps, config.hidden_dim);
    for (std::size_t t = 0; t < state.steps.size(); ++t) {
        for (std::size_t j = 0; j < config.hidden_dim; ++j) traces(t, j) = state.steps[t].h[j];
    }
    return traces;
}

void write_unit_traces_csv(std::ostream& out, const Matrix& traces) {
    out << 't';
    for (std::size_t j = 0; j < traces.cols; ++j) out << ",h" << (j + 1);
    out << '\n';
    char buf[32];
    for (std::size_t t = 0; t < traces.rows; ++t) {
        out << (t + 1);
        for (std::size_t j = 0; j < traces.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", traces(t, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace waferbench
