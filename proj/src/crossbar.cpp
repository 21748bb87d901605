#include "waferbench/crossbar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "waferbench/activation.hpp"
#include "waferbench/errors.hpp"
#include "waferbench/metrics.hpp"

namespace waferbench::crossbar {
namespace {

double conductance_span(const DeviceModel& d) { return d.g_max - d.g_min; }

double quantize(double g, const DeviceModel& d) {
    if (!d.levels) return g;
    const double step = conductance_span(d) / static_cast<double>(*d.levels - 1);
    const double q = d.g_min + std::round((g - d.g_min) / step) * step;
    return std::clamp(q, d.g_min, d.g_max);
}

// [W | b] so the bias rides on a constant-1 input line.
Matrix augment(const Matrix& w, std::span<const double> bias) {
    Matrix m(w.rows, w.cols + (bias.empty() ? 0 : 1));
    for (std::size_t r = 0; r < w.rows; ++r) {
        for (std::size_t c = 0; c < w.cols; ++c) m(r, c) = w(r, c);
        if (!bias.empty()) m(r, w.cols) = bias[r];
    }
    return m;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void DeviceModel::validate() const {
    if (!(g_min > 0.0 && g_min < g_max)) throw ConfigError("device needs 0 < g_min < g_max");
    if (levels && *levels < 2) throw ConfigError("device levels must be >= 2");
    if (!(read_noise_sigma >= 0.0) || !(gain_error_sigma >= 0.0)) throw ConfigError("device sigmas must be >= 0");
}

DeviceModel DeviceModel::ideal() { return {1e-6, 1e-4, std::nullopt, 0.0, 0.0}; }

CrossbarProgram program_weights(const Matrix& weights, const DeviceModel& device, double output_scale_mv,
                                std::uint64_t gain_seed) {
    device.validate();
    if (!all_finite(weights.data)) throw ShapeError("program_weights: non-finite weight");
    double w_max = 0.0;
    for (double w : weights.data) w_max = std::max(w_max, std::abs(w));
    if (w_max == 0.0) throw ShapeError("program_weights: all-zero weight matrix has no mapping scale");

    CrossbarProgram p;
    p.w_max = w_max;
    p.output_scale_mv = output_scale_mv;
    p.g_plus = Matrix(weights.rows, weights.cols, device.g_min);
    p.g_minus = Matrix(weights.rows, weights.cols, device.g_min);
    const double span = conductance_span(device);
    for (std::size_t i = 0; i < weights.data.size(); ++i) {
        const double w = weights.data[i];
        const double g = std::min(device.g_max, device.g_min + span * std::abs(w) / w_max);
        if (w > 0.0) {
            p.g_plus.data[i] = quantize(g, device);
        } else if (w < 0.0) {
            p.g_minus.data[i] = quantize(g, device);
        }
    }
    p.column_gain.assign(weights.rows, 1.0);
    if (device.gain_error_sigma > 0.0) {
        Rng rng(gain_seed);
        for (double& g : p.column_gain) g = 1.0 + device.gain_error_sigma * rng.normal();
    }
    return p;
}

Matrix reconstruct_weights(const CrossbarProgram& program, const DeviceModel& device) {
    Matrix w(program.rows(), program.cols());
    const double k = program.w_max / conductance_span(device);
    for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] = (program.g_plus.data[i] - program.g_minus.data[i]) * k;
    return w;
}

Vector analog_matvec(const CrossbarProgram& program, const DeviceModel& device, std::span<const double> x,
                     Rng& noise) {
    if (x.size() != program.cols()) {
        throw ShapeError("analog_matvec: input length " + std::to_string(x.size()) + " != columns " +
                         std::to_string(program.cols()));
    }
    const double k = program.w_max / conductance_span(device) * program.output_scale_mv;
    const double sigma = device.read_noise_sigma;
    Vector y(program.rows(), 0.0);
    for (std::size_t j = 0; j < program.rows(); ++j) {
        const auto gp = program.g_plus.row(j);
        const auto gm = program.g_minus.row(j);
        double current = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double g = gp[i] - gm[i];
            if (sigma > 0.0) g += sigma * (gp[i] * noise.normal() - gm[i] * noise.normal());
            current += g * x[i];
        }
        y[j] = program.column_gain[j] * current * k;
    }
    return y;
}

Vector analog_matvec(const CrossbarProgram& program, const DeviceModel& device, std::span<const double> x,
                     std::uint64_t noise_seed) {
    Rng rng(noise_seed);
    return analog_matvec(program, device, x, rng);
}

AnalogDense compile_dense(const NetworkSpec& spec, const Parameters& params, const DeviceModel& device,
                          double output_scale_mv, std::uint64_t gain_seed) {
    check_shapes(spec, params);
    AnalogDense net{spec, {}};
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        const auto& l = params.layers[k];
        net.layers.push_back(
            program_weights(augment(l.weights, l.bias), device, output_scale_mv, mix_seed(gain_seed, k)));
    }
    return net;
}

AnalogLstm compile_lstm(const LstmConfig& config, const LstmParams& params, const DeviceModel& device,
                        double output_scale_mv, std::uint64_t gain_seed) {
    check_shapes(config, params);
    AnalogLstm net;
    net.config = config;
    const std::size_t in = config.input_dim;
    const std::size_t hid = config.hidden_dim;
    for (std::size_t g = 0; g < gate_count; ++g) {
        const auto& gp = params.cell.gates[g];
        Matrix m(hid, in + hid + 1);
        for (std::size_t r = 0; r < hid; ++r) {
            for (std::size_t c = 0; c < in; ++c) m(r, c) = gp.input_weights(r, c);
            for (std::size_t c = 0; c < hid; ++c) m(r, in + c) = gp.recurrent_weights(r, c);
            m(r, in + hid) = gp.bias[r];
        }
        net.gates[g] = program_weights(m, device, output_scale_mv, mix_seed(gain_seed, g));
    }
    Matrix head(1, hid + 1);
    for (std::size_t c = 0; c < hid; ++c) head(0, c) = params.head.weights[c];
    head(0, hid) = params.head.bias;
    net.head = program_weights(head, device, output_scale_mv, mix_seed(gain_seed, gate_count));
    return net;
}

double analog_forward(const AnalogDense& net, const DeviceModel& device, std::span<const double> x,
                      std::uint64_t noise_seed, std::uint64_t stream) {
    if (x.size() != net.spec.input_size()) throw ShapeError("analog_forward: input length mismatch");
    if (net.spec.output_size() != 1) throw ShapeError("analog_forward: network must have one output");
    Rng noise(mix_seed(noise_seed, stream));
    Vector a(x.begin(), x.end());
    double out_mv = 0.0;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const auto& prog = net.layers[k];
        if (net.spec.use_bias) a.push_back(1.0);
        const Vector mv = analog_matvec(prog, device, a, noise);
        a.resize(mv.size());
        for (std::size_t j = 0; j < mv.size(); ++j) a[j] = activate(net.spec.activations[k], mv[j] / prog.output_scale_mv);
        out_mv = a[0] * prog.output_scale_mv;
    }
    return out_mv;
}

namespace {

Matrix run_analog_lstm(const AnalogLstm& net, const DeviceModel& device, std::span<const double> series,
                       Rng& noise, double* head_mv) {
    const auto& cfg = net.config;
    if (series.size() != cfg.series_length()) throw ShapeError("analog_forward: series length mismatch");
    const std::size_t in = cfg.input_dim;
    const std::size_t hid = cfg.hidden_dim;
    Vector h(hid, 0.0), c(hid, 0.0), drive(in + hid + 1, 1.0);
    Matrix traces(cfg.time_steps, hid);
    for (std::size_t t = 0; t < cfg.time_steps; ++t) {
        std::copy_n(series.begin() + static_cast<std::ptrdiff_t>(t * in), in, drive.begin());
        std::copy(h.begin(), h.end(), drive.begin() + static_cast<std::ptrdiff_t>(in));
        std::array<Vector, gate_count> z;
        for (std::size_t g = 0; g < gate_count; ++g) {
            z[g] = analog_matvec(net.gates[g], device, drive, noise);
            for (double& v : z[g]) v /= net.gates[g].output_scale_mv;
        }
        for (std::size_t j = 0; j < hid; ++j) {
            const double i_g = sigmoid(z[input_gate][j]);
            const double f_g = sigmoid(z[forget_gate][j]);
            const double o_g = sigmoid(z[output_gate][j]);
            const double cand = std::tanh(z[candidate_gate][j]);
            c[j] = f_g * c[j] + i_g * cand;
            h[j] = o_g * std::tanh(c[j]);
            traces(t, j) = h[j] * net.head.output_scale_mv;
        }
    }
    if (head_mv) {
        Vector hb(h);
        hb.push_back(1.0);
        *head_mv = analog_matvec(net.head, device, hb, noise)[0];
    }
    return traces;
}

}  // namespace

double analog_forward(const AnalogLstm& net, const DeviceModel& device, std::span<const double> series,
                      std::uint64_t noise_seed, std::uint64_t stream) {
    Rng noise(mix_seed(noise_seed, stream));
    double y = 0.0;
    run_analog_lstm(net, device, series, noise, &y);
    return y;
}

Matrix analog_unit_traces(const AnalogLstm& net, const DeviceModel& device, std::span<const double> series,
                          std::uint64_t noise_seed, std::uint64_t stream) {
    Rng noise(mix_seed(noise_seed, stream));
    return run_analog_lstm(net, device, series, noise, nullptr);
}

double AgreementReport::agreement() const {
    if (rows.empty()) return 1.0;
    const auto n = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.sign_agree; });
    return static_cast<double>(n) / static_cast<double>(rows.size());
}

AgreementReport agreement_report(std::span<const double> analog_mv, std::span<const double> software,
                                 std::span<const int> labels, std::span<const std::size_t> indices) {
    if (analog_mv.size() != software.size() || software.size() != labels.size() ||
        (!indices.empty() && indices.size() != labels.size())) {
        throw ShapeError("agreement_report: length mismatch");
    }
    AgreementReport report;
    report.rows.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        report.rows.push_back({indices.empty() ? i : indices[i], analog_mv[i], software[i],
                               predicted_class(analog_mv[i]) == predicted_class(software[i]), labels[i]});
    }
    return report;
}

void write_agreement_csv(std::ostream& out, const AgreementReport& report) {
    out << "index,analog_mv,software,sign_agree,class\n";
    for (const auto& r : report.rows) {
        out << r.index << ',' << fmt(r.analog_mv) << ',' << fmt(r.software) << ',' << (r.sign_agree ? 1 : 0) << ','
            << r.label << '\n';
    }
}

void write_trace_long_csv(std::ostream& out, const Matrix& analog_mv, const Matrix& software) {
    if (analog_mv.rows != software.rows || analog_mv.cols != software.cols) {
        throw ShapeError("trace CSV: analog and software shapes differ");
    }
    out << "t,unit,analog_mv,software\n";
    for (std::size_t t = 0; t < software.rows; ++t) {
        for (std::size_t j = 0; j < software.cols; ++j) {
            out << (t + 1) << ',' << (j + 1) << ',' << fmt(analog_mv(t, j)) << ',' << fmt(software(t, j)) << '\n';
        }
    }
}

void write_trace_wide_csv(std::ostream& out, const Matrix& analog_mv, const Matrix& software) {
    if (analog_mv.rows != software.rows || analog_mv.cols != software.cols) {
        throw ShapeError("trace CSV: analog and software shapes differ");
    }
    out << 't';
    for (std::size_t j = 0; j < software.cols; ++j) out << ",analog_mv_h" << (j + 1);
    for (std::size_t j = 0; j < software.cols; ++j) out << ",software_h" << (j + 1);
    out << '\n';
    for (std::size_t t = 0; t < software.rows; ++t) {
        out << (t + 1);
        for (std::size_t j = 0; j < software.cols; ++j) out << ',' << fmt(analog_mv(t, j));
        for (std::size_t j = 0; j < software.cols; ++j) out << ',' << fmt(software(t, j));
        out << '\n';
    }
}

}  // namespace waferbench::crossbar
