#include "waferbench/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "waferbench/errors.hpp"

namespace waferbench {
namespace {

const char* const gate_names[gate_count] = {"input", "forget", "output", "candidate"};

void write_tensor(std::ostream& out, const std::string& name, std::size_t rows, std::size_t cols,
                  std::span<const double> values) {
    out << "tensor " << name << ' ' << rows << ' ' << cols << '\n';
    char buf[32];
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", values[r * cols + c]);
            if (c) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

void write_tensor(std::ostream& out, const std::string& name, const Matrix& m) {
    write_tensor(out, name, m.rows, m.cols, m.data);
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw CheckpointError("checkpoint truncated");
        return w;
    }

    void expect(const std::string& w) {
        const auto got = word();
        if (got != w) throw CheckpointError("checkpoint: expected '" + w + "', found '" + got + "'");
    }

    std::size_t size() {
        const auto w = word();
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || p != w.data() + w.size()) throw CheckpointError("checkpoint: bad integer '" + w + "'");
        return v;
    }

    double real() {
        const auto w = word();
        double v = 0.0;
        const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || p != w.data() + w.size()) throw CheckpointError("checkpoint: bad number '" + w + "'");
        return v;
    }

    std::string keyed(const std::string& key) {
        expect(key);
        return word();
    }

    std::size_t keyed_size(const std::string& key) {
        expect(key);
        return size();
    }

    // Reads a tensor block and checks its name and shape.
    void tensor(const std::string& name, std::size_t rows, std::size_t cols, std::span<double> dst) {
        expect("tensor");
        expect(name);
        const auto r = size();
        const auto c = size();
        if (r != rows || c != cols) {
            throw CheckpointError("checkpoint: tensor " + name + " has shape " + std::to_string(r) + "x" +
                                  std::to_string(c) + ", expected " + std::to_string(rows) + "x" +
                                  std::to_string(cols));
        }
        for (auto& v : dst) v = real();
    }

    void tensor(const std::string& name, Matrix& m) { tensor(name, m.rows, m.cols, m.data); }

private:
    std::istream& in_;
};

void save_dense(std::ostream& out, const DenseModel& m) {
    check_shapes(m.spec, m.params);
    out << "kind dense\n";
    out << "layers " << m.spec.layer_sizes.size() << '\n';
    out << "sizes";
    for (auto n : m.spec.layer_sizes) out << ' ' << n;
    out << "\nactivations";
    for (auto a : m.spec.activations) out << ' ' << to_string(a);
    out << "\nbias " << (m.spec.use_bias ? 1 : 0) << '\n';
    for (std::size_t k = 0; k < m.params.layers.size(); ++k) {
        const auto& l = m.params.layers[k];
        write_tensor(out, "layer" + std::to_string(k) + ".weights", l.weights);
        if (m.spec.use_bias) write_tensor(out, "layer" + std::to_string(k) + ".bias", 1, l.bias.size(), l.bias);
    }
}

void save_lstm(std::ostream& out, const LstmModel& m) {
    check_shapes(m.config, m.params);
    out << "kind lstm\n";
    out << "mode " << to_string(m.config.mode) << '\n';
    out << "input_dim " << m.config.input_dim << '\n';
    out << "hidden_dim " << m.config.hidden_dim << '\n';
    out << "time_steps " << m.config.time_steps << '\n';
    for (std::size_t g = 0; g < gate_count; ++g) {
        const auto& gp = m.params.cell.gates[g];
        const std::string base = std::string("gate.") + gate_names[g];
        write_tensor(out, base + ".input_weights", gp.input_weights);
        write_tensor(out, base + ".recurrent_weights", gp.recurrent_weights);
        write_tensor(out, base + ".bias", 1, gp.bias.size(), gp.bias);
    }
    write_tensor(out, "head.weights", 1, m.params.head.weights.size(), m.params.head.weights);
    const double b = m.params.head.bias;
    write_tensor(out, "head.bias", 1, 1, std::span<const double>(&b, 1));
}

DenseModel load_dense(Reader& r) {
    DenseModel m;
    const auto n = r.keyed_size("layers");
    if (n < 2) throw CheckpointError("checkpoint: dense model needs at least 2 layers");
    r.expect("sizes");
    for (std::size_t i = 0; i < n; ++i) m.spec.layer_sizes.push_back(r.size());
    r.expect("activations");
    try {
        for (std::size_t i = 0; i + 1 < n; ++i) m.spec.activations.push_back(parse_activation(r.word()));
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint: ") + e.what());
    }
    const auto bias = r.keyed_size("bias");
    if (bias > 1) throw CheckpointError("checkpoint: bias flag must be 0 or 1");
    m.spec.use_bias = bias == 1;
    m.params = zero_params(m.spec);
    for (std::size_t k = 0; k < m.params.layers.size(); ++k) {
        auto& l = m.params.layers[k];
        r.tensor("layer" + std::to_string(k) + ".weights", l.weights);
        if (m.spec.use_bias) r.tensor("layer" + std::to_string(k) + ".bias", 1, l.bias.size(), l.bias);
    }
    return m;
}

LstmModel load_lstm(Reader& r) {
    LstmModel m;
    try {
        m.config.mode = parse_lstm_mode(r.keyed("mode"));
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint: ") + e.what());
    }
    m.config.input_dim = r.keyed_size("input_dim");
    m.config.hidden_dim = r.keyed_size("hidden_dim");
    m.config.time_steps = r.keyed_size("time_steps");
    try {
        m.params = zero_lstm_params(m.config);
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint: ") + e.what());
    }
    for (std::size_t g = 0; g < gate_count; ++g) {
        auto& gp = m.params.cell.gates[g];
        const std::string base = std::string("gate.") + gate_names[g];
        r.tensor(base + ".input_weights", gp.input_weights);
        r.tensor(base + ".recurrent_weights", gp.recurrent_weights);
        r.tensor(base + ".bias", 1, gp.bias.size(), gp.bias);
    }
    r.tensor("head.weights", 1, m.params.head.weights.size(), m.params.head.weights);
    r.tensor("head.bias", 1, 1, std::span<double>(&m.params.head.bias, 1));
    return m;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Model& model) {
    out << "waferbench-checkpoint " << checkpoint_version << '\n';
    std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DenseModel>) {
                save_dense(out, m);
            } else {
                save_lstm(out, m);
            }
        },
        model);
    out << "end\n";
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write " + path.string());
    save_checkpoint(out, model);
    if (!out) throw CheckpointError("write failed for " + path.string());
}

Model load_checkpoint(std::istream& in) {
    Reader r(in);
    r.expect("waferbench-checkpoint");
    const auto version = r.size();
    if (version != static_cast<std::size_t>(checkpoint_version)) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const auto kind = r.keyed("kind");
    Model model;
    if (kind == "dense") {
        model = load_dense(r);
    } else if (kind == "lstm") {
        model = load_lstm(r);
    } else {
        throw CheckpointError("unsupported model kind '" + kind + "'");
    }
    r.expect("end");
    return model;
}

Model load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path.string());
    return load_checkpoint(in);
}

}  // namespace waferbench
