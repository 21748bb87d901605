#include "waferbench/nn.hpp"

#include <cmath>
#include <string>

#include "waferbench/errors.hpp"
#include "waferbench/random.hpp"

namespace waferbench {

void NetworkSpec::validate() const {
    if (layer_sizes.size() < 2) throw ConfigError("network needs at least an input and an output layer");
    if (activations.size() != layer_sizes.size() - 1) {
        throw ConfigError("network needs one activation per non-input layer");
    }
    for (auto n : layer_sizes) {
        if (n == 0) throw ConfigError("layer sizes must be positive");
    }
}

NetworkSpec NetworkSpec::perceptron(std::size_t inputs) {
    return {{inputs, 1}, {Activation::tanh}, true};
}

NetworkSpec NetworkSpec::ann(std::size_t inputs, std::size_t hidden) {
    return {{inputs, hidden, 1}, {Activation::tanh, Activation::tanh}, true};
}

NetworkSpec NetworkSpec::dnn(std::size_t inputs) {
    return {{inputs, 300, 50, 100, 1}, std::vector<Activation>(4, Activation::tanh), true};
}

std::size_t Parameters::weight_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size();
    return n;
}

std::size_t Parameters::bias_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.bias.size();
    return n;
}

Parameters zero_params(const NetworkSpec& spec) {
    spec.validate();
    Parameters p;
    p.layers.reserve(spec.layer_count());
    for (std::size_t k = 0; k < spec.layer_count(); ++k) {
        const auto fan_in = spec.layer_sizes[k];
        const auto fan_out = spec.layer_sizes[k + 1];
        p.layers.push_back({Matrix(fan_out, fan_in), Vector(spec.use_bias ? fan_out : 0, 0.0)});
    }
    return p;
}

Parameters init_params(const NetworkSpec& spec, std::uint64_t seed) {
    Parameters p = zero_params(spec);
    Rng rng(seed);
    for (auto& layer : p.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols));
        for (double& w : layer.weights.data) w = rng.uniform(-bound, bound);
    }
    return p;
}

void check_shapes(const NetworkSpec& spec, const Parameters& params) {
    spec.validate();
    if (params.layers.size() != spec.layer_count()) throw ShapeError("parameter layer count does not match spec");
    for (std::size_t k = 0; k < spec.layer_count(); ++k) {
        const auto& l = params.layers[k];
        if (l.weights.rows != spec.layer_sizes[k + 1] || l.weights.cols != spec.layer_sizes[k]) {
            throw ShapeError("layer " + std::to_string(k) + " weight shape does not match spec");
        }
        if (l.bias.size() != (spec.use_bias ? l.weights.rows : 0)) {
            throw ShapeError("layer " + std::to_string(k) + " bias shape does not match spec");
        }
    }
}

ForwardPass forward(const NetworkSpec& spec, const Parameters& params, std::span<const double> x) {
    if (x.size() != spec.input_size()) {
        throw ShapeError("forward: input length " + std::to_string(x.size()) + " != " +
                         std::to_string(spec.input_size()));
    }
    ForwardPass out;
    auto& cache = out.cache;
    cache.post.emplace_back(x.begin(), x.end());
    for (std::size_t k = 0; k < spec.layer_count(); ++k) {
        const auto& layer = params.layers[k];
        Vector z = matvec(layer.weights, cache.post.back());
        for (std::size_t j = 0; j < layer.bias.size(); ++j) z[j] += layer.bias[j];
        Vector a(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) a[j] = activate(spec.activations[k], z[j]);
        cache.pre.push_back(std::move(z));
        cache.post.push_back(std::move(a));
    }
    out.output = cache.post.back();
    return out;
}

double predict(const NetworkSpec& spec, const Parameters& params, std::span<const double> x) {
    return forward(spec, params, x).output.front();
}

Gradients backward(const NetworkSpec& spec, const Parameters& params, const ForwardCache& cache, double target) {
    const auto layers = spec.layer_count();
    if (spec.output_size() != 1) throw ShapeError("backward: scalar target needs a single-output network");
    if (cache.post.size() != layers + 1 || cache.pre.size() != layers || params.layers.size() != layers) {
        throw ShapeError("backward: stale cache");
    }
    for (std::size_t k = 0; k <= layers; ++k) {
        if (cache.post[k].size() != spec.layer_sizes[k]) throw ShapeError("backward: stale cache");
    }

    Gradients g = zero_params(spec);
    // delta = dL/dz for the current layer
    Vector delta(1, (cache.post.back()[0] - target) * activation_slope(spec.activations.back(), cache.post.back()[0]));
    for (std::size_t k = layers; k-- > 0;) {
        auto& gl = g.layers[k];
        add_outer(gl.weights, delta, cache.post[k]);
        for (std::size_t j = 0; j < gl.bias.size(); ++j) gl.bias[j] = delta[j];
        if (k == 0) break;
        Vector upstream(spec.layer_sizes[k], 0.0);
        add_matvec_transposed(params.layers[k].weights, delta, upstream);
        for (std::size_t j = 0; j < upstream.size(); ++j) {
            upstream[j] *= activation_slope(spec.activations[k - 1], cache.post[k][j]);
        }
        delta = std::move(upstream);
    }
    return g;
}

void sgd_step_inplace(Parameters& params, const Gradients& grads, double learning_rate) {
    if (params.layers.size() != grads.layers.size()) throw ShapeError("sgd_step: layer count mismatch");
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        auto& p = params.layers[k];
        const auto& g = grads.layers[k];
        if (p.weights.rows != g.weights.rows || p.weights.cols != g.weights.cols || p.bias.size() != g.bias.size()) {
            throw ShapeError("sgd_step: shape mismatch in layer " + std::to_string(k));
        }
        if (!all_finite(g.weights.data) || !all_finite(g.bias)) {
            throw NonFiniteGradient("non-finite gradient in layer " + std::to_string(k));
        }
    }
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        auto& p = params.layers[k];
        const auto& g = grads.layers[k];
        for (std::size_t i = 0; i < p.weights.data.size(); ++i) p.weights.data[i] -= learning_rate * g.weights.data[i];
        for (std::size_t i = 0; i < p.bias.size(); ++i) p.bias[i] -= learning_rate * g.bias[i];
    }
}

Parameters sgd_step(const Parameters& params, const Gradients& grads, double learning_rate) {
    Parameters out = params;
    sgd_step_inplace(out, grads, learning_rate);
    return out;
}

double squared_norm(const Gradients& g) {
    double s = 0.0;
    for (const auto& l : g.layers) {
        s += dot(l.weights.data, l.weights.data);
        s += dot(l.bias, l.bias);
    }
    return s;
}

void scale(Gradients& g, double factor) {
    for (auto& l : g.layers) {
        for (double& v : l.weights.data) v *= factor;
        for (double& v : l.bias) v *= factor;
    }
}

TrainResult<Parameters> train_from(const NetworkSpec& spec, Parameters params,
                                   const std::vector<TimeSeriesRecord>& records, const TrainConfig& config) {
    check_shapes(spec, params);
    auto [trace, updates] = run_online_sgd(records, config, [&](const TimeSeriesRecord& rec, std::size_t epoch) {
        auto pass = forward(spec, params, rec.values);
        const double y = pass.output.front();
        const double residual = y - static_cast<double>(rec.label);
        auto grads = backward(spec, params, pass.cache, static_cast<double>(rec.label));
        const double factor = clip_factor(squared_norm(grads), config.gradient_clip_norm);
        if (factor != 1.0) scale(grads, factor);
        try {
            sgd_step_inplace(params, grads, config.learning_rate);
        } catch (const NonFiniteGradient& e) {
            throw DivergenceError(epoch, e.what());
        }
        return std::pair{0.5 * residual * residual, y};
    });
    return {std::move(params), std::move(trace), updates};
}

TrainResult<Parameters> train(const NetworkSpec& spec, const std::vector<TimeSeriesRecord>& records,
                              const TrainConfig& config) {
    return train_from(spec, init_params(spec, config.seed), records, config);
}

Metrics evaluate(const NetworkSpec& spec, const Parameters& params, const std::vector<TimeSeriesRecord>& records) {
    if (records.empty()) throw DatasetError("evaluate: no records");
    check_shapes(spec, params);
    Metrics m;
    for (const auto& rec : records) m.add(rec.label, predicted_class(predict(spec, params, rec.values)));
    return m;
}

}  // namespace waferbench
