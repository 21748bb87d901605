#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "waferbench/activation.hpp"
#include "waferbench/dataset.hpp"
#include "waferbench/metrics.hpp"
#include "waferbench/tensor.hpp"
#include "waferbench/training.hpp"

namespace waferbench {

// Layered dense topology. layer_sizes runs input..output; activations has one
// entry per non-input layer.
struct NetworkSpec {
    std::vector<std::size_t> layer_sizes;
    std::vector<Activation> activations;
    bool use_bias = true;

    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return layer_sizes.size() - 1; }

    void validate() const;

    // y = tanh(w.x + b)
    static NetworkSpec perceptron(std::size_t inputs);
    // inputs-300-1, tanh throughout
    static NetworkSpec ann(std::size_t inputs, std::size_t hidden = 300);
    // inputs-300-50-100-1, tanh throughout
    static NetworkSpec dnn(std::size_t inputs);

    bool operator==(const NetworkSpec&) const = default;
};

struct DenseLayer {
    Matrix weights;  // fan_out x fan_in
    Vector bias;     // fan_out, or empty when the spec has no biases

    bool operator==(const DenseLayer&) const = default;
};

struct Parameters {
    std::vector<DenseLayer> layers;

    std::size_t weight_count() const;
    std::size_t bias_count() const;
    bool operator==(const Parameters&) const = default;
};

// Gradients share the parameter layout.
using Gradients = Parameters;

// Pre- and post-activation of every layer; post[0] is the input.
struct ForwardCache {
    std::vector<Vector> pre;
    std::vector<Vector> post;
};

struct ForwardPass {
    Vector output;
    ForwardCache cache;
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
Parameters init_params(const NetworkSpec& spec, std::uint64_t seed);

// Zero-valued parameters with the spec's shapes.
Parameters zero_params(const NetworkSpec& spec);

void check_shapes(const NetworkSpec& spec, const Parameters& params);

ForwardPass forward(const NetworkSpec& spec, const Parameters& params, std::span<const double> x);

double predict(const NetworkSpec& spec, const Parameters& params, std::span<const double> x);

// Gradient of 0.5*(y - target)^2 for a single-output network.
Gradients backward(const NetworkSpec& spec, const Parameters& params, const ForwardCache& cache, double target);

// w <- w - learning_rate * g. Rejects non-finite gradients.
Parameters sgd_step(const Parameters& params, const Gradients& grads, double learning_rate);
void sgd_step_inplace(Parameters& params, const Gradients& grads, double learning_rate);

double squared_norm(const Gradients& g);
void scale(Gradients& g, double factor);

TrainResult<Parameters> train(const NetworkSpec& spec, const std::vector<TimeSeriesRecord>& records,
                              const TrainConfig& config);

// Continues training from given parameters.
TrainResult<Parameters> train_from(const NetworkSpec& spec, Parameters params,
                                   const std::vector<TimeSeriesRecord>& records, const TrainConfig& config);

Metrics evaluate(const NetworkSpec& spec, const Parameters& params, const std::vector<TimeSeriesRecord>& records);

}  // namespace waferbench
