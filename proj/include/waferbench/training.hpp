#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "waferbench/dataset.hpp"
#include "waferbench/errors.hpp"
#include "waferbench/metrics.hpp"
#include "waferbench/random.hpp"

namespace waferbench {

struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t epochs = 40;
    std::uint64_t seed = 0;
    bool shuffle = true;
    std::optional<double> gradient_clip_norm;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (gradient_clip_norm && !(*gradient_clip_norm > 0.0)) {
            throw ConfigError("gradient_clip_norm must be > 0 when set");
        }
    }
};

// Statistics of one epoch, measured on each pattern just before its update.
struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double mean_loss = 0.0;
    double train_accuracy = 0.0;
};

template <typename Params>
struct TrainResult {
    Params params;
    std::vector<EpochStats> trace;
    std::size_t updates = 0;
};

// Online SGD driver: one update per pattern, patterns reshuffled every epoch
// from a stream seeded by config.seed. `step(record)` performs the update and
// returns the pre-update (loss, output).
template <typename StepFn>
std::pair<std::vector<EpochStats>, std::size_t> run_online_sgd(const std::vector<TimeSeriesRecord>& records,
                                                              const TrainConfig& config, StepFn&& step) {
    config.validate();
    if (records.empty()) throw DatasetError("training split is empty");

    Rng order_rng(mix_seed(config.seed, 0x5348554646ULL));
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<EpochStats> trace;
    trace.reserve(config.epochs);
    std::size_t updates = 0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.shuffle) order_rng.shuffle(order);
        double loss_sum = 0.0;
        Metrics seen;
        for (std::size_t idx : order) {
            const auto& rec = records[idx];
            const auto [loss, output] = step(rec, epoch);
            if (!std::isfinite(loss)) throw DivergenceError(epoch, "non-finite loss");
            loss_sum += loss;
            seen.add(rec.label, predicted_class(output));
            ++updates;
        }
        trace.push_back({epoch, loss_sum / static_cast<double>(records.size()), seen.accuracy()});
    }
    return {std::move(trace), updates};
}

// Scales a gradient so its global L2 norm is at most max_norm.
inline double clip_factor(double squared_norm, std::optional<double> max_norm) {
    if (!max_norm) return 1.0;
    const double norm = std::sqrt(squared_norm);
    return norm > *max_norm ? *max_norm / norm : 1.0;
}

}  // namespace waferbench
