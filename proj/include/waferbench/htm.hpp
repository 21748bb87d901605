#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "waferbench/dataset.hpp"
#include "waferbench/metrics.hpp"
#include "waferbench/nn.hpp"
#include "waferbench/training.hpp"

namespace waferbench::htm {

using BitVector = std::vector<std::uint8_t>;

// One-hot bucket per sample over the per-position value range of the
// training split. Values outside the range clamp to the boundary bucket.
class ScalarBucketEncoder {
public:
    ScalarBucketEncoder() = default;
    static ScalarBucketEncoder fit(const std::vector<TimeSeriesRecord>& train, std::size_t bins);
    // Explicit per-position ranges.
    ScalarBucketEncoder(std::vector<double> mins, std::vector<double> maxs, std::size_t bins);

    std::size_t bins() const { return bins_; }
    std::size_t series_length() const { return mins_.size(); }
    std::size_t output_width() const { return mins_.size() * bins_; }

    std::size_t bucket(std::size_t position, double value) const;
    BitVector encode(std::span<const double> values) const;

private:
    std::vector<double> mins_;
    std::vector<double> maxs_;
    std::size_t bins_ = 0;
};

// Encodes one record with an encoder fitted on `train`.
BitVector encode(const TimeSeriesRecord& record, const std::vector<TimeSeriesRecord>& train, std::size_t bins);

struct SpatialPoolerConfig {
    std::size_t num_columns = 1024;
    std::size_t active_columns = 20;  // k
    double potential_fraction = 0.5;
    double permanence_threshold = 0.5;
    double permanence_increment = 0.05;
    double permanence_decrement = 0.008;
    std::uint64_t seed = 0;

    void validate() const;
};

// Binary vector stored as its sorted active indices.
struct Sdr {
    std::size_t width = 0;
    std::vector<std::size_t> active;

    BitVector bits() const;
    std::vector<double> as_input() const;
    // '0'/'1' characters, one per column.
    std::string to_bit_string() const;

    bool operator==(const Sdr&) const = default;
};

// Global-inhibition spatial pooler without boosting or topology.
class SpatialPooler {
public:
    SpatialPooler(const SpatialPoolerConfig& config, std::size_t input_width);

    const SpatialPoolerConfig& config() const { return config_; }
    std::size_t input_width() const { return input_width_; }

    // Connected synapses on active input bits, per column.
    std::vector<std::size_t> overlaps(std::span<const std::uint8_t> input) const;

    // Top-k columns by overlap, ties to the lower column index. With learn,
    // winners' potential synapses move +increment on active bits and
    // -decrement on inactive bits, clamped to [0, 1].
    Sdr compute(std::span<const std::uint8_t> input, bool learn);

    double permanence(std::size_t column, std::size_t input) const {
        return permanences_[column * input_width_ + input];
    }
    bool potential(std::size_t column, std::size_t input) const {
        return potential_[column * input_width_ + input] != 0;
    }
    std::span<const double> permanences() const { return permanences_; }

private:
    SpatialPoolerConfig config_;
    std::size_t input_width_;
    std::vector<std::uint8_t> potential_;
    std::vector<double> permanences_;
};

// Perceptron over SDR bits. A single-class training set yields a constant
// classifier.
struct SdrClassifier {
    NetworkSpec spec;
    Parameters params;
    std::optional<int> constant_class;

    double output(const Sdr& sdr) const;
    int classify(const Sdr& sdr) const;
};

SdrClassifier sdr_classify_train(const std::vector<Sdr>& sdrs, const std::vector<int>& labels,
                                 const TrainConfig& config);

int sdr_classify(const SdrClassifier& classifier, const Sdr& sdr);

struct HtmConfig {
    SpatialPoolerConfig pooler;
    std::size_t bins = 10;
    std::size_t pooler_epochs = 1;  // learning passes over the training split
};

struct HtmResult {
    Metrics train_metrics;
    Metrics test_metrics;
    std::vector<EpochStats> trace;
    std::vector<Sdr> test_sdrs;
};

// Encoder -> pooler (learning on train) -> frozen pooler SDRs -> perceptron.
HtmResult run_htm(const SplitDataset& data, const HtmConfig& config, const TrainConfig& train_config);

}  // namespace waferbench::htm
