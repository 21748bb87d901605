#include "waferbench/htm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "waferbench/errors.hpp"
#include "waferbench/random.hpp"

namespace waferbench::htm {

ScalarBucketEncoder::ScalarBucketEncoder(std::vector<double> mins, std::vector<double> maxs, std::size_t bins)
    : mins_(std::move(mins)), maxs_(std::move(maxs)), bins_(bins) {
    if (bins_ < 2) throw ConfigError("encoder needs at least 2 bins");
    if (mins_.size() != maxs_.size()) throw ShapeError("encoder range vectors differ in length");
}

ScalarBucketEncoder ScalarBucketEncoder::fit(const std::vector<TimeSeriesRecord>& train, std::size_t bins) {
    if (bins < 2) throw ConfigError("encoder needs at least 2 bins");
    if (train.empty()) throw DatasetError("encoder fit on an empty split");
    const std::size_t n = train.front().values.size();
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    for (const auto& r : train) {
        if (r.values.size() != n) throw ShapeError("encoder fit on records of differing length");
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], r.values[i]);
            hi[i] = std::max(hi[i], r.values[i]);
        }
    }
    return ScalarBucketEncoder(std::move(lo), std::move(hi), bins);
}

std::size_t ScalarBucketEncoder::bucket(std::size_t position, double value) const {
    const double lo = mins_[position];
    const double hi = maxs_[position];
    if (!(hi > lo) || value <= lo) return 0;
    if (value >= hi) return bins_ - 1;
    const auto b = static_cast<std::size_t>(std::floor((value - lo) / (hi - lo) * static_cast<double>(bins_)));
    return std::min(b, bins_ - 1);
}

BitVector ScalarBucketEncoder::encode(std::span<const double> values) const {
    if (values.size() != mins_.size()) throw ShapeError("encode: series length mismatch");
    BitVector out(output_width(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) out[i * bins_ + bucket(i, values[i])] = 1;
    return out;
}

BitVector encode(const TimeSeriesRecord& record, const std::vector<TimeSeriesRecord>& train, std::size_t bins) {
    return ScalarBucketEncoder::fit(train, bins).encode(record.values);
}

void SpatialPoolerConfig::validate() const {
    if (num_columns == 0) throw ConfigError("pooler needs columns");
    if (active_columns == 0 || active_columns >= num_columns) {
        throw ConfigError("active_columns must be in [1, num_columns)");
    }
    if (!(potential_fraction > 0.0 && potential_fraction <= 1.0)) {
        throw ConfigError("potential_fraction must be in (0, 1]");
    }
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(permanence_threshold)) throw ConfigError("permanence_threshold must be in [0, 1]");
    if (!(permanence_increment > 0.0 && permanence_increment <= 1.0) ||
        !(permanence_decrement > 0.0 && permanence_decrement <= 1.0)) {
        throw ConfigError("permanence increment/decrement must be in (0, 1]");
    }
}

BitVector Sdr::bits() const {
    BitVector b(width, 0);
    for (auto i : active) b[i] = 1;
    return b;
}

std::vector<double> Sdr::as_input() const {
    std::vector<double> v(width, 0.0);
    for (auto i : active) v[i] = 1.0;
    return v;
}

std::string Sdr::to_bit_string() const {
    std::string s(width, '0');
    for (auto i : active) s[i] = '1';
    return s;
}

SpatialPooler::SpatialPooler(const SpatialPoolerConfig& config, std::size_t input_width)
    : config_(config), input_width_(input_width) {
    config_.validate();
    if (input_width_ == 0) throw ConfigError("pooler input width must be positive");
    const std::size_t cells = config_.num_columns * input_width_;
    potential_.assign(cells, 0);
    permanences_.assign(cells, 0.0);

    Rng rng(config_.seed);
    const auto pool_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(config_.potential_fraction * static_cast<double>(input_width_))));
    std::vector<std::size_t> inputs(input_width_);
    const double lo = std::max(0.0, config_.permanence_threshold - 0.1);
    const double hi = std::min(1.0, config_.permanence_threshold + 0.1);
    for (std::size_t c = 0; c < config_.num_columns; ++c) {
        std::iota(inputs.begin(), inputs.end(), std::size_t{0});
        rng.shuffle(inputs);
        for (std::size_t k = 0; k < pool_size; ++k) {
            const auto idx = c * input_width_ + inputs[k];
            potential_[idx] = 1;
            permanences_[idx] = rng.uniform(lo, hi);
        }
    }
}

std::vector<std::size_t> SpatialPooler::overlaps(std::span<const std::uint8_t> input) const {
    if (input.size() != input_width_) {
        throw ShapeError("pooler input width " + std::to_string(input.size()) + " != " +
                         std::to_string(input_width_));
    }
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input[i]) active.push_back(i);
    }
    std::vector<std::size_t> out(config_.num_columns, 0);
    for (std::size_t c = 0; c < config_.num_columns; ++c) {
        const std::size_t base = c * input_width_;
        std::size_t n = 0;
        for (auto i : active) {
            if (potential_[base + i] && permanences_[base + i] >= config_.permanence_threshold) ++n;
        }
        out[c] = n;
    }
    return out;
}

Sdr SpatialPooler::compute(std::span<const std::uint8_t> input, bool learn) {
    const auto ov = overlaps(input);
    std::vector<std::size_t> order(config_.num_columns);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto k = config_.active_columns;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) { return ov[a] != ov[b] ? ov[a] > ov[b] : a < b; });
    Sdr sdr{config_.num_columns, {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)}};
    std::sort(sdr.active.begin(), sdr.active.end());

    if (learn) {
        for (auto c : sdr.active) {
            const std::size_t base = c * input_width_;
            for (std::size_t i = 0; i < input_width_; ++i) {
                if (!potential_[base + i]) continue;
                double& p = permanences_[base + i];
                p = input[i] ? p + config_.permanence_increment : p - config_.permanence_decrement;
                p = std::clamp(p, 0.0, 1.0);
            }
        }
    }
    return sdr;
}

double SdrClassifier::output(const Sdr& sdr) const {
    if (constant_class) return static_cast<double>(*constant_class);
    return predict(spec, params, sdr.as_input());
}

int SdrClassifier::classify(const Sdr& sdr) const { return predicted_class(output(sdr)); }

SdrClassifier sdr_classify_train(const std::vector<Sdr>& sdrs, const std::vector<int>& labels,
                                 const TrainConfig& config) {
    if (sdrs.empty() || sdrs.size() != labels.size()) throw ShapeError("sdr_classify_train: bad inputs");
    const std::size_t width = sdrs.front().width;
    std::vector<TimeSeriesRecord> rows;
    rows.reserve(sdrs.size());
    for (std::size_t i = 0; i < sdrs.size(); ++i) {
        if (sdrs[i].width != width) throw ShapeError("sdr_classify_train: SDR widths differ");
        rows.push_back({labels[i], sdrs[i].as_input(), i});
    }
    SdrClassifier clf{NetworkSpec::perceptron(width), {}, std::nullopt};
    const bool single_class =
        std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); });
    if (single_class) {
        clf.params = zero_params(clf.spec);
        clf.constant_class = labels.front();
        return clf;
    }
    clf.params = train(clf.spec, rows, config).params;
    return clf;
}

int sdr_classify(const SdrClassifier& classifier, const Sdr& sdr) { return classifier.classify(sdr); }

HtmResult run_htm(const SplitDataset& data, const HtmConfig& config, const TrainConfig& train_config) {
    const auto encoder = ScalarBucketEncoder::fit(data.train, config.bins);
    SpatialPooler pooler(config.pooler, encoder.output_width());

    std::vector<BitVector> train_bits;
    train_bits.reserve(data.train.size());
    for (const auto& r : data.train) train_bits.push_back(encoder.encode(r.values));
    for (std::size_t e = 0; e < config.pooler_epochs; ++e) {
        for (const auto& bits : train_bits) pooler.compute(bits, true);
    }

    std::vector<Sdr> train_sdrs;
    std::vector<int> train_labels;
    for (std::size_t i = 0; i < data.train.size(); ++i) {
        train_sdrs.push_back(pooler.compute(train_bits[i], false));
        train_labels.push_back(data.train[i].label);
    }

    HtmResult result;
    std::vector<TimeSeriesRecord> rows;
    for (std::size_t i = 0; i < train_sdrs.size(); ++i) rows.push_back({train_labels[i], train_sdrs[i].as_input(), i});
    SdrClassifier clf{NetworkSpec::perceptron(config.pooler.num_columns), {}, std::nullopt};
    const bool single_class = std::all_of(train_labels.begin(), train_labels.end(),
                                          [&](int l) { return l == train_labels.front(); });
    if (single_class) {
        clf = sdr_classify_train(train_sdrs, train_labels, train_config);
    } else {
        auto trained = train(clf.spec, rows, train_config);
        clf.params = std::move(trained.params);
        result.trace = std::move(trained.trace);
    }

    for (std::size_t i = 0; i < train_sdrs.size(); ++i) {
        result.train_metrics.add(train_labels[i], clf.classify(train_sdrs[i]));
    }
    for (const auto& r : data.test) {
        auto sdr = pooler.compute(encoder.encode(r.values), false);
        result.test_metrics.add(r.label, clf.classify(sdr));
        result.test_sdrs.push_back(std::move(sdr));
    }
    return result;
}

}  // namespace waferbench::htm
