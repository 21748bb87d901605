#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "waferbench/checkpoint.hpp"
#include "waferbench/crossbar.hpp"
#include "waferbench/dataset.hpp"
#include "waferbench/htm.hpp"
#include "waferbench/hwcost.hpp"
#include "waferbench/metrics.hpp"
#include "waferbench/training.hpp"

namespace waferbench {

enum class Architecture { lstm_sequential, lstm_windowed, perceptron, ann, dnn, htm };

// table1 row order.
inline constexpr std::array<Architecture, 6> table1_order = {Architecture::lstm_sequential,
                                                              Architecture::lstm_windowed,
                                                              Architecture::perceptron,
                                                              Architecture::ann,
                                                              Architecture::dnn,
                                                              Architecture::htm};

std::string_view to_string(Architecture a);
Architecture parse_architecture(std::string_view name);

struct DatasetConfig {
    std::string train_path;
    std::string test_path;
    std::optional<char> delimiter;
    std::optional<std::size_t> series_length = 152;
    // Explicit target for scale_inputs (nullopt with scale_max_explicit = no
    // scaling). Unset means the architecture default: 0.5 sequential LSTM,
    // 0.1 windowed LSTM, none otherwise.
    std::optional<double> scale_max;
    bool scale_max_explicit = false;
};

struct AnalogConfig {
    bool enabled = false;
    crossbar::DeviceModel device;
    double output_scale_mv = crossbar::default_output_scale_mv;
    std::uint64_t noise_seed = 1;
    std::uint64_t gain_seed = 1;
    std::vector<std::size_t> table2_indices = {23, 47, 7, 3, 3838, 193, 6157, 411, 1534, 4507};
    std::size_t index_base = 1;  // table2 indices count test rows from 1
    std::size_t fig2_index = 23;
};

struct ExperimentConfig {
    Architecture architecture = Architecture::lstm_sequential;
    std::uint64_t seed = 0;
    DatasetConfig dataset;
    TrainConfig train;
    bool clip_explicit = false;  // else 5.0 for sequential LSTM, off otherwise
    bool use_bias = true;
    std::size_t ann_hidden = 300;
    std::size_t lstm_hidden = 0;  // 0 = 4 sequential, 1 windowed
    htm::HtmConfig htm;
    AnalogConfig analog;
    std::optional<hwcost::CostTable> cost;
    std::string output_dir;
    // Per-architecture override objects used by table1.
    nlohmann::json table1_overrides = nlohmann::json::object();
    // Raw bytes of the config file this came from.
    std::string source_text;
};

// Parses the JSON experiment file. Unknown keys and a missing seed are
// ConfigErrors. Architecture-dependent defaults (input scale, clip norm,
// hidden width) are resolved at use through the effective_* helpers.
ExperimentConfig parse_experiment_config(const std::string& json_text);

// Merges a JSON object into an existing config (same schema as the file).
void apply_overrides(ExperimentConfig& config, const nlohmann::json& overrides);

std::optional<double> effective_scale_max(const ExperimentConfig& config);
// config.train with the run seed and the architecture's clip default.
TrainConfig effective_train_config(const ExperimentConfig& config);
LstmConfig effective_lstm_config(const ExperimentConfig& config, std::size_t series_length);
NetworkSpec effective_network_spec(const ExperimentConfig& config, std::size_t series_length);

nlohmann::ordered_json to_json(const ExperimentConfig& config);

hwcost::CostTable parse_cost_table(const nlohmann::json& j);
nlohmann::ordered_json to_json(const hwcost::CostTable& t);
crossbar::DeviceModel parse_device(const nlohmann::json& j);

// Loads and scales the dataset as the config asks.
SplitDataset prepare_dataset(const ExperimentConfig& config);

struct CostResult {
    hwcost::Inventory inventory;
    hwcost::Estimate estimate;
};

CostResult cost_for(const ExperimentConfig& config, std::size_t series_length);

struct RunResult {
    Architecture architecture = Architecture::lstm_sequential;
    std::optional<Model> model;  // empty for HTM
    std::vector<EpochStats> trace;
    std::size_t updates = 0;
    Metrics train_metrics;
    Metrics test_metrics;
    std::optional<double> analog_agreement;
    std::optional<Metrics> analog_test_metrics;
    std::optional<CostResult> cost;
    double wall_clock_seconds = 0.0;
};

// dataset -> train -> evaluate (-> analog agreement -> cost when configured).
RunResult run_experiment(const ExperimentConfig& config, const SplitDataset& data);
RunResult run_experiment(const ExperimentConfig& config);

// Evaluates a stored model against the configured dataset.
RunResult evaluate_checkpoint(const ExperimentConfig& config, const Model& model, const SplitDataset& data);

// Deterministic part of a run: everything except timing.
nlohmann::ordered_json metrics_json(const RunResult& result);
// metrics + wall clock + config provenance.
nlohmann::ordered_json report_json(const RunResult& result, const ExperimentConfig& config);

double software_predict(const Model& model, std::span<const double> values);

// Analog predictions (mV) and software predictions for the given test rows.
crossbar::AgreementReport analog_agreement(const Model& model, const std::vector<TimeSeriesRecord>& records,
                                           const std::vector<std::size_t>& rows, const AnalogConfig& analog,
                                           const std::vector<std::size_t>& reported_indices = {});

// All test records.
crossbar::AgreementReport analog_agreement(const Model& model, const std::vector<TimeSeriesRecord>& records,
                                           const AnalogConfig& analog);

// table2 rows: indices are translated with analog.index_base into test rows.
crossbar::AgreementReport table2(const Model& model, const std::vector<TimeSeriesRecord>& test,
                                 const std::vector<std::size_t>& indices, const AnalogConfig& analog);

struct UnitTraces {
    Matrix analog_mv;
    Matrix software;
};

UnitTraces fig2(const Model& model, const std::vector<TimeSeriesRecord>& test, std::size_t index,
                const AnalogConfig& analog);

struct Table1Row {
    Architecture architecture = Architecture::lstm_sequential;
    // Empty for a cost-only table.
    std::optional<double> accuracy;
    std::optional<double> balanced_accuracy;
    std::optional<hwcost::Estimate> cost;
};

// One row per architecture in table1 order; every architecture must be present.
std::vector<Table1Row> make_table1(const std::vector<Table1Row>& rows);
void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows);

}  // namespace waferbench
