#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "waferbench/checkpoint.hpp"
#include "waferbench/crossbar.hpp"
#include "waferbench/dataset.hpp"
#include "waferbench/errors.hpp"
#include "waferbench/experiment.hpp"
#include "waferbench/htm.hpp"
#include "waferbench/hwcost.hpp"
#include "waferbench/lstm.hpp"
#include "waferbench/nn.hpp"

namespace py = pybind11;
using namespace waferbench;

namespace {

std::vector<double> to_vector(const Matrix& m) { return m.data; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wafer sensor classification with LSTM, dense and HTM models on simulated memristor crossbars.";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DatasetError>(m, "DatasetError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<CheckpointError>(m, "CheckpointError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

    py::class_<TimeSeriesRecord>(m, "TimeSeriesRecord")
        .def(py::init<>())
        .def(py::init([](int label, std::vector<double> values) {
                 return TimeSeriesRecord{label, std::move(values), 0};
             }),
             py::arg("label"), py::arg("values"))
        .def_readwrite("label", &TimeSeriesRecord::label)
        .def_readwrite("values", &TimeSeriesRecord::values)
        .def_readwrite("source_index", &TimeSeriesRecord::source_index);

    py::class_<SplitDataset>(m, "SplitDataset")
        .def(py::init<>())
        .def_readwrite("train", &SplitDataset::train)
        .def_readwrite("test", &SplitDataset::test)
        .def_readwrite("series_length", &SplitDataset::series_length);

    m.def("load_ucr_split", &load_ucr_split, py::arg("path"), py::arg("delimiter") = std::nullopt,
          py::arg("series_length") = std::nullopt);
    m.def("load_ucr", &load_ucr, py::arg("train_path"), py::arg("test_path"), py::arg("delimiter") = std::nullopt,
          py::arg("series_length") = std::nullopt);
    m.def("scale_inputs", &scale_inputs, py::arg("data"), py::arg("target_max_abs"));
    m.def("max_abs_value", &max_abs_value);
    m.def("normal_fraction", &normal_fraction);

    py::class_<Metrics>(m, "Metrics")
        .def(py::init<>())
        .def_readonly("true_positive", &Metrics::true_positive)
        .def_readonly("true_negative", &Metrics::true_negative)
        .def_readonly("false_positive", &Metrics::false_positive)
        .def_readonly("false_negative", &Metrics::false_negative)
        .def_property_readonly("total", &Metrics::total)
        .def("add", &Metrics::add)
        .def("accuracy", &Metrics::accuracy)
        .def("balanced_accuracy", &Metrics::balanced_accuracy)
        .def("recall_normal", &Metrics::recall_normal)
        .def("recall_abnormal", &Metrics::recall_abnormal);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("shuffle", &TrainConfig::shuffle)
        .def_readwrite("gradient_clip_norm", &TrainConfig::gradient_clip_norm);

    py::class_<EpochStats>(m, "EpochStats")
        .def_readonly("epoch", &EpochStats::epoch)
        .def_readonly("mean_loss", &EpochStats::mean_loss)
        .def_readonly("train_accuracy", &EpochStats::train_accuracy);

    py::class_<NetworkSpec>(m, "NetworkSpec")
        .def_readonly("layer_sizes", &NetworkSpec::layer_sizes)
        .def_readwrite("use_bias", &NetworkSpec::use_bias)
        .def_static("perceptron", &NetworkSpec::perceptron)
        .def_static("ann", &NetworkSpec::ann, py::arg("inputs"), py::arg("hidden") = 300)
        .def_static("dnn", &NetworkSpec::dnn);

    py::class_<Parameters>(m, "Parameters")
        .def_property_readonly("weight_count", &Parameters::weight_count)
        .def_property_readonly("bias_count", &Parameters::bias_count);

    m.def("init_params", &init_params, py::arg("spec"), py::arg("seed"));
    m.def(
        "predict_dense",
        [](const NetworkSpec& spec, const Parameters& p, std::vector<double> x) { return predict(spec, p, x); },
        py::arg("spec"), py::arg("params"), py::arg("x"));
    m.def(
        "train_dense",
        [](const NetworkSpec& spec, const std::vector<TimeSeriesRecord>& records, const TrainConfig& cfg) {
            auto r = train(spec, records, cfg);
            return py::make_tuple(std::move(r.params), std::move(r.trace));
        },
        py::arg("spec"), py::arg("records"), py::arg("config"));
    m.def("evaluate_dense", py::overload_cast<const NetworkSpec&, const Parameters&,
                                              const std::vector<TimeSeriesRecord>&>(&evaluate));

    py::enum_<LstmMode>(m, "LstmMode").value("sequential", LstmMode::sequential).value("windowed", LstmMode::windowed);

    py::class_<LstmConfig>(m, "LstmConfig")
        .def_readonly("input_dim", &LstmConfig::input_dim)
        .def_readonly("hidden_dim", &LstmConfig::hidden_dim)
        .def_readonly("time_steps", &LstmConfig::time_steps)
        .def_readonly("mode", &LstmConfig::mode)
        .def_static("sequential", &LstmConfig::sequential, py::arg("series_length"), py::arg("hidden") = 4)
        .def_static("windowed", &LstmConfig::windowed, py::arg("series_length"), py::arg("hidden") = 1);

    py::class_<LstmParams>(m, "LstmParams")
        .def_property_readonly("weight_count", &LstmParams::weight_count)
        .def_property_readonly("bias_count", &LstmParams::bias_count);

    m.def("init_lstm_params", &init_lstm_params, py::arg("config"), py::arg("seed"));
    m.def(
        "predict_lstm",
        [](const LstmParams& p, const LstmConfig& c, std::vector<double> series) { return predict(p, c, series); },
        py::arg("params"), py::arg("config"), py::arg("series"));
    m.def(
        "train_lstm",
        [](const LstmConfig& c, const std::vector<TimeSeriesRecord>& records, const TrainConfig& cfg) {
            auto r = train_lstm(c, records, cfg);
            return py::make_tuple(std::move(r.params), std::move(r.trace));
        },
        py::arg("config"), py::arg("records"), py::arg("train_config"));
    m.def(
        "unit_traces",
        [](const LstmParams& p, const LstmConfig& c, std::vector<double> series) {
            return to_vector(export_unit_traces(p, c, series));
        },
        py::arg("params"), py::arg("config"), py::arg("series"));

    py::class_<crossbar::DeviceModel>(m, "DeviceModel")
        .def(py::init<>())
        .def_static("ideal", &crossbar::DeviceModel::ideal)
        .def_readwrite("g_min", &crossbar::DeviceModel::g_min)
        .def_readwrite("g_max", &crossbar::DeviceModel::g_max)
        .def_readwrite("levels", &crossbar::DeviceModel::levels)
        .def_readwrite("read_noise_sigma", &crossbar::DeviceModel::read_noise_sigma)
        .def_readwrite("gain_error_sigma", &crossbar::DeviceModel::gain_error_sigma);

    m.def(
        "analog_predict_dense",
        [](const NetworkSpec& spec, const Parameters& p, const crossbar::DeviceModel& dev, std::vector<double> x,
           std::uint64_t noise_seed, std::uint64_t gain_seed, std::uint64_t stream) {
            const auto net = crossbar::compile_dense(spec, p, dev, crossbar::default_output_scale_mv, gain_seed);
            return crossbar::analog_forward(net, dev, x, noise_seed, stream);
        },
        py::arg("spec"), py::arg("params"), py::arg("device"), py::arg("x"), py::arg("noise_seed") = 1,
        py::arg("gain_seed") = 1, py::arg("stream") = 0);
    m.def(
        "analog_predict_lstm",
        [](const LstmParams& p, const LstmConfig& c, const crossbar::DeviceModel& dev, std::vector<double> x,
           std::uint64_t noise_seed, std::uint64_t gain_seed, std::uint64_t stream) {
            const auto net = crossbar::compile_lstm(c, p, dev, crossbar::default_output_scale_mv, gain_seed);
            return crossbar::analog_forward(net, dev, x, noise_seed, stream);
        },
        py::arg("params"), py::arg("config"), py::arg("device"), py::arg("series"), py::arg("noise_seed") = 1,
        py::arg("gain_seed") = 1, py::arg("stream") = 0);
    m.attr("default_output_scale_mv") = crossbar::default_output_scale_mv;

    py::class_<hwcost::Inventory>(m, "Inventory")
        .def_readonly("memristor_count", &hwcost::Inventory::memristor_count)
        .def_readonly("neuron_count", &hwcost::Inventory::neuron_count)
        .def_readonly("gate_block_count", &hwcost::Inventory::gate_block_count);
    m.def("inventory_dense", py::overload_cast<const NetworkSpec&>(&hwcost::inventory));
    m.def("inventory_lstm", py::overload_cast<const LstmConfig&>(&hwcost::inventory));

    py::class_<htm::SpatialPoolerConfig>(m, "SpatialPoolerConfig")
        .def(py::init<>())
        .def_readwrite("num_columns", &htm::SpatialPoolerConfig::num_columns)
        .def_readwrite("active_columns", &htm::SpatialPoolerConfig::active_columns)
        .def_readwrite("potential_fraction", &htm::SpatialPoolerConfig::potential_fraction)
        .def_readwrite("permanence_threshold", &htm::SpatialPoolerConfig::permanence_threshold)
        .def_readwrite("permanence_increment", &htm::SpatialPoolerConfig::permanence_increment)
        .def_readwrite("permanence_decrement", &htm::SpatialPoolerConfig::permanence_decrement)
        .def_readwrite("seed", &htm::SpatialPoolerConfig::seed);

    py::class_<htm::SpatialPooler>(m, "SpatialPooler")
        .def(py::init<const htm::SpatialPoolerConfig&, std::size_t>(), py::arg("config"), py::arg("input_width"))
        .def(
            "compute",
            [](htm::SpatialPooler& sp, const std::vector<std::uint8_t>& input, bool learn) {
                return sp.compute(input, learn).active;
            },
            py::arg("input"), py::arg("learn") = false)
        .def("permanences", [](const htm::SpatialPooler& sp) {
            const auto p = sp.permanences();
            return std::vector<double>(p.begin(), p.end());
        });

    // JSON in, JSON out: the same path the CLI takes.
    m.def(
        "run_config",
        [](const std::string& config_json) {
            const auto c = parse_experiment_config(config_json);
            return metrics_json(run_experiment(c)).dump();
        },
        py::arg("config_json"));
    m.def(
        "cost_config",
        [](const std::string& config_json, std::size_t series_length) {
            const auto c = parse_experiment_config(config_json);
            const auto r = cost_for(c, series_length);
            return py::make_tuple(r.inventory, r.estimate.area_um2, r.estimate.power_mw);
        },
        py::arg("config_json"), py::arg("series_length") = 152);
    m.def(
        "checkpoint_text",
        [](const std::string& config_json) {
            const auto c = parse_experiment_config(config_json);
            const auto r = run_experiment(c);
            if (!r.model) throw ConfigError("architecture has no checkpoint");
            std::ostringstream out;
            save_checkpoint(out, *r.model);
            return out.str();
        },
        py::arg("config_json"));
}
