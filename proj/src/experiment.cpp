#include "waferbench/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <initializer_list>
#include <set>

#include "waferbench/errors.hpp"
#include "waferbench/lstm.hpp"
#include "waferbench/nn.hpp"

namespace waferbench {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Architecture a) {
    switch (a) {
        case Architecture::lstm_sequential: return "lstm_sequential";
        case Architecture::lstm_windowed: return "lstm_windowed";
        case Architecture::perceptron: return "perceptron";
        case Architecture::ann: return "ann";
        case Architecture::dnn: return "dnn";
        case Architecture::htm: break;
    }
    return "htm";
}

Architecture parse_architecture(std::string_view name) {
    for (auto a : table1_order) {
        if (to_string(a) == name) return a;
    }
    throw ConfigError("unknown architecture '" + std::string(name) + "'");
}

namespace {

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ConfigError("config section '" + std::string(section) + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in config section '" + std::string(section) + "'");
        }
    }
}

template <typename T>
T get(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

template <typename T>
void read(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = get<T>(j, key);
}

std::optional<char> parse_delimiter(const json& v) {
    if (v.is_null()) return std::nullopt;
    const auto s = v.get<std::string>();
    if (s == "\\t" || s == "tab") return '\t';
    if (s.size() != 1) throw ConfigError("delimiter must be a single character, \"tab\", or null");
    return s[0];
}

ordered_json metrics_to_json(const Metrics& m) {
    return {{"accuracy", m.accuracy()},
            {"balanced_accuracy", m.balanced_accuracy()},
            {"recall_normal", m.recall_normal()},
            {"recall_abnormal", m.recall_abnormal()},
            {"true_positive", m.true_positive},
            {"true_negative", m.true_negative},
            {"false_positive", m.false_positive},
            {"false_negative", m.false_negative},
            {"total", m.total()}};
}

ordered_json device_to_json(const crossbar::DeviceModel& d) {
    ordered_json j;
    j["g_min"] = d.g_min;
    j["g_max"] = d.g_max;
    j["levels"] = d.levels ? json(*d.levels) : json(nullptr);
    j["read_noise_sigma"] = d.read_noise_sigma;
    j["gain_error_sigma"] = d.gain_error_sigma;
    return j;
}

std::size_t test_row(std::size_t index, std::size_t base, std::size_t count) {
    if (index < base || index - base >= count) {
        throw ConfigError("wafer index " + std::to_string(index) + " out of range for " + std::to_string(count) +
                          " test records (base " + std::to_string(base) + ")");
    }
    return index - base;
}

}  // namespace

crossbar::DeviceModel parse_device(const json& j) {
    crossbar::DeviceModel d;
    read(j, "g_min", d.g_min);
    read(j, "g_max", d.g_max);
    if (j.contains("levels")) {
        const auto& v = j.at("levels");
        if (v.is_null() || (v.is_string() && v.get<std::string>() == "continuous")) {
            d.levels.reset();
        } else {
            d.levels = get<int>(j, "levels");
        }
    }
    read(j, "read_noise_sigma", d.read_noise_sigma);
    read(j, "gain_error_sigma", d.gain_error_sigma);
    d.validate();
    return d;
}

hwcost::CostTable parse_cost_table(const json& j) {
    check_keys(j, "cost",
               {"memristor_area_um2", "neuron_area_um2", "gate_block_area_um2", "memristor_power_mw",
                "neuron_power_mw", "gate_block_power_mw", "note"});
    hwcost::CostTable t;
    read(j, "memristor_area_um2", t.memristor_area_um2);
    read(j, "neuron_area_um2", t.neuron_area_um2);
    read(j, "gate_block_area_um2", t.gate_block_area_um2);
    read(j, "memristor_power_mw", t.memristor_power_mw);
    read(j, "neuron_power_mw", t.neuron_power_mw);
    read(j, "gate_block_power_mw", t.gate_block_power_mw);
    t.validate();
    return t;
}

ordered_json to_json(const hwcost::CostTable& t) {
    return {{"memristor_area_um2", t.memristor_area_um2},   {"neuron_area_um2", t.neuron_area_um2},
            {"gate_block_area_um2", t.gate_block_area_um2}, {"memristor_power_mw", t.memristor_power_mw},
            {"neuron_power_mw", t.neuron_power_mw},         {"gate_block_power_mw", t.gate_block_power_mw}};
}

void apply_overrides(ExperimentConfig& c, const json& j) {
    check_keys(j, "top level",
               {"architecture", "seed", "output_dir", "dataset", "train", "network", "htm", "analog", "cost",
                "table1"});
    if (j.contains("architecture")) c.architecture = parse_architecture(get<std::string>(j, "architecture"));
    read(j, "seed", c.seed);
    read(j, "output_dir", c.output_dir);

    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        check_keys(d, "dataset", {"train", "test", "delimiter", "series_length", "scale_max"});
        read(d, "train", c.dataset.train_path);
        read(d, "test", c.dataset.test_path);
        if (d.contains("delimiter")) c.dataset.delimiter = parse_delimiter(d.at("delimiter"));
        if (d.contains("series_length")) {
            c.dataset.series_length =
                d.at("series_length").is_null() ? std::nullopt : std::optional(get<std::size_t>(d, "series_length"));
        }
        if (d.contains("scale_max")) {
            c.dataset.scale_max_explicit = true;
            c.dataset.scale_max =
                d.at("scale_max").is_null() ? std::nullopt : std::optional(get<double>(d, "scale_max"));
        }
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        check_keys(t, "train", {"learning_rate", "epochs", "shuffle", "gradient_clip_norm"});
        read(t, "learning_rate", c.train.learning_rate);
        read(t, "epochs", c.train.epochs);
        read(t, "shuffle", c.train.shuffle);
        if (t.contains("gradient_clip_norm")) {
            c.clip_explicit = true;
            c.train.gradient_clip_norm = t.at("gradient_clip_norm").is_null()
                                             ? std::nullopt
                                             : std::optional(get<double>(t, "gradient_clip_norm"));
        }
    }
    if (j.contains("network")) {
        const auto& n = j.at("network");
        check_keys(n, "network", {"use_bias", "ann_hidden", "lstm_hidden"});
        read(n, "use_bias", c.use_bias);
        read(n, "ann_hidden", c.ann_hidden);
        read(n, "lstm_hidden", c.lstm_hidden);
    }
    if (j.contains("htm")) {
        const auto& h = j.at("htm");
        check_keys(h, "htm",
                   {"num_columns", "active_columns", "potential_fraction", "permanence_threshold",
                    "permanence_increment", "permanence_decrement", "bins", "pooler_epochs"});
        read(h, "num_columns", c.htm.pooler.num_columns);
        read(h, "active_columns", c.htm.pooler.active_columns);
        read(h, "potential_fraction", c.htm.pooler.potential_fraction);
        read(h, "permanence_threshold", c.htm.pooler.permanence_threshold);
        read(h, "permanence_increment", c.htm.pooler.permanence_increment);
        read(h, "permanence_decrement", c.htm.pooler.permanence_decrement);
        read(h, "bins", c.htm.bins);
        read(h, "pooler_epochs", c.htm.pooler_epochs);
    }
    if (j.contains("analog")) {
        const auto& a = j.at("analog");
        check_keys(a, "analog",
                   {"enabled", "g_min", "g_max", "levels", "read_noise_sigma", "gain_error_sigma", "output_scale_mv",
                    "noise_seed", "gain_seed", "table2_indices", "index_base", "fig2_index"});
        read(a, "enabled", c.analog.enabled);
        json dev = json::object();
        dev["g_min"] = c.analog.device.g_min;
        dev["g_max"] = c.analog.device.g_max;
        dev["levels"] = c.analog.device.levels ? json(*c.analog.device.levels) : json(nullptr);
        dev["read_noise_sigma"] = c.analog.device.read_noise_sigma;
        dev["gain_error_sigma"] = c.analog.device.gain_error_sigma;
        for (const char* k : {"g_min", "g_max", "levels", "read_noise_sigma", "gain_error_sigma"}) {
            if (a.contains(k)) dev[k] = a.at(k);
        }
        c.analog.device = parse_device(dev);
        read(a, "output_scale_mv", c.analog.output_scale_mv);
        read(a, "noise_seed", c.analog.noise_seed);
        read(a, "gain_seed", c.analog.gain_seed);
        read(a, "table2_indices", c.analog.table2_indices);
        read(a, "index_base", c.analog.index_base);
        read(a, "fig2_index", c.analog.fig2_index);
        if (!(c.analog.output_scale_mv > 0.0)) throw ConfigError("output_scale_mv must be > 0");
    }
    if (j.contains("cost")) {
        c.cost = j.at("cost").is_null() ? std::nullopt : std::optional(parse_cost_table(j.at("cost")));
    }
    if (j.contains("table1")) {
        const auto& t = j.at("table1");
        if (!t.is_object()) throw ConfigError("config section 'table1' must be an object");
        for (const auto& [key, value] : t.items()) {
            parse_architecture(key);
            if (!value.is_object()) throw ConfigError("table1." + key + " must be an object");
        }
        c.table1_overrides = t;
    }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("seed")) throw ConfigError("config must set 'seed'");
    ExperimentConfig c;
    apply_overrides(c, j);
    c.source_text = json_text;
    c.train.seed = c.seed;
    c.train.validate();
    return c;
}

std::optional<double> effective_scale_max(const ExperimentConfig& c) {
    if (c.dataset.scale_max_explicit) return c.dataset.scale_max;
    switch (c.architecture) {
        case Architecture::lstm_sequential: return 0.5;
        case Architecture::lstm_windowed: return 0.1;
        default: return std::nullopt;
    }
}

TrainConfig effective_train_config(const ExperimentConfig& c) {
    TrainConfig t = c.train;
    t.seed = c.seed;
    if (!c.clip_explicit) {
        t.gradient_clip_norm =
            c.architecture == Architecture::lstm_sequential ? std::optional(5.0) : std::nullopt;
    }
    return t;
}

LstmConfig effective_lstm_config(const ExperimentConfig& c, std::size_t series_length) {
    if (c.architecture == Architecture::lstm_windowed) {
        return LstmConfig::windowed(series_length, c.lstm_hidden ? c.lstm_hidden : 1);
    }
    return LstmConfig::sequential(series_length, c.lstm_hidden ? c.lstm_hidden : 4);
}

NetworkSpec effective_network_spec(const ExperimentConfig& c, std::size_t series_length) {
    NetworkSpec spec;
    switch (c.architecture) {
        case Architecture::perceptron: spec = NetworkSpec::perceptron(series_length); break;
        case Architecture::ann: spec = NetworkSpec::ann(series_length, c.ann_hidden); break;
        case Architecture::dnn: spec = NetworkSpec::dnn(series_length); break;
        default: throw ConfigError(std::string(to_string(c.architecture)) + " is not a dense network");
    }
    spec.use_bias = c.use_bias;
    return spec;
}

ordered_json to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["architecture"] = to_string(c.architecture);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    ordered_json d;
    d["train"] = c.dataset.train_path;
    d["test"] = c.dataset.test_path;
    d["delimiter"] = c.dataset.delimiter ? json(std::string(1, *c.dataset.delimiter)) : json(nullptr);
    d["series_length"] = c.dataset.series_length ? json(*c.dataset.series_length) : json(nullptr);
    const auto scale = effective_scale_max(c);
    d["scale_max"] = scale ? json(*scale) : json(nullptr);
    j["dataset"] = d;
    const auto t = effective_train_config(c);
    j["train"] = {{"learning_rate", t.learning_rate},
                  {"epochs", t.epochs},
                  {"shuffle", t.shuffle},
                  {"gradient_clip_norm", t.gradient_clip_norm ? json(*t.gradient_clip_norm) : json(nullptr)}};
    j["network"] = {{"use_bias", c.use_bias}, {"ann_hidden", c.ann_hidden}, {"lstm_hidden", c.lstm_hidden}};
    j["htm"] = {{"num_columns", c.htm.pooler.num_columns},
                {"active_columns", c.htm.pooler.active_columns},
                {"potential_fraction", c.htm.pooler.potential_fraction},
                {"permanence_threshold", c.htm.pooler.permanence_threshold},
                {"permanence_increment", c.htm.pooler.permanence_increment},
                {"permanence_decrement", c.htm.pooler.permanence_decrement},
                {"bins", c.htm.bins},
                {"pooler_epochs", c.htm.pooler_epochs}};
    ordered_json a = device_to_json(c.analog.device);
    a["enabled"] = c.analog.enabled;
    a["output_scale_mv"] = c.analog.output_scale_mv;
    a["noise_seed"] = c.analog.noise_seed;
    a["gain_seed"] = c.analog.gain_seed;
    a["table2_indices"] = c.analog.table2_indices;
    a["index_base"] = c.analog.index_base;
    a["fig2_index"] = c.analog.fig2_index;
    j["analog"] = a;
    j["cost"] = c.cost ? to_json(*c.cost) : ordered_json(nullptr);
    return j;
}

SplitDataset prepare_dataset(const ExperimentConfig& c) {
    if (c.dataset.train_path.empty() || c.dataset.test_path.empty()) {
        throw DatasetError("config must name dataset.train and dataset.test");
    }
    auto data = load_ucr(c.dataset.train_path, c.dataset.test_path, c.dataset.delimiter, c.dataset.series_length);
    if (const auto scale = effective_scale_max(c)) data = scale_inputs(data, *scale);
    return data;
}

CostResult cost_for(const ExperimentConfig& c, std::size_t series_length) {
    if (!c.cost) throw ConfigError("no cost table configured");
    hwcost::Inventory inv;
    switch (c.architecture) {
        case Architecture::lstm_sequential:
        case Architecture::lstm_windowed: inv = hwcost::inventory(effective_lstm_config(c, series_length)); break;
        case Architecture::htm: inv = hwcost::inventory(c.htm.pooler, series_length * c.htm.bins); break;
        default: inv = hwcost::inventory(effective_network_spec(c, series_length)); break;
    }
    return {inv, hwcost::estimate(inv, *c.cost)};
}

double software_predict(const Model& model, std::span<const double> values) {
    return std::visit(
        [&](const auto& m) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DenseModel>) {
                return predict(m.spec, m.params, values);
            } else {
                return predict(m.params, m.config, values);
            }
        },
        model);
}

namespace {

void finish_run(const ExperimentConfig& c, const SplitDataset& data, RunResult& r) {
    if (r.model) {
        const auto& model = *r.model;
        Metrics train_m, test_m;
        for (const auto& rec : data.train) train_m.add(rec.label, predicted_class(software_predict(model, rec.values)));
        for (const auto& rec : data.test) test_m.add(rec.label, predicted_class(software_predict(model, rec.values)));
        r.train_metrics = train_m;
        r.test_metrics = test_m;
        if (c.analog.enabled) {
            const auto report = analog_agreement(model, data.test, c.analog);
            r.analog_agreement = report.agreement();
            Metrics am;
            for (const auto& row : report.rows) am.add(row.label, predicted_class(row.analog_mv));
            r.analog_test_metrics = am;
        }
    }
    if (c.cost) r.cost = cost_for(c, data.series_length);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, const SplitDataset& data) {
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    r.architecture = c.architecture;
    const auto tc = effective_train_config(c);
    switch (c.architecture) {
        case Architecture::perceptron:
        case Architecture::ann:
        case Architecture::dnn: {
            const auto spec = effective_network_spec(c, data.series_length);
            auto trained = train(spec, data.train, tc);
            r.trace = std::move(trained.trace);
            r.updates = trained.updates;
            r.model = DenseModel{spec, std::move(trained.params)};
            break;
        }
        case Architecture::lstm_sequential:
        case Architecture::lstm_windowed: {
            const auto cfg = effective_lstm_config(c, data.series_length);
            auto trained = train_lstm(cfg, data.train, tc);
            r.trace = std::move(trained.trace);
            r.updates = trained.updates;
            r.model = LstmModel{cfg, std::move(trained.params)};
            break;
        }
        case Architecture::htm: {
            auto hc = c.htm;
            hc.pooler.seed = mix_seed(c.seed, 0x48544dULL);
            auto res = htm::run_htm(data, hc, tc);
            r.trace = std::move(res.trace);
            r.updates = r.trace.size() * data.train.size();
            r.train_metrics = res.train_metrics;
            r.test_metrics = res.test_metrics;
            break;
        }
    }
    finish_run(c, data, r);
    r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

RunResult run_experiment(const ExperimentConfig& c) { return run_experiment(c, prepare_dataset(c)); }

RunResult evaluate_checkpoint(const ExperimentConfig& c, const Model& model, const SplitDataset& data) {
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    r.architecture = c.architecture;
    r.model = model;
    finish_run(c, data, r);
    r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

ordered_json metrics_json(const RunResult& r) {
    ordered_json j;
    j["architecture"] = to_string(r.architecture);
    j["updates"] = r.updates;
    ordered_json trace = ordered_json::array();
    for (const auto& e : r.trace) {
        trace.push_back({{"epoch", e.epoch}, {"mean_loss", e.mean_loss}, {"train_accuracy", e.train_accuracy}});
    }
    j["trace"] = trace;
    j["final_train_loss"] = r.trace.empty() ? ordered_json(nullptr) : ordered_json(r.trace.back().mean_loss);
    j["train"] = metrics_to_json(r.train_metrics);
    j["test"] = metrics_to_json(r.test_metrics);
    if (r.analog_agreement) {
        j["analog"] = {{"sign_agreement", *r.analog_agreement}, {"test", metrics_to_json(*r.analog_test_metrics)}};
    }
    if (r.cost) {
        j["cost"] = {{"basis", "calibrated"},
                     {"memristor_count", r.cost->inventory.memristor_count},
                     {"neuron_count", r.cost->inventory.neuron_count},
                     {"gate_block_count", r.cost->inventory.gate_block_count},
                     {"area_um2", r.cost->estimate.area_um2},
                     {"power_mw", r.cost->estimate.power_mw}};
    }
    return j;
}

ordered_json report_json(const RunResult& r, const ExperimentConfig& c) {
    ordered_json j;
    j["metrics"] = metrics_json(r);
    j["wall_clock_seconds"] = r.wall_clock_seconds;
    j["seed"] = c.seed;
    j["effective_config"] = to_json(c);
    j["config_echo"] = c.source_text;
    return j;
}

crossbar::AgreementReport analog_agreement(const Model& model, const std::vector<TimeSeriesRecord>& records,
                                           const std::vector<std::size_t>& rows, const AnalogConfig& analog,
                                           const std::vector<std::size_t>& reported_indices) {
    std::vector<double> analog_mv, software;
    std::vector<int> labels;
    for (auto row : rows) {
        if (row >= records.size()) throw ConfigError("record row " + std::to_string(row) + " out of range");
    }
    std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DenseModel>) {
                const auto net =
                    crossbar::compile_dense(m.spec, m.params, analog.device, analog.output_scale_mv, analog.gain_seed);
                for (auto row : rows) {
                    analog_mv.push_back(
                        crossbar::analog_forward(net, analog.device, records[row].values, analog.noise_seed, row));
                }
            } else {
                const auto net = crossbar::compile_lstm(m.config, m.params, analog.device, analog.output_scale_mv,
                                                        analog.gain_seed);
                for (auto row : rows) {
                    analog_mv.push_back(
                        crossbar::analog_forward(net, analog.device, records[row].values, analog.noise_seed, row));
                }
            }
        },
        model);
    for (auto row : rows) {
        software.push_back(software_predict(model, records[row].values));
        labels.push_back(records[row].label);
    }
    return crossbar::agreement_report(analog_mv, software, labels,
                                      reported_indices.empty() ? std::span<const std::size_t>(rows)
                                                               : std::span<const std::size_t>(reported_indices));
}

crossbar::AgreementReport analog_agreement(const Model& model, const std::vector<TimeSeriesRecord>& records,
                                           const AnalogConfig& analog) {
    std::vector<std::size_t> rows(records.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return analog_agreement(model, records, rows, analog);
}

crossbar::AgreementReport table2(const Model& model, const std::vector<TimeSeriesRecord>& test,
                                 const std::vector<std::size_t>& indices, const AnalogConfig& analog) {
    std::vector<std::size_t> rows;
    for (auto idx : indices) rows.push_back(test_row(idx, analog.index_base, test.size()));
    if (rows.empty()) return {};
    return analog_agreement(model, test, rows, analog, indices);
}

UnitTraces fig2(const Model& model, const std::vector<TimeSeriesRecord>& test, std::size_t index,
                const AnalogConfig& analog) {
    const auto* lstm = std::get_if<LstmModel>(&model);
    if (!lstm) throw ConfigError("fig2 needs an LSTM checkpoint");
    const auto row = test_row(index, analog.index_base, test.size());
    const auto net =
        crossbar::compile_lstm(lstm->config, lstm->params, analog.device, analog.output_scale_mv, analog.gain_seed);
    return {crossbar::analog_unit_traces(net, analog.device, test[row].values, analog.noise_seed, row),
            export_unit_traces(lstm->params, lstm->config, test[row].values)};
}

std::vector<Table1Row> make_table1(const std::vector<Table1Row>& rows) {
    std::vector<Table1Row> out;
    for (auto arch : table1_order) {
        const auto n = std::count_if(rows.begin(), rows.end(), [&](const auto& r) { return r.architecture == arch; });
        if (n == 0) throw ConfigError("table1: missing run for " + std::string(to_string(arch)));
        if (n > 1) throw ConfigError("table1: duplicate run for " + std::string(to_string(arch)));
        out.push_back(*std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.architecture == arch; }));
    }
    if (rows.size() != out.size()) throw ConfigError("table1: unexpected extra rows");
    return out;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
    auto method = [](Architecture a) -> const char* {
        switch (a) {
            case Architecture::lstm_sequential: return "LSTM + ANN layer (sequential)";
            case Architecture::lstm_windowed: return "Single LSTM layer (windowed)";
            case Architecture::perceptron: return "Perceptron (tanh)";
            case Architecture::ann: return "3 layer ANN";
            case Architecture::dnn: return "DNN (5 layers)";
            case Architecture::htm: break;
        }
        return "Modified HTM (spatial pooler)";
    };
    auto comment = [](Architecture a) -> const char* {
        switch (a) {
            case Architecture::lstm_sequential: return "4 hidden units; one sample per step";
            case Architecture::lstm_windowed: return "1 hidden unit; whole series in one step";
            case Architecture::perceptron: return "accuracy plateaus as epochs grow";
            case Architecture::ann: return "converges slower than LSTM at equal iterations";
            case Architecture::dnn: return "needs more training iterations";
            case Architecture::htm: break;
        }
        return "few independent sensor features; does not converge";
    };
    auto status = [](Architecture a) {
        return (a == Architecture::ann || a == Architecture::dnn || a == Architecture::htm) ? "report-only" : "gated";
    };
    out << "method,architecture,accuracy,balanced_accuracy,area_um2,power_mw,cost_basis,accuracy_status,comment\n";
    char buf[64];
    for (const auto& r : rows) {
        out << '"' << method(r.architecture) << "\"," << to_string(r.architecture);
        if (r.accuracy && r.balanced_accuracy) {
            std::snprintf(buf, sizeof buf, ",%.4f,%.4f", *r.accuracy, *r.balanced_accuracy);
            out << buf;
        } else {
            out << ",,";
        }
        if (r.cost) {
            std::snprintf(buf, sizeof buf, ",%.2f,%.2f,calibrated", r.cost->area_um2, r.cost->power_mw);
            out << buf;
        } else {
            out << ",,,";
        }
        out << ',' << status(r.architecture) << ",\"" << comment(r.architecture) << "\"\n";
    }
}

}  // namespace waferbench
