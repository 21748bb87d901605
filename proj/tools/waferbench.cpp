// waferbench command-line driver.
//
// Exit codes: 0 ok, 1 other failure, 2 config/usage/checkpoint, 3 dataset,
// 4 training divergence, 5 output directory already populated.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "waferbench/checkpoint.hpp"
#include "waferbench/errors.hpp"
#include "waferbench/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace waferbench;

namespace {

struct OutputExists : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::string> arch;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::optional<std::string> scale_max;  // number or "none"
    std::optional<std::size_t> series_length;
    std::optional<std::string> train;
    std::optional<std::string> test;
    std::string checkpoint;
};

void add_common(CLI::App* cmd, Flags& f, bool with_arch = true) {
    cmd->add_option("--config", f.config, "experiment JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "run seed (overrides the config)");
    cmd->add_option("--out", f.out, "output directory (must not exist or be empty)");
    if (with_arch) cmd->add_option("--arch", f.arch, "architecture");
    cmd->add_option("--epochs", f.epochs, "training epochs");
    cmd->add_option("--lr", f.lr, "learning rate");
    cmd->add_option("--scale-max", f.scale_max, "input scaling target, or 'none'");
    cmd->add_option("--series-length", f.series_length, "samples kept per series");
    cmd->add_option("--train", f.train, "training split file");
    cmd->add_option("--test", f.test, "test split file");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

void apply_flags(ExperimentConfig& c, const Flags& f, bool allow_arch = true) {
    if (f.arch && allow_arch) c.architecture = parse_architecture(*f.arch);
    if (f.seed) c.seed = *f.seed;
    if (f.epochs) c.train.epochs = *f.epochs;
    if (f.lr) c.train.learning_rate = *f.lr;
    if (f.scale_max) {
        c.dataset.scale_max_explicit = true;
        if (*f.scale_max == "none") {
            c.dataset.scale_max.reset();
        } else {
            try {
                c.dataset.scale_max = std::stod(*f.scale_max);
            } catch (const std::exception&) {
                throw ConfigError("--scale-max must be a number or 'none'");
            }
        }
    }
    if (f.series_length) c.dataset.series_length = *f.series_length;
    if (f.train) c.dataset.train_path = *f.train;
    if (f.test) c.dataset.test_path = *f.test;
    c.train.seed = c.seed;
    c.train.validate();
}

ExperimentConfig load_config(const Flags& f) {
    auto c = parse_experiment_config(read_file(f.config));
    apply_flags(c, f);
    if (!f.out.empty()) c.output_dir = f.out;
    return c;
}

// Refuses to write into a populated directory; never overwrites.
fs::path prepare_output(const ExperimentConfig& c) {
    if (c.output_dir.empty()) throw ConfigError("no output directory: pass --out or set output_dir");
    const fs::path dir(c.output_dir);
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir) || !fs::is_empty(dir)) {
            throw OutputExists("output directory " + dir.string() + " already exists and is not empty");
        }
    }
    fs::create_directories(dir);
    return dir;
}

bool compatible(Architecture a, const Model& m) {
    if (const auto* l = std::get_if<LstmModel>(&m)) {
        return (a == Architecture::lstm_sequential && l->config.mode == LstmMode::sequential) ||
               (a == Architecture::lstm_windowed && l->config.mode == LstmMode::windowed);
    }
    return a == Architecture::perceptron || a == Architecture::ann || a == Architecture::dnn;
}

Model load_model(const std::string& path, const ExperimentConfig& c, std::size_t series_length) {
    if (path.empty()) throw ConfigError("--checkpoint is required");
    auto model = load_checkpoint(fs::path(path));
    if (!compatible(c.architecture, model)) {
        throw ConfigError("checkpoint does not hold a " + std::string(to_string(c.architecture)) + " model");
    }
    const std::size_t n = std::visit(
        [](const auto& m) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DenseModel>) {
                return m.spec.input_size();
            } else {
                return m.config.series_length();
            }
        },
        model);
    if (n != series_length) {
        throw DatasetError("checkpoint expects series length " + std::to_string(n) + ", dataset has " +
                           std::to_string(series_length));
    }
    return model;
}

void write_run(const fs::path& dir, const RunResult& r, const ExperimentConfig& c) {
    write_file(dir / "metrics.json", dump(metrics_json(r)));
    write_file(dir / "report.json", dump(report_json(r, c)));
    if (r.model) {
        std::ostringstream ck;
        save_checkpoint(ck, *r.model);
        write_file(dir / "checkpoint.txt", ck.str());
    }
}

void print_summary(const RunResult& r) {
    std::printf("%s: test accuracy %.4f, balanced %.4f", std::string(to_string(r.architecture)).c_str(),
                r.test_metrics.accuracy(), r.test_metrics.balanced_accuracy());
    if (r.analog_agreement) std::printf(", analog sign agreement %.4f", *r.analog_agreement);
    std::printf("\n");
}

int cmd_train(const Flags& f) {
    const auto c = load_config(f);
    const auto dir = prepare_output(c);
    const auto data = prepare_dataset(c);
    const auto r = run_experiment(c, data);
    write_run(dir, r, c);
    print_summary(r);
    return 0;
}

int cmd_eval(const Flags& f) {
    const auto c = load_config(f);
    const auto dir = prepare_output(c);
    const auto data = prepare_dataset(c);
    const auto model = load_model(f.checkpoint, c, data.series_length);
    auto r = evaluate_checkpoint(c, model, data);
    r.model.reset();  // the checkpoint already exists
    write_run(dir, r, c);
    print_summary(r);
    return 0;
}

int cmd_analog(const Flags& f) {
    auto c = load_config(f);
    c.analog.enabled = true;
    if (c.architecture == Architecture::htm) throw ConfigError("analog needs a dense or LSTM model");
    const auto dir = prepare_output(c);
    const auto data = prepare_dataset(c);
    RunResult r;
    if (f.checkpoint.empty()) {
        r = run_experiment(c, data);
    } else {
        r = evaluate_checkpoint(c, load_model(f.checkpoint, c, data.series_length), data);
    }
    std::ostringstream csv;
    crossbar::write_agreement_csv(csv, analog_agreement(*r.model, data.test, c.analog));
    write_file(dir / "agreement.csv", csv.str());
    if (!f.checkpoint.empty()) r.model.reset();
    write_run(dir, r, c);
    print_summary(r);
    return 0;
}

std::size_t series_length_for_cost(const ExperimentConfig& c) {
    if (c.dataset.series_length) return *c.dataset.series_length;
    return prepare_dataset(c).series_length;
}

int cmd_cost(const Flags& f) {
    const auto c = load_config(f);
    if (!c.cost) throw ConfigError("config has no cost section");
    const auto dir = prepare_output(c);
    RunResult r;
    r.architecture = c.architecture;
    r.cost = cost_for(c, series_length_for_cost(c));
    ordered_json cost = metrics_json(r)["cost"];
    cost["architecture"] = to_string(c.architecture);
    write_file(dir / "cost.json", dump(cost));
    write_file(dir / "metrics.json", dump(metrics_json(r)));
    write_file(dir / "report.json", dump(report_json(r, c)));
    std::printf("%s: %zu memristors, %zu neurons, %zu gate blocks, %.2f um^2, %.2f mW\n",
                std::string(to_string(c.architecture)).c_str(), r.cost->inventory.memristor_count,
                r.cost->inventory.neuron_count, r.cost->inventory.gate_block_count, r.cost->estimate.area_um2,
                r.cost->estimate.power_mw);
    return 0;
}

int cmd_table1(const Flags& f, bool cost_only) {
    auto base = parse_experiment_config(read_file(f.config));
    apply_flags(base, f, false);
    if (!f.out.empty()) base.output_dir = f.out;
    if (cost_only && !base.cost) throw ConfigError("--cost-only needs a cost section");
    const auto dir = prepare_output(base);

    std::vector<Table1Row> rows;
    ordered_json runs = ordered_json::array();
    ordered_json reports = ordered_json::array();
    for (auto arch : table1_order) {
        auto c = base;
        c.architecture = arch;
        const auto key = std::string(to_string(arch));
        if (base.table1_overrides.contains(key)) apply_overrides(c, base.table1_overrides.at(key));
        apply_flags(c, f, false);
        c.analog.enabled = false;

        Table1Row row;
        row.architecture = arch;
        RunResult r;
        r.architecture = arch;
        if (cost_only) {
            r.cost = cost_for(c, series_length_for_cost(c));
        } else {
            r = run_experiment(c, prepare_dataset(c));
            row.accuracy = r.test_metrics.accuracy();
            row.balanced_accuracy = r.test_metrics.balanced_accuracy();
            std::fprintf(stderr, "%s done: test accuracy %.4f\n", key.c_str(), *row.accuracy);
        }
        if (r.cost) row.cost = r.cost->estimate;
        rows.push_back(row);
        runs.push_back(metrics_json(r));
        reports.push_back(report_json(r, c));
    }
    std::ostringstream csv;
    write_table1_csv(csv, make_table1(rows));
    write_file(dir / "table1.csv", csv.str());
    write_file(dir / "metrics.json", dump(ordered_json{{"runs", runs}}));
    write_file(dir / "report.json", dump(ordered_json{{"seed", base.seed},
                                                      {"config_echo", base.source_text},
                                                      {"runs", reports}}));
    std::cout << csv.str();
    return 0;
}

int cmd_table2(const Flags& f, const std::optional<std::vector<std::size_t>>& indices,
               std::optional<std::size_t> index_base) {
    auto c = load_config(f);
    if (indices) c.analog.table2_indices = *indices;
    if (index_base) c.analog.index_base = *index_base;
    const auto dir = prepare_output(c);
    const auto data = prepare_dataset(c);
    const auto model = load_model(f.checkpoint, c, data.series_length);
    const auto report = table2(model, data.test, c.analog.table2_indices, c.analog);
    std::ostringstream csv;
    crossbar::write_agreement_csv(csv, report);
    write_file(dir / "table2.csv", csv.str());
    ordered_json m{{"sign_agreement", report.agreement()}, {"rows", report.rows.size()}};
    write_file(dir / "metrics.json", dump(m));
    write_file(dir / "report.json", dump(ordered_json{{"metrics", m},
                                                      {"seed", c.seed},
                                                      {"effective_config", to_json(c)},
                                                      {"config_echo", c.source_text}}));
    std::cout << csv.str();
    return 0;
}

int cmd_fig2(const Flags& f, std::optional<std::size_t> index, std::optional<std::size_t> index_base) {
    auto c = load_config(f);
    if (index) c.analog.fig2_index = *index;
    if (index_base) c.analog.index_base = *index_base;
    const auto dir = prepare_output(c);
    const auto data = prepare_dataset(c);
    const auto model = load_model(f.checkpoint, c, data.series_length);
    const auto traces = fig2(model, data.test, c.analog.fig2_index, c.analog);
    std::ostringstream wide, longform;
    crossbar::write_trace_wide_csv(wide, traces.analog_mv, traces.software);
    crossbar::write_trace_long_csv(longform, traces.analog_mv, traces.software);
    write_file(dir / "fig2.csv", wide.str());
    write_file(dir / "fig2_long.csv", longform.str());
    ordered_json m{{"index", c.analog.fig2_index},
                   {"steps", traces.software.rows},
                   {"units", traces.software.cols}};
    write_file(dir / "metrics.json", dump(m));
    write_file(dir / "report.json", dump(ordered_json{{"metrics", m},
                                                      {"seed", c.seed},
                                                      {"effective_config", to_json(c)},
                                                      {"config_echo", c.source_text}}));
    std::printf("fig2: %zu steps x %zu units for index %zu\n", traces.software.rows, traces.software.cols,
                c.analog.fig2_index);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wafer classification benchmark: LSTM, dense, HTM and memristor crossbar models"};
    app.require_subcommand(1);

    Flags f;
    bool cost_only = false;
    std::optional<std::vector<std::size_t>> indices;
    std::optional<std::size_t> index_base, fig_index;

    auto* train = app.add_subcommand("train", "train one architecture and evaluate it");
    add_common(train, f);
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    add_common(eval, f);
    eval->add_option("--checkpoint", f.checkpoint)->required()->check(CLI::ExistingFile);
    auto* analog = app.add_subcommand("analog", "compare crossbar and software predictions on the test split");
    add_common(analog, f);
    analog->add_option("--checkpoint", f.checkpoint, "use a stored model instead of training")
        ->check(CLI::ExistingFile);
    auto* cost = app.add_subcommand("cost", "hardware inventory and area/power estimate");
    add_common(cost, f);
    auto* t1 = app.add_subcommand("table1", "run every architecture and write table1.csv");
    add_common(t1, f, false);
    t1->add_flag("--cost-only", cost_only, "skip training; fill only the cost columns");
    auto* t2 = app.add_subcommand("table2", "analog vs software on selected test wafers");
    add_common(t2, f);
    t2->add_option("--checkpoint", f.checkpoint)->required()->check(CLI::ExistingFile);
    t2->add_option("--indices", indices, "wafer indices")->delimiter(',');
    t2->add_option("--index-base", index_base, "index of the first test row (default 1)");
    auto* f2 = app.add_subcommand("fig2", "per-step LSTM unit traces for one test wafer");
    add_common(f2, f);
    f2->add_option("--checkpoint", f.checkpoint)->required()->check(CLI::ExistingFile);
    f2->add_option("--index", fig_index, "wafer index");
    f2->add_option("--index-base", index_base, "index of the first test row (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train) return cmd_train(f);
        if (*eval) return cmd_eval(f);
        if (*analog) return cmd_analog(f);
        if (*cost) return cmd_cost(f);
        if (*t1) return cmd_table1(f, cost_only);
        if (*t2) return cmd_table2(f, indices, index_base);
        if (*f2) return cmd_fig2(f, fig_index, index_base);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const CheckpointError& e) {
        std::fprintf(stderr, "checkpoint error: %s\n", e.what());
        return 2;
    } catch (const DatasetError& e) {
        std::fprintf(stderr, "dataset error: %s\n", e.what());
        return 3;
    } catch (const ShapeError& e) {
        std::fprintf(stderr, "dataset error: %s\n", e.what());
        return 3;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "training diverged: %s\n", e.what());
        return 4;
    } catch (const OutputExists& e) {
        std::fprintf(stderr, "refusing to overwrite: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
