// advda: experiment runner for adversarially augmented parameter-transfer
// domain adaptation with logistic-regression models.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 degenerate metric.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "advda/csv_io.hpp"
#include "advda/domain_adaptation.hpp"
#include "advda/errors.hpp"
#include "advda/featurize.hpp"
#include "advda/harness.hpp"
#include "advda/kernels.hpp"
#include "advda/metrics.hpp"
#include "advda/model_io.hpp"
#include "advda/synth.hpp"
#include "advda/training.hpp"

namespace fs = std::filesystem;
using namespace advda;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitMetric = 4;

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<double> alpha_grid;
    std::vector<double> lambda_grid;
    std::optional<double> epsilon;
    std::optional<std::size_t> steps;
};

void add_experiment_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--seed", o.seed, "Run a single root seed instead of the config's list");
    cmd->add_option("--out", o.out, "Report path (default: stdout)");
    cmd->add_option("--alpha-grid", o.alpha_grid, "Comma-separated alpha values in (0,1]")->delimiter(',');
    cmd->add_option("--lambda-grid", o.lambda_grid, "Comma-separated lambda values >= 0")->delimiter(',');
    cmd->add_option("--epsilon", o.epsilon, "Attack radius (L-infinity)");
    cmd->add_option("--steps", o.steps, "Attack iterations");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig cfg = load_config(o.config_path);
    if (o.seed) {
        cfg.seeds = {*o.seed};
    }
    if (!o.alpha_grid.empty()) {
        cfg.alpha_grid = o.alpha_grid;
    }
    if (!o.lambda_grid.empty()) {
        cfg.lambda_grid = o.lambda_grid;
    }
    if (o.epsilon) {
        cfg.adversarial.epsilon = *o.epsilon;
    }
    if (o.steps) {
        cfg.adversarial.steps = *o.steps;
    }
    cfg.validate();
    return cfg;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    out << text << '\n';
}

void emit_report(const RunReport& report, const std::string& path) {
    emit(report.document().dump(2), path);
    std::cerr << report.kind << ": " << report.entries.size() << " entries in " << report.wall_time_s << " s\n";
}

// ---- featurize ------------------------------------------------------------

struct FeaturizeArgs {
    std::string meta;
    std::string out;
    std::size_t num_variables = 17;
    double fill = 0.0;
};

void run_featurize(const FeaturizeArgs& a) {
    std::ifstream in(a.meta);
    if (!in) {
        throw DataError("cannot open " + a.meta);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(a.meta + ": empty file");
    }
    const auto header = split_csv_line(line);
    auto col = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) {
                return c;
            }
        }
        return std::nullopt;
    };
    const auto file_col = col("file");
    const auto length_col = col("length_hours");
    if (!file_col || !length_col) {
        throw DataError(a.meta + ": needs 'file' and 'length_hours' columns");
    }
    const auto los_col = col("los_hours");
    const auto group_col = col("group");
    std::vector<std::size_t> label_cols;
    for (std::size_t k = 0; col("y" + std::to_string(k)); ++k) {
        label_cols.push_back(*col("y" + std::to_string(k)));
    }
    if (label_cols.empty() && !los_col) {
        throw DataError(a.meta + ": needs label columns y0.. or a los_hours column");
    }
    const fs::path base = fs::path(a.meta).parent_path();

    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<std::string> groups;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(a.meta + ": ragged row");
        }
        double length = 0.0;
        try {
            length = std::stod(cells[*length_col]);
        } catch (const std::logic_error&) {
            throw DataError(a.meta + ": bad length_hours '" + cells[*length_col] + "'");
        }
        auto episode = load_episode_csv(base / cells[*file_col], a.num_variables, length);
        const auto features = featurize_timeseries(episode, a.fill);
        xs.insert(xs.end(), features.begin(), features.end());
        if (!label_cols.empty()) {
            for (auto c : label_cols) {
                ys.push_back(std::stod(cells[c]));
            }
        } else {
            ys.push_back(los_bucketize(std::stod(cells[*los_col])));
        }
        if (group_col) {
            groups.push_back(cells[*group_col]);
        }
        ++rows;
    }
    if (rows == 0) {
        throw DataError(a.meta + ": no episodes listed");
    }
    Dataset ds;
    ds.X = Matrix(rows, a.num_variables * kFeaturesPerVariable, std::move(xs));
    const std::size_t k = label_cols.empty() ? 1 : label_cols.size();
    ds.Y = Matrix(rows, k, std::move(ys));
    ds.task = label_cols.empty() ? TaskKind::multi_class(kLosClasses)
                                 : (k == 1 ? TaskKind::binary() : TaskKind::multi_label(k));
    ds.feature_names = timeseries_feature_names(a.num_variables);
    if (group_col) {
        ds.group = std::move(groups);
    }
    save_csv(ds, a.out);
    std::cerr << "featurize: " << rows << " episodes x " << ds.d() << " features, task " << ds.task.to_string()
              << '\n';
}

// ---- synth ----------------------------------------------------------------

void run_synth(const SynthConfig& sc, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto domains = synth_shifted_domains(sc);
    const Dataset parts[] = {domains.source, domains.target};
    save_csv(concat(parts), fs::path(out_dir) / "domains.csv");
    save_csv(domains.source, fs::path(out_dir) / "source.csv");
    save_csv(domains.target, fs::path(out_dir) / "target.csv");
    const auto names = domains.source.feature_names;
    save_model({HeadBank(TaskKind::binary(), {domains.theta_star}), names}, fs::path(out_dir) / "theta_star.model");
    save_model({HeadBank(TaskKind::binary(), {domains.theta_target}), names},
               fs::path(out_dir) / "theta_target.model");
    std::cerr << "synth: wrote " << out_dir << "/{domains,source,target}.csv\n";
}

// ---- fit / eval -----------------------------------------------------------

struct FitArgs {
    std::string data;
    std::string task = "binary";
    std::string regime = "nt";
    std::string out;
    std::string source_model;
    double lambda = 0.0;
    TrainConfig train;
    AdvConfig adv;
};

void run_fit(const FitArgs& a) {
    CsvSchema schema;
    schema.task = TaskKind::parse(a.task);
    const auto loaded = load_csv(a.data, schema);
    if (loaded.imputed_cells) {
        std::cerr << "fit: imputed " << loaded.imputed_cells << " missing cells\n";
    }
    const Dataset& ds = loaded.data;
    FitReport report;
    if (a.regime == "nt") {
        report = fit_normal(ds, a.train);
    } else if (a.regime == "l1") {
        report = fit_l1(ds, a.train);
    } else if (a.regime == "at") {
        report = fit_adv_source(ds, a.train, a.adv);
    } else if (a.regime == "da" || a.regime == "at-da") {
        if (a.source_model.empty()) {
            throw ConfigError("--source-model is required for regime " + a.regime);
        }
        const DAConfig da{a.lambda, load_model(a.source_model).bank};
        report = a.regime == "da" ? fit_da(ds, a.train, da) : fit_adv_da(ds, a.train, a.adv, da);
    } else {
        throw ConfigError("unknown regime '" + a.regime + "' (nt, l1, at, da, at-da)");
    }
    save_model({report.params, ds.feature_names}, a.out);
    std::cerr << "fit: final loss " << report.loss_trace.back() << " after " << report.loss_trace.size()
              << " epochs (" << report.wall_time_s << " s)\n";
}

void run_eval(const std::string& model_path, const std::string& data_path, const std::string& out) {
    const auto model = load_model(model_path);
    CsvSchema schema;
    schema.task = model.bank.task();
    const auto loaded = load_csv(data_path, schema);
    if (loaded.data.feature_names != model.feature_names) {
        throw DataError("data features do not match the model's feature names");
    }
    const auto m = evaluate(model.bank, loaded.data);
    nlohmann::json j = {{"task", m.task.to_string()},
                        {"metric", m.metric_name},
                        {"score", m.headline},
                        {"n_eval", m.n_eval}};
    if (m.per_outcome) {
        nlohmann::json per = nlohmann::json::array();
        for (double v : *m.per_outcome) {
            per.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        }
        j["per_outcome"] = per;
        j["skipped_outcomes"] = m.skipped_outcomes;
    }
    emit(j.dump(2), out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adversarial-sample enhanced domain adaptation for logistic regression"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP worker threads (default: runtime setting)");

    Overrides shift_o;
    Overrides five_o;
    Overrides sparse_o;
    auto* shift_cmd = app.add_subcommand("shift-matrix", "Train on each domain, test on every domain");
    add_experiment_flags(shift_cmd, shift_o);
    auto* five_cmd = app.add_subcommand("five-way", "Compare two baselines and three transfer regimes");
    add_experiment_flags(five_cmd, five_o);
    auto* sparse_cmd = app.add_subcommand("sparsity", "Compare adversarial and L1-regularized weight vectors");
    add_experiment_flags(sparse_cmd, sparse_o);

    SynthConfig sc;
    std::string synth_out = "synth_out";
    auto* synth_cmd = app.add_subcommand("synth", "Write synthetic source/target domain CSVs");
    synth_cmd->add_option("--d", sc.d, "Feature dimension");
    synth_cmd->add_option("--n-source", sc.n_source, "Source rows");
    synth_cmd->add_option("--n-target", sc.n_target, "Target rows");
    synth_cmd->add_option("--shift", sc.shift, "Shift magnitude (0 = identical domains)");
    synth_cmd->add_option("--label-noise", sc.label_noise, "Label flip probability");
    synth_cmd->add_option("--informative", sc.informative, "Leading features carrying signal (0 = all)");
    synth_cmd->add_option("--seed", sc.seed, "Generator seed");
    synth_cmd->add_option("--out", synth_out, "Output directory");

    FeaturizeArgs fa;
    auto* feat_cmd = app.add_subcommand("featurize", "Episode CSVs -> windowed summary-statistic features");
    feat_cmd->add_option("--meta", fa.meta, "Episode list: file,length_hours[,los_hours][,y0..][,group]")->required();
    feat_cmd->add_option("--out", fa.out, "Feature CSV to write")->required();
    feat_cmd->add_option("--num-variables", fa.num_variables, "Number of clinical variables");
    feat_cmd->add_option("--fill", fa.fill, "Value for statistics of empty windows");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Train one model on a dataset CSV and save it");
    fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
    fit_cmd->add_option("--task", fit.task, "binary | multiclass:C | multilabel:k");
    fit_cmd->add_option("--regime", fit.regime, "nt | l1 | at | da | at-da");
    fit_cmd->add_option("--source-model", fit.source_model, "Frozen source model for da / at-da");
    fit_cmd->add_option("--lambda", fit.lambda, "Discrepancy penalty weight");
    fit_cmd->add_option("--learning-rate", fit.train.learning_rate);
    fit_cmd->add_option("--batch-size", fit.train.batch_size);
    fit_cmd->add_option("--epochs", fit.train.epochs);
    fit_cmd->add_option("--l1-weight", fit.train.l1_weight);
    fit_cmd->add_option("--l2-weight", fit.train.l2_weight);
    fit_cmd->add_option("--seed", fit.train.seed);
    fit_cmd->add_option("--epsilon", fit.adv.epsilon);
    fit_cmd->add_option("--steps", fit.adv.steps);
    fit_cmd->add_option("--alpha", fit.adv.alpha);
    fit_cmd->add_option("--out", fit.out, "Model file to write")->required();

    std::string eval_model;
    std::string eval_data;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "Score a saved model on a dataset CSV");
    eval_cmd->add_option("--model", eval_model, "Model file")->required();
    eval_cmd->add_option("--data", eval_data, "Dataset CSV")->required();
    eval_cmd->add_option("--out", eval_out, "Metrics JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        kernels::set_threads(threads);
        if (*shift_cmd) {
            emit_report(run_shift_matrix(resolve(shift_o)), shift_o.out);
        } else if (*five_cmd) {
            emit_report(run_five_way(resolve(five_o)), five_o.out);
        } else if (*sparse_cmd) {
            emit_report(run_sparsity_comparison(resolve(sparse_o)), sparse_o.out);
        } else if (*synth_cmd) {
            run_synth(sc, synth_out);
        } else if (*feat_cmd) {
            run_featurize(fa);
        } else if (*fit_cmd) {
            run_fit(fit);
        } else if (*eval_cmd) {
            run_eval(eval_model, eval_data, eval_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UndefinedMetric& e) {
        std::cerr << "degenerate metric: " << e.what() << '\n';
        return kExitMetric;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
