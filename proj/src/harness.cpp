#include "advda/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "advda/errors.hpp"
#include "advda/seeding.hpp"

namespace advda {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

TaskKind parse_task(const json& j) {
    try {
        if (j.is_string()) {
            return TaskKind::parse(j.get<std::string>());
        }
        check_keys(j, {"kind", "count"}, "task");
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "binary") {
            return TaskKind::binary();
        }
        const auto count = j.at("count").get<std::size_t>();
        if (kind == "multiclass") {
            return TaskKind::multi_class(count);
        }
        if (kind == "multilabel") {
            return TaskKind::multi_label(count);
        }
        throw ConfigError("task: unknown kind '" + kind + "'");
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("task: ") + e.what());
    } catch (const json::exception&) {
        throw ConfigError("task: malformed");
    }
}

DataSource parse_data(const json& j) {
    check_keys(j, {"synth", "csv"}, "data");
    DataSource src;
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        check_keys(s, {"d", "n_source", "n_target", "shift", "label_noise", "signal", "informative"}, "data.synth");
        SynthConfig c;
        c.d = get_or(s, "d", c.d, "data.synth");
        c.n_source = get_or(s, "n_source", c.n_source, "data.synth");
        c.n_target = get_or(s, "n_target", c.n_target, "data.synth");
        c.shift = get_or(s, "shift", c.shift, "data.synth");
        c.label_noise = get_or(s, "label_noise", c.label_noise, "data.synth");
        c.signal = get_or(s, "signal", c.signal, "data.synth");
        c.informative = get_or(s, "informative", c.informative, "data.synth");
        src.synth = c;
    }
    if (j.contains("csv")) {
        const auto& c = j.at("csv");
        check_keys(c, {"path", "group_column", "label_columns", "missing"}, "data.csv");
        src.csv_path = get_or<std::string>(c, "path", "", "data.csv");
        src.schema.group_column = get_or<std::string>(c, "group_column", "group", "data.csv");
        src.schema.label_columns = get_or<std::vector<std::string>>(c, "label_columns", {}, "data.csv");
        const auto missing = get_or<std::string>(c, "missing", "impute", "data.csv");
        if (missing == "impute") {
            src.schema.missing = MissingPolicy::ImputeMean;
        } else if (missing == "reject") {
            src.schema.missing = MissingPolicy::Reject;
        } else {
            throw ConfigError("data.csv.missing must be 'impute' or 'reject'");
        }
    }
    if (src.synth.has_value() == src.csv_path.has_value()) {
        throw ConfigError("data: specify exactly one of 'synth' or 'csv'");
    }
    return src;
}

json task_json(const TaskKind& t) {
    return t.to_string();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    check_keys(j,
               {"task", "data", "domains", "source", "target", "regimes", "train", "adversarial", "alpha_grid",
                "lambda_grid", "seeds", "target_train_limit", "standardize", "sparsity_l1_weight"},
               "config");
    ExperimentConfig cfg;
    if (j.contains("task")) {
        cfg.task = parse_task(j.at("task"));
    }
    if (!j.contains("data")) {
        throw ConfigError("config: missing 'data'");
    }
    cfg.data = parse_data(j.at("data"));
    cfg.source = get_or(j, "source", cfg.source, "config");
    cfg.target = get_or(j, "target", cfg.target, "config");
    if (j.contains("domains")) {
        if (!j.at("domains").is_array()) {
            throw ConfigError("config.domains: expected an array");
        }
        for (const auto& d : j.at("domains")) {
            if (d.is_string()) {
                cfg.domains.push_back({d.get<std::string>(), d.get<std::string>()});
            } else {
                check_keys(d, {"name", "selector"}, "config.domains[]");
                const auto name = get_or<std::string>(d, "name", "", "config.domains[]");
                cfg.domains.push_back({name, get_or<std::string>(d, "selector", name, "config.domains[]")});
            }
        }
    } else {
        cfg.domains = {{cfg.source, cfg.source}, {cfg.target, cfg.target}};
    }
    if (j.contains("regimes")) {
        cfg.regimes.clear();
        for (const auto& r : get_or<std::vector<std::string>>(j, "regimes", {}, "config")) {
            try {
                cfg.regimes.push_back(parse_regime(r));
            } catch (const InvalidInput& e) {
                throw ConfigError(std::string("config.regimes: ") + e.what());
            }
        }
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        check_keys(t, {"learning_rate", "batch_size", "epochs", "l1_weight", "l2_weight"}, "config.train");
        cfg.train.learning_rate = get_or(t, "learning_rate", cfg.train.learning_rate, "config.train");
        cfg.train.batch_size = get_or(t, "batch_size", cfg.train.batch_size, "config.train");
        cfg.train.epochs = get_or(t, "epochs", cfg.train.epochs, "config.train");
        cfg.train.l1_weight = get_or(t, "l1_weight", cfg.train.l1_weight, "config.train");
        cfg.train.l2_weight = get_or(t, "l2_weight", cfg.train.l2_weight, "config.train");
    }
    if (j.contains("adversarial")) {
        const auto& a = j.at("adversarial");
        check_keys(a, {"epsilon", "steps", "alpha"}, "config.adversarial");
        cfg.adversarial.epsilon = get_or(a, "epsilon", cfg.adversarial.epsilon, "config.adversarial");
        cfg.adversarial.steps = get_or(a, "steps", cfg.adversarial.steps, "config.adversarial");
        cfg.adversarial.alpha = get_or(a, "alpha", cfg.adversarial.alpha, "config.adversarial");
    }
    cfg.alpha_grid = get_or(j, "alpha_grid", cfg.alpha_grid, "config");
    cfg.lambda_grid = get_or(j, "lambda_grid", cfg.lambda_grid, "config");
    cfg.seeds = get_or(j, "seeds", cfg.seeds, "config");
    if (j.contains("target_train_limit") && !j.at("target_train_limit").is_null()) {
        cfg.target_train_limit = get_or<std::size_t>(j, "target_train_limit", 0, "config");
    }
    cfg.standardize = get_or(j, "standardize", cfg.standardize, "config");
    cfg.sparsity_l1_weight = get_or(j, "sparsity_l1_weight", cfg.sparsity_l1_weight, "config");
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    try {
        train.validate();
        adversarial.validate();
        if (data.synth) {
            data.synth->validate();
        }
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    if (data.synth && task.kind() != TaskKind::Kind::Binary) {
        throw ConfigError("synthetic domains are binary; set task to 'binary'");
    }
    if (data.csv_path && !std::filesystem::exists(*data.csv_path)) {
        throw ConfigError("data file not found: " + *data.csv_path);
    }
    if (seeds.empty()) {
        throw ConfigError("seeds must be nonempty");
    }
    if (alpha_grid.empty() || lambda_grid.empty()) {
        throw ConfigError("alpha and lambda grids must be nonempty");
    }
    for (double a : alpha_grid) {
        if (!(a > 0.0 && a <= 1.0)) {
            throw ConfigError("alpha grid values must lie in (0, 1]");
        }
    }
    for (double l : lambda_grid) {
        if (!(l >= 0.0)) {
            throw ConfigError("lambda grid values must be nonnegative");
        }
    }
    if (regimes.empty()) {
        throw ConfigError("regimes must be nonempty");
    }
    if (target_train_limit && *target_train_limit < 2) {
        throw ConfigError("target_train_limit must be at least 2");
    }
    if (!(sparsity_l1_weight >= 0.0)) {
        throw ConfigError("sparsity_l1_weight must be nonnegative");
    }
}

json ExperimentConfig::to_json() const {
    json j;
    j["task"] = task_json(task);
    json d;
    if (data.synth) {
        const auto& s = *data.synth;
        d["synth"] = {{"d", s.d},
                      {"n_source", s.n_source},
                      {"n_target", s.n_target},
                      {"shift", s.shift},
                      {"label_noise", s.label_noise},
                      {"signal", s.signal},
                      {"informative", s.informative}};
    } else {
        d["csv"] = {{"path", data.csv_path.value_or("")},
                    {"group_column", data.schema.group_column.value_or("")},
                    {"label_columns", data.schema.label_columns},
                    {"missing", data.schema.missing == MissingPolicy::ImputeMean ? "impute" : "reject"}};
    }
    j["data"] = d;
    json doms = json::array();
    for (const auto& s : domains) {
        doms.push_back({{"name", s.name}, {"selector", s.selector}});
    }
    j["domains"] = doms;
    j["source"] = source;
    j["target"] = target;
    json regs = json::array();
    for (auto r : regimes) {
        regs.push_back(to_string(r));
    }
    j["regimes"] = regs;
    j["train"] = {{"learning_rate", train.learning_rate},
                  {"batch_size", train.batch_size},
                  {"epochs", train.epochs},
                  {"l1_weight", train.l1_weight},
                  {"l2_weight", train.l2_weight}};
    j["adversarial"] = {{"epsilon", adversarial.epsilon}, {"steps", adversarial.steps}, {"alpha", adversarial.alpha}};
    j["alpha_grid"] = alpha_grid;
    j["lambda_grid"] = lambda_grid;
    j["seeds"] = seeds;
    j["target_train_limit"] = target_train_limit ? json(*target_train_limit) : json(nullptr);
    j["standardize"] = standardize;
    j["sparsity_l1_weight"] = sparsity_l1_weight;
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return ExperimentConfig::from_json(j);
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

namespace {

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json entry_json(const ReportEntry& e) {
    json j = {{"regime", e.regime},
              {"seed", e.seed},
              {"source", e.source},
              {"target", e.target},
              {"split", e.split},
              {"alpha", opt_json(e.alpha)},
              {"lambda", opt_json(e.lambda)},
              {"metric", e.metrics.metric_name},
              {"score", e.metrics.headline},
              {"n_eval", e.metrics.n_eval}};
    if (e.metrics.per_outcome) {
        json per = json::array();
        for (double v : *e.metrics.per_outcome) {
            per.push_back(std::isnan(v) ? json(nullptr) : json(v));
        }
        j["per_outcome"] = per;
        j["skipped_outcomes"] = e.metrics.skipped_outcomes;
    }
    return j;
}

auto entry_key(const ReportEntry& e) {
    return std::make_tuple(e.regime, e.seed, e.source, e.target, e.split, e.alpha, e.lambda);
}

}  // namespace

json RunReport::body() const {
    json entries_json = json::array();
    for (const auto& e : entries) {
        entries_json.push_back(entry_json(e));
    }
    return {{"kind", kind},
            {"software", {{"name", "advda"}, {"version", kSoftwareVersion}}},
            {"config", config.to_json()},
            {"entries", entries_json},
            {"per_seed", per_seed},
            {"test_set_access",
             {{"reads_during_selection", test_accesses_during_selection}, {"final_evaluations", test_evaluations}}}};
}

json RunReport::document() const {
    return {{"body", body()}, {"wall_time_seconds", wall_time_s}};
}

const ReportEntry* RunReport::find(const std::string& regime, std::uint64_t seed, const std::string& split) const {
    for (const auto& e : entries) {
        if (e.regime == regime && e.seed == seed && e.split == split) {
            return &e;
        }
    }
    return nullptr;
}

const Dataset& TestSetGuard::read() {
    if (selecting_) {
        ++refused_;
        throw std::logic_error("test set read during hyperparameter selection");
    }
    ++reads_;
    return data_;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

Dataset materialize_data(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (cfg.data.synth) {
        SynthConfig sc = *cfg.data.synth;
        sc.seed = derive_seed(seed, "synth");
        auto domains = synth_shifted_domains(sc);
        const Dataset parts[] = {std::move(domains.source), std::move(domains.target)};
        return concat(parts);
    }
    CsvSchema schema = cfg.data.schema;
    schema.task = cfg.task;
    auto loaded = load_csv(*cfg.data.csv_path, schema);
    if (!loaded.data.group) {
        throw DataError("data file has no group column; domains cannot be selected");
    }
    return std::move(loaded.data);
}

namespace {

struct SeedOutput {
    std::vector<ReportEntry> entries;
    json extra;
    std::size_t test_reads = 0;
    std::size_t refused = 0;
};

std::vector<std::size_t> domain_rows(const Dataset& data, const DomainSpec& spec) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.n(); ++i) {
        if (spec.is_all() || (*data.group)[i] == spec.selector) {
            rows.push_back(i);
        }
    }
    if (rows.empty()) {
        throw DataError("domain '" + spec.name + "': no rows with group value '" + spec.selector + "'");
    }
    return rows;
}

// Original row indices of a domain's train and test parts. The split stream
// depends on the selector, so a domain registered twice splits identically.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_domain(const Dataset& data,
                                                                           const DomainSpec& spec,
                                                                           std::uint64_t seed) {
    const auto rows = domain_rows(data, spec);
    auto [tr, te] = split_indices(rows.size(), 0.85, derive_seed(seed, "split/" + spec.selector));
    for (auto& i : tr) {
        i = rows[i];
    }
    for (auto& i : te) {
        i = rows[i];
    }
    return {std::move(tr), std::move(te)};
}

MetricsReport validation_metrics(const TaskKind& task, double score, std::size_t n) {
    MetricsReport m;
    m.task = task;
    m.metric_name = headline_metric_name(task);
    m.headline = score;
    m.n_eval = n;
    return m;
}

template <typename Fn>
std::vector<SeedOutput> for_each_seed(const ExperimentConfig& cfg, Fn&& fn) {
    std::vector<SeedOutput> outputs(cfg.seeds.size());
    std::vector<std::exception_ptr> errors(cfg.seeds.size());
    const auto n = static_cast<std::ptrdiff_t>(cfg.seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            outputs[i] = fn(cfg.seeds[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return outputs;
}

RunReport assemble(std::string kind, const ExperimentConfig& cfg, std::vector<SeedOutput> outputs,
                   std::chrono::steady_clock::time_point t0) {
    RunReport report;
    report.kind = std::move(kind);
    report.config = cfg;
    for (auto& out : outputs) {
        report.entries.insert(report.entries.end(), std::make_move_iterator(out.entries.begin()),
                              std::make_move_iterator(out.entries.end()));
        report.per_seed.push_back(std::move(out.extra));
        report.test_evaluations += out.test_reads;
        report.test_accesses_during_selection += out.refused;
    }
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const ReportEntry& a, const ReportEntry& b) { return entry_key(a) < entry_key(b); });
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

bool wants(const ExperimentConfig& cfg, RegimeTag tag) {
    return std::find(cfg.regimes.begin(), cfg.regimes.end(), tag) != cfg.regimes.end();
}

TrainConfig seeded_train(const ExperimentConfig& cfg, std::uint64_t seed) {
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(seed, "train");
    return tc;
}

}  // namespace

RunReport run_shift_matrix(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    if (cfg.domains.size() < 2) {
        throw ConfigError("shift matrix needs at least two domains");
    }
    auto outputs = for_each_seed(cfg, [&](std::uint64_t seed) {
        const Dataset data = materialize_data(cfg, seed);
        const TrainConfig tc = seeded_train(cfg, seed);

        std::vector<std::string> source_names;
        std::vector<std::vector<std::size_t>> train_rows;
        std::vector<std::vector<std::size_t>> test_rows;
        for (const auto& spec : cfg.domains) {
            auto [tr, te] = split_domain(data, spec, seed);
            source_names.push_back(spec.name);
            train_rows.push_back(std::move(tr));
            test_rows.push_back(std::move(te));
        }
        // Pooled source: every domain's training rows, first occurrence only,
        // never a row that is held out by any domain.
        std::set<std::size_t> held_out;
        for (const auto& te : test_rows) {
            held_out.insert(te.begin(), te.end());
        }
        std::set<std::size_t> seen;
        std::vector<std::size_t> pooled;
        for (const auto& tr : train_rows) {
            for (auto r : tr) {
                if (!held_out.count(r) && seen.insert(r).second) {
                    pooled.push_back(r);
                }
            }
        }
        source_names.push_back("all");
        train_rows.push_back(std::move(pooled));

        SeedOutput out;
        json cells = json::array();
        for (std::size_t s = 0; s < source_names.size(); ++s) {
            Dataset train = data.subset(train_rows[s]);
            std::optional<Standardizer> transform;
            if (cfg.standardize) {
                transform = Standardizer::fit(train.X);
                train = transform->apply(train);
            }
            const HeadBank model = fit_normal(train, tc).params;
            json row = json::array();
            for (std::size_t t = 0; t < cfg.domains.size(); ++t) {
                Dataset test = data.subset(test_rows[t]);
                if (transform) {
                    test = transform->apply(test);
                }
                ReportEntry e;
                e.regime = "NT";
                e.seed = seed;
                e.source = source_names[s];
                e.target = cfg.domains[t].name;
                e.split = "test";
                e.metrics = evaluate(model, test);
                ++out.test_reads;
                row.push_back(e.metrics.headline);
                out.entries.push_back(std::move(e));
            }
            cells.push_back(std::move(row));
        }
        json targets = json::array();
        for (const auto& d : cfg.domains) {
            targets.push_back(d.name);
        }
        out.extra = {{"seed", seed}, {"sources", source_names}, {"targets", targets}, {"cells", cells}};
        return out;
    });
    return assemble("shift-matrix", cfg, std::move(outputs), t0);
}

RunReport run_five_way(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    auto outputs = for_each_seed(cfg, [&](std::uint64_t seed) {
        const Dataset data = materialize_data(cfg, seed);
        const TrainConfig tc = seeded_train(cfg, seed);
        const DomainSpec source_spec{cfg.source, cfg.source};
        const DomainSpec target_spec{cfg.target, cfg.target};

        auto [src_tr, src_te] = split_domain(data, source_spec, seed);
        auto [tgt_tr, tgt_te] = split_domain(data, target_spec, seed);
        if (cfg.target_train_limit && tgt_tr.size() > *cfg.target_train_limit) {
            tgt_tr.resize(*cfg.target_train_limit);
        }
        Dataset src_train = data.subset(src_tr);
        Dataset tgt_train = data.subset(tgt_tr);
        Dataset tgt_test = data.subset(tgt_te);
        if (cfg.standardize) {
            // one coordinate system for source and target parameters
            const auto transform = Standardizer::fit(src_train.X);
            src_train = transform.apply(src_train);
            tgt_train = transform.apply(tgt_train);
            tgt_test = transform.apply(tgt_test);
        }
        TestSetGuard guard(std::move(tgt_test));
        guard.begin_selection();

        const auto [src_fit, src_val] = carve_validation(src_train, derive_seed(seed, "validation/source"));
        const auto [tgt_fit, tgt_val] = carve_validation(tgt_train, derive_seed(seed, "validation/target"));
        auto val_score = [](const HeadBank& b, const Dataset& d) { return evaluate(b, d).headline; };

        SeedOutput out;
        auto add_validation = [&](RegimeTag tag, std::optional<double> alpha, std::optional<double> lambda,
                                  double score) {
            ReportEntry e;
            e.regime = to_string(tag);
            e.seed = seed;
            e.source = cfg.source;
            e.target = cfg.target;
            e.split = "validation";
            e.alpha = alpha;
            e.lambda = lambda;
            e.metrics = validation_metrics(cfg.task, score, tgt_val.n());
            out.entries.push_back(std::move(e));
        };

        struct Final {
            RegimeTag tag;
            HeadBank model;
            std::optional<double> alpha;
            std::optional<double> lambda;
        };
        std::vector<Final> finals;
        json extra = {{"seed", seed}, {"source_train_rows", src_train.n()}, {"target_train_rows", tgt_train.n()}};

        const bool need_nt_source = wants(cfg, RegimeTag::NT_source) || wants(cfg, RegimeTag::DA_NT_NT);
        const bool need_at_source = wants(cfg, RegimeTag::DA_AT_NT) || wants(cfg, RegimeTag::DA_AT_AT);

        HeadBank source_nt;
        if (need_nt_source) {
            source_nt = fit_normal(src_train, tc).params;
        }
        HeadBank source_at;
        if (need_at_source) {
            // alpha of the adversarially trained source model is chosen on the
            // source domain's own validation slice
            const auto sweep = sweep_alpha(
                [&](double alpha) {
                    AdvConfig ac = cfg.adversarial;
                    ac.alpha = alpha;
                    return val_score(fit_adv_source(src_fit, tc, ac).params, src_val);
                },
                cfg.alpha_grid);
            json rows = json::array();
            for (const auto& r : sweep.rows) {
                rows.push_back({{"alpha", r.value}, {"validation_score", r.score}});
            }
            extra["source_alpha_sweep"] = rows;
            extra["source_alpha"] = sweep.best_value();
            AdvConfig ac = cfg.adversarial;
            ac.alpha = sweep.best_value();
            source_at = fit_adv_source(src_train, tc, ac).params;
        }

        if (wants(cfg, RegimeTag::NT_source)) {
            finals.push_back({RegimeTag::NT_source, source_nt, std::nullopt, std::nullopt});
        }
        if (wants(cfg, RegimeTag::NT_target)) {
            finals.push_back({RegimeTag::NT_target, fit_normal(tgt_train, tc).params, std::nullopt, std::nullopt});
        }

        auto transfer = [&](RegimeTag tag, const HeadBank& source_bank) {
            const auto grid = grid_lambda(
                [&](double lambda) {
                    return val_score(fit_da(tgt_fit, tc, DAConfig{lambda, source_bank}).params, tgt_val);
                },
                cfg.lambda_grid);
            for (const auto& r : grid.rows) {
                add_validation(tag, std::nullopt, r.value, r.score);
            }
            const double lambda = grid.best_value();
            finals.push_back({tag, fit_da(tgt_train, tc, DAConfig{lambda, source_bank}).params, std::nullopt, lambda});
        };
        if (wants(cfg, RegimeTag::DA_NT_NT)) {
            transfer(RegimeTag::DA_NT_NT, source_nt);
        }
        if (wants(cfg, RegimeTag::DA_AT_NT)) {
            transfer(RegimeTag::DA_AT_NT, source_at);
        }
        if (wants(cfg, RegimeTag::DA_AT_AT)) {
            double best = -std::numeric_limits<double>::infinity();
            double best_alpha = cfg.alpha_grid.front();
            double best_lambda = cfg.lambda_grid.front();
            for (double alpha : cfg.alpha_grid) {
                AdvConfig ac = cfg.adversarial;
                ac.alpha = alpha;
                const auto grid = grid_lambda(
                    [&](double lambda) {
                        return val_score(fit_adv_da(tgt_fit, tc, ac, DAConfig{lambda, source_at}).params, tgt_val);
                    },
                    cfg.lambda_grid);
                for (const auto& r : grid.rows) {
                    add_validation(RegimeTag::DA_AT_AT, alpha, r.value, r.score);
                    if (r.score > best) {
                        best = r.score;
                        best_alpha = alpha;
                        best_lambda = r.value;
                    }
                }
            }
            AdvConfig ac = cfg.adversarial;
            ac.alpha = best_alpha;
            finals.push_back({RegimeTag::DA_AT_AT,
                              fit_adv_da(tgt_train, tc, ac, DAConfig{best_lambda, source_at}).params, best_alpha,
                              best_lambda});
        }

        guard.end_selection();
        for (auto& f : finals) {
            ReportEntry e;
            e.regime = to_string(f.tag);
            e.seed = seed;
            e.source = cfg.source;
            e.target = cfg.target;
            e.split = "test";
            e.alpha = f.alpha;
            e.lambda = f.lambda;
            e.metrics = evaluate(f.model, guard.read());
            out.entries.push_back(std::move(e));
        }
        out.test_reads = guard.reads();
        out.refused = guard.reads_during_selection();
        out.extra = std::move(extra);
        return out;
    });
    return assemble("five-way", cfg, std::move(outputs), t0);
}

RunReport run_sparsity_comparison(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    if (cfg.task.kind() != TaskKind::Kind::Binary) {
        throw ConfigError("sparsity comparison needs a binary task");
    }
    auto outputs = for_each_seed(cfg, [&](std::uint64_t seed) {
        const Dataset data = materialize_data(cfg, seed);
        const TrainConfig tc = seeded_train(cfg, seed);
        const DomainSpec spec{cfg.source, cfg.source};
        auto [tr, te] = split_domain(data, spec, seed);
        Dataset train = data.subset(tr);
        Dataset test = data.subset(te);
        if (cfg.standardize) {
            const auto transform = Standardizer::fit(train.X);
            train = transform.apply(train);
            test = transform.apply(test);
        }
        TrainConfig l1cfg = tc;
        l1cfg.l1_weight = cfg.sparsity_l1_weight;
        const ModelParams adv = fit_adv_source(train, tc, cfg.adversarial).params.head(0);
        const ModelParams l1 = fit_l1(train, l1cfg).params.head(0);
        const ModelParams nt = fit_normal(train, tc).params.head(0);

        std::vector<std::size_t> perm(l1.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        auto rng = make_rng(seed, "sparsity/shuffle");
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> shuffled(l1.size());
        for (std::size_t k = 0; k < perm.size(); ++k) {
            shuffled[k] = l1.theta()[perm[k]];
        }

        SeedOutput out;
        const std::pair<const char*, const ModelParams*> models[] = {{"AT", &adv}, {"L1", &l1}, {"NT", &nt}};
        json weights = json::object();
        for (const auto& [name, params] : models) {
            ReportEntry e;
            e.regime = name;
            e.seed = seed;
            e.source = cfg.source;
            e.target = cfg.source;
            e.split = "test";
            if (std::string(name) == "AT") {
                e.alpha = cfg.adversarial.alpha;
            }
            e.metrics = evaluate(HeadBank(TaskKind::binary(), {*params}), test);
            ++out.test_reads;
            out.entries.push_back(std::move(e));
            weights[name] = params->vec();
        }
        out.extra = {{"seed", seed},
                     {"cosine",
                      {{"AT_L1", cosine_similarity(adv, l1)},
                       {"AT_NT", cosine_similarity(adv, nt)},
                       {"L1_NT", cosine_similarity(l1, nt)},
                       {"AT_L1_shuffled", cosine_similarity(adv, ModelParams(shuffled))}}},
                     {"shuffle_permutation", perm},
                     {"weights", weights}};
        return out;
    });
    return assemble("sparsity", cfg, std::move(outputs), t0);
}

}  // namespace advda
