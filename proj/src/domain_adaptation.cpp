#include "advda/domain_adaptation.hpp"

#include <cmath>
#include <exception>

#include "advda/errors.hpp"

namespace advda {

std::string to_string(RegimeTag tag) {
    switch (tag) {
    case RegimeTag::NT_source:
        return "NT_source";
    case RegimeTag::NT_target:
        return "NT_target";
    case RegimeTag::DA_NT_NT:
        return "DA_NT_NT";
    case RegimeTag::DA_AT_NT:
        return "DA_AT_NT";
    case RegimeTag::DA_AT_AT:
        return "DA_AT_AT";
    }
    return "?";
}

RegimeTag parse_regime(const std::string& text) {
    for (auto tag : kAllRegimes) {
        if (to_string(tag) == text) {
            return tag;
        }
    }
    throw InvalidInput("unknown regime '" + text + "'");
}

FitReport fit_adv_source(const Dataset& source, const TrainConfig& tcfg, const AdvConfig& acfg) {
    Objective obj;
    obj.adversarial = acfg;
    return fit_objective(source, tcfg, obj);
}

namespace {

Objective da_objective_spec(const Dataset& target, const DAConfig& dacfg, DAInit init) {
    if (!(dacfg.lambda >= 0.0)) {
        throw InvalidInput("lambda must be nonnegative");
    }
    if (dacfg.source_params.feature_dim() != target.d() || !(dacfg.source_params.task() == target.task)) {
        throw InvalidInput("source parameters do not match the target feature space or task");
    }
    Objective obj;
    obj.anchor = AnchorPenalty{dacfg.lambda, &dacfg.source_params};
    if (init == DAInit::FromSource) {
        obj.init = dacfg.source_params;
    }
    return obj;
}

}  // namespace

FitReport fit_da(const Dataset& target, const TrainConfig& tcfg, const DAConfig& dacfg, DAInit init) {
    return fit_objective(target, tcfg, da_objective_spec(target, dacfg, init));
}

FitReport fit_adv_da(const Dataset& target, const TrainConfig& tcfg, const AdvConfig& acfg, const DAConfig& dacfg,
                     DAInit init) {
    Objective obj = da_objective_spec(target, dacfg, init);
    obj.adversarial = acfg;
    return fit_objective(target, tcfg, obj);
}

double da_objective(const HeadBank& params, const Dataset& target, const DAConfig& dacfg) {
    double total = bank_loss(params, target);
    for (std::size_t j = 0; j < params.num_heads(); ++j) {
        const auto t = params.head(j).theta();
        const auto s = dacfg.source_params.head(j).theta();
        for (std::size_t k = 0; k < t.size(); ++k) {
            total += dacfg.lambda * (t[k] - s[k]) * (t[k] - s[k]);
        }
    }
    return total;
}

std::vector<std::vector<double>> da_objective_grad(const HeadBank& params, const Dataset& target,
                                                   const DAConfig& dacfg) {
    std::vector<std::vector<double>> out;
    for (std::size_t j = 0; j < params.num_heads(); ++j) {
        auto g = grad_theta(params.head(j), target.X, target.head_labels(j));
        const auto t = params.head(j).theta();
        const auto s = dacfg.source_params.head(j).theta();
        for (std::size_t k = 0; k < g.size(); ++k) {
            g[k] += 2.0 * dacfg.lambda * (t[k] - s[k]);
        }
        out.push_back(std::move(g));
    }
    return out;
}

namespace {

SweepTable run_sweep(const Experiment& experiment, std::span<const double> values) {
    if (values.empty()) {
        throw InvalidInput("hyperparameter grid is empty");
    }
    SweepTable table;
    table.rows.resize(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            table.rows[i] = {values[i], experiment(values[i])};
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (table.rows[i].score > table.rows[table.best_index].score) {
            table.best_index = i;
        }
    }
    return table;
}

}  // namespace

SweepTable sweep_alpha(const Experiment& experiment, std::span<const double> alphas) {
    for (double a : alphas) {
        if (!(a > 0.0 && a <= 1.0)) {
            throw InvalidInput("alpha values must lie in (0, 1]");
        }
    }
    return run_sweep(experiment, alphas);
}

SweepTable grid_lambda(const Experiment& experiment, std::span<const double> lambdas) {
    for (double l : lambdas) {
        if (!(l >= 0.0) || !std::isfinite(l)) {
            throw InvalidInput("lambda values must be finite and nonnegative");
        }
    }
    return run_sweep(experiment, lambdas);
}

std::vector<double> default_alpha_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

std::vector<double> default_lambda_grid() {
    return {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
}

std::pair<Dataset, Dataset> carve_validation(const Dataset& train, std::uint64_t seed) {
    return split_train_test(train, 0.85, seed);
}

double cosine_similarity(const ModelParams& a, const ModelParams& b) {
    if (a.size() != b.size()) {
        throw InvalidInput("cosine_similarity: dimension mismatch");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a.theta()[k] * b.theta()[k];
        na += a.theta()[k] * a.theta()[k];
        nb += b.theta()[k] * b.theta()[k];
    }
    if (na == 0.0 || nb == 0.0) {
        throw InvalidInput("cosine_similarity undefined for a zero vector");
    }
    return dot / std::sqrt(na * nb);
}

}  // namespace advda
