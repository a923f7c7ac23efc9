#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advda/adversarial.hpp"
#include "advda/core_model.hpp"
#include "advda/dataset.hpp"
#include "advda/training.hpp"

namespace advda {

/// Parameter-transfer settings: the target model is pulled towards the frozen
/// source bank with weight lambda. Only the source parameters cross from the
/// source domain; its data is never read here.
struct DAConfig {
    double lambda = 0.0;
    HeadBank source_params;
};

// Starting point of target training: the source parameters (default) or zeros.
enum class DAInit { FromSource, Zeros };

/// The five compared training settings: two no-transfer baselines and three
/// transfer variants named by how the source and the target model are trained
/// (normal vs adversarial).
enum class RegimeTag { NT_source, NT_target, DA_NT_NT, DA_AT_NT, DA_AT_AT };

inline constexpr RegimeTag kAllRegimes[] = {RegimeTag::NT_source, RegimeTag::NT_target, RegimeTag::DA_NT_NT,
                                            RegimeTag::DA_AT_NT, RegimeTag::DA_AT_AT};

std::string to_string(RegimeTag tag);
RegimeTag parse_regime(const std::string& text);

/// Source training with the adversarial loss term weighted by acfg.alpha.
FitReport fit_adv_source(const Dataset& source, const TrainConfig& tcfg, const AdvConfig& acfg);

/// Target training with the lambda-weighted discrepancy penalty to the source bank.
FitReport fit_da(const Dataset& target, const TrainConfig& tcfg, const DAConfig& dacfg,
                 DAInit init = DAInit::FromSource);

/// Target training with both the adversarial term and the discrepancy penalty.
FitReport fit_adv_da(const Dataset& target, const TrainConfig& tcfg, const AdvConfig& acfg, const DAConfig& dacfg,
                     DAInit init = DAInit::FromSource);

/// Value of the transfer objective: summed NLL plus lambda * ||theta - source||^2 over heads.
double da_objective(const HeadBank& params, const Dataset& target, const DAConfig& dacfg);
/// Its gradient, one vector per head.
std::vector<std::vector<double>> da_objective_grad(const HeadBank& params, const Dataset& target,
                                                   const DAConfig& dacfg);

struct SweepRow {
    double value;
    double score;
};

struct SweepTable {
    std::vector<SweepRow> rows;  // in input order
    std::size_t best_index = 0;  // first maximum

    double best_value() const { return rows.at(best_index).value; }
    double best_score() const { return rows.at(best_index).score; }
};

// Runs one training regime for a hyperparameter value and returns its
// validation score. Must be safe to call concurrently.
using Experiment = std::function<double(double)>;

/// Evaluates `experiment` at each alpha in (0, 1]. Entries may run in
/// parallel; the table keeps input order.
SweepTable sweep_alpha(const Experiment& experiment, std::span<const double> alphas);

/// Same over lambda >= 0.
SweepTable grid_lambda(const Experiment& experiment, std::span<const double> lambdas);

std::vector<double> default_alpha_grid();   // 0.1, 0.2, ..., 1.0
std::vector<double> default_lambda_grid();  // 0, 1e-4, 1e-3, 1e-2, 1e-1, 1

/// Held-out slice for hyperparameter selection, carved from a training set:
/// 85% for fitting, 15% for scoring.
std::pair<Dataset, Dataset> carve_validation(const Dataset& train, std::uint64_t seed);

double cosine_similarity(const ModelParams& a, const ModelParams& b);

}  // namespace advda
