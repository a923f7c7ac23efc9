#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "advda/adversarial.hpp"
#include "advda/core_model.hpp"
#include "advda/dataset.hpp"

namespace advda {

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t batch_size = 100;
    std::size_t epochs = 100;
    std::uint64_t seed = 0;
    double l1_weight = 0.0;
    double l2_weight = 0.0;

    void validate() const;
};

struct FitReport {
    HeadBank params;
    // Summed clean-data NLL over all heads after each epoch.
    std::vector<double> loss_trace;
    TrainConfig config;
    double wall_time_s = 0.0;
};

/// Quadratic tie of every head to a frozen reference bank: lambda * ||theta - anchor||^2,
/// bias included.
struct AnchorPenalty {
    double lambda = 0.0;
    const HeadBank* anchor = nullptr;
};

/// Everything a minibatch step can add on top of the clean data loss. All
/// training regimes are specializations of this objective:
///
///   data_weight * l(theta; batch) + alpha * l(theta; adversarial batch)
///     + lambda * ||theta - anchor||^2 + l1 * ||w||_1 + l2 * ||w||^2
///
/// where w excludes the bias. Adversarial rows are regenerated against the
/// current iterate at every step.
struct Objective {
    double data_weight = 1.0;
    std::optional<AdvConfig> adversarial;
    std::optional<AnchorPenalty> anchor;
    std::optional<HeadBank> init;  // zeros when unset
};

/// Plain minibatch gradient descent on `objective`. Each epoch reshuffles the
/// rows with a stream derived from cfg.seed and walks them in batches of
/// cfg.batch_size (the last one may be short). Deterministic in (data, cfg).
///
/// The anchor and L1 terms are applied after the explicit gradient step: the
/// anchor in closed form (theta + 2 lr lambda anchor) / (1 + 2 lr lambda),
/// and L1 as soft-thresholding by lr * l1 (a subgradient step that stops at
/// zero instead of crossing it). Both stay stable for any weight, match the
/// explicit step to first order in lr, and are skipped when their weight is zero.
FitReport fit_objective(const Dataset& data, const TrainConfig& cfg, const Objective& objective);

FitReport fit_normal(const Dataset& data, const TrainConfig& cfg);

// Same loop with the L1 penalty cfg.l1_weight * ||w||_1 on non-bias weights.
// With l1_weight = 0 this is fit_normal.
FitReport fit_l1(const Dataset& data, const TrainConfig& cfg);

// Summed clean NLL of every head on its own labels.
double bank_loss(const HeadBank& bank, const Dataset& data);

}  // namespace advda
