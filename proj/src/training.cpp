#include "advda/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "advda/errors.hpp"
#include "advda/kernels.hpp"
#include "advda/seeding.hpp"

namespace advda {

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidInput("learning rate must be finite and nonnegative");
    }
    if (batch_size < 1) {
        throw InvalidInput("batch size must be at least 1");
    }
    if (epochs < 1) {
        throw InvalidInput("epochs must be at least 1");
    }
    if (!(l1_weight >= 0.0) || !(l2_weight >= 0.0)) {
        throw InvalidInput("regularization weights must be nonnegative");
    }
}

double bank_loss(const HeadBank& bank, const Dataset& data) {
    double total = 0.0;
    for (std::size_t j = 0; j < bank.num_heads(); ++j) {
        total += kernels::serial::nll_sum(bank.head(j), data.X, data.head_labels(j));
    }
    return total;
}

namespace {

void check_anchor(const AnchorPenalty& anchor, const Dataset& data) {
    if (!(anchor.lambda >= 0.0) || !std::isfinite(anchor.lambda)) {
        throw InvalidInput("lambda must be finite and nonnegative");
    }
    if (anchor.anchor == nullptr) {
        throw InvalidInput("anchor penalty without reference parameters");
    }
    if (!(anchor.anchor->task() == data.task) || anchor.anchor->feature_dim() != data.d()) {
        throw InvalidInput("source parameters do not match the target feature space or task");
    }
}

}  // namespace

FitReport fit_objective(const Dataset& data, const TrainConfig& cfg, const Objective& objective) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    data.validate();
    if (objective.adversarial) {
        objective.adversarial->validate();
    }
    if (objective.anchor) {
        check_anchor(*objective.anchor, data);
    }
    if (!(objective.data_weight >= 0.0)) {
        throw InvalidInput("data weight must be nonnegative");
    }

    HeadBank bank = objective.init ? *objective.init : HeadBank::zeros(data.task, data.d());
    if (!(bank.task() == data.task) || bank.feature_dim() != data.d()) {
        throw InvalidInput("initial parameters do not match the dataset");
    }

    const std::size_t n = data.n();
    const std::size_t d = data.d();
    const std::size_t heads = bank.num_heads();
    std::vector<std::vector<double>> labels(heads);
    for (std::size_t j = 0; j < heads; ++j) {
        labels[j] = data.head_labels(j);
    }

    const double lr = cfg.learning_rate;
    const double anchor_c = objective.anchor ? 2.0 * lr * objective.anchor->lambda : 0.0;
    const double l1_shrink = lr * cfg.l1_weight;

    FitReport report;
    report.config = cfg;
    report.loss_trace.reserve(cfg.epochs);

    auto rng = make_rng(cfg.seed, "train/shuffle");
    std::vector<std::size_t> order(n);
    std::vector<double> grad(d + 1);
    std::vector<double> grad_adv(d + 1);
    std::vector<double> yb;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, n - start);
            const std::span<const std::size_t> rows(order.data() + start, len);
            const Matrix Xb = data.X.select_rows(rows);
            yb.resize(len);
            for (std::size_t j = 0; j < heads; ++j) {
                for (std::size_t i = 0; i < len; ++i) {
                    yb[i] = labels[j][rows[i]];
                }
                ModelParams& head = bank.head(j);
                std::fill(grad.begin(), grad.end(), 0.0);
                accumulate_grad_theta(head, Xb, yb, objective.data_weight, grad);
                if (objective.adversarial) {
                    // generated against the pre-step iterate
                    const Matrix Xadv = augment_batch(head, Xb, yb, *objective.adversarial);
                    std::fill(grad_adv.begin(), grad_adv.end(), 0.0);
                    accumulate_grad_theta(head, Xadv, yb, 1.0, grad_adv);
                    for (std::size_t k = 0; k <= d; ++k) {
                        grad[k] += objective.adversarial->alpha * grad_adv[k];
                    }
                }
                auto theta = head.theta();
                if (cfg.l2_weight > 0.0) {
                    for (std::size_t k = 0; k < d; ++k) {
                        grad[k] += 2.0 * cfg.l2_weight * theta[k];
                    }
                }
                for (std::size_t k = 0; k <= d; ++k) {
                    theta[k] -= lr * grad[k];
                }
                if (l1_shrink > 0.0) {
                    for (std::size_t k = 0; k < d; ++k) {
                        if (theta[k] > 0.0) {
                            theta[k] = std::max(theta[k] - l1_shrink, 0.0);
                        } else if (theta[k] < 0.0) {
                            theta[k] = std::min(theta[k] + l1_shrink, 0.0);
                        }
                    }
                }
                if (anchor_c > 0.0) {
                    const auto ref = objective.anchor->anchor->head(j).theta();
                    for (std::size_t k = 0; k <= d; ++k) {
                        theta[k] = (theta[k] + anchor_c * ref[k]) / (1.0 + anchor_c);
                    }
                }
            }
        }
        for (std::size_t j = 0; j < heads; ++j) {
            for (double v : bank.head(j).theta()) {
                if (!std::isfinite(v)) {
                    throw InvalidInput("training diverged (non-finite parameters); lower the learning rate");
                }
            }
        }
        report.loss_trace.push_back(bank_loss(bank, data));
    }
    report.params = std::move(bank);
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

FitReport fit_normal(const Dataset& data, const TrainConfig& cfg) {
    return fit_objective(data, cfg, Objective{});
}

FitReport fit_l1(const Dataset& data, const TrainConfig& cfg) {
    return fit_objective(data, cfg, Objective{});
}

}  // namespace advda
