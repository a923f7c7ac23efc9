#include "advda/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "advda/errors.hpp"

namespace advda {

void AdvConfig::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw InvalidInput("epsilon must be a finite nonnegative number");
    }
    if (steps < 1) {
        throw InvalidInput("attack steps must be at least 1");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidInput("alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
}

std::vector<double> clip_linf(std::span<const double> origin, std::span<const double> candidate,
                              double epsilon) {
    if (origin.size() != candidate.size()) {
        throw InvalidInput("clip_linf: length mismatch");
    }
    std::vector<double> out(origin.size());
    for (std::size_t j = 0; j < origin.size(); ++j) {
        out[j] = std::min(std::max(candidate[j], origin[j] - epsilon), origin[j] + epsilon);
    }
    return out;
}

namespace {

double sign(double v) {
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
}

}  // namespace

namespace {

// Writes the attack result for one row into `adv` (same length as x).
void fgsm_into(const ModelParams& params, std::span<const double> x, double y, const AdvConfig& cfg,
               std::span<double> adv) {
    std::copy(x.begin(), x.end(), adv.begin());
    if (cfg.epsilon == 0.0) {
        return;
    }
    const auto w = params.weights();
    const double step = cfg.epsilon / static_cast<double>(cfg.steps);
    // grad_x = (p - y) w. Every step moves the logit away from the label, so
    // sign(p - y) is the same at every iterate and the per-coordinate sign of
    // the gradient is fixed by the starting point.
    // Coordinates then evolve independently.
    const double r = predict_proba(params, x) - y;
    for (std::size_t j = 0; j < adv.size(); ++j) {
        const double delta = step * sign(r * w[j]);
        const double lo = x[j] - cfg.epsilon;
        const double hi = x[j] + cfg.epsilon;
        double v = adv[j];
        for (std::size_t s = 0; s < cfg.steps; ++s) {
            v = std::min(std::max(v + delta, lo), hi);
        }
        adv[j] = v;
    }
}

void check_attack(const ModelParams& params, std::size_t d, double y) {
    if (params.feature_dim() != d) {
        throw InvalidInput("iter_fgsm: feature dimension mismatch");
    }
    if (y != 0.0 && y != 1.0) {
        throw InvalidInput("label must be 0 or 1");
    }
}

}  // namespace

std::vector<double> iter_fgsm(const ModelParams& params, std::span<const double> x, double y,
                              const AdvConfig& cfg) {
    cfg.validate();
    check_attack(params, x.size(), y);
    std::vector<double> adv(x.size());
    fgsm_into(params, x, y, cfg, adv);
    return adv;
}

Matrix augment_batch(const ModelParams& params, const Matrix& X, std::span<const double> y,
                     const AdvConfig& cfg) {
    cfg.validate();
    if (X.rows() == 0) {
        throw InvalidInput("augment_batch: empty batch");
    }
    if (X.rows() != y.size()) {
        throw InvalidInput("augment_batch: row count does not match label count");
    }
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        check_attack(params, X.cols(), y[i]);
        fgsm_into(params, X.row(i), y[i], cfg, out.row(i));
    }
    return out;
}

}  // namespace advda
