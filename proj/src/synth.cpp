#include "advda/synth.hpp"

#include <cmath>
#include <random>

#include "advda/errors.hpp"
#include "advda/seeding.hpp"

namespace advda {

void SynthConfig::validate() const {
    if (d < 1 || n_source < 1 || n_target < 1) {
        throw InvalidInput("synthetic domains need d >= 1 and positive sizes");
    }
    if (!(shift >= 0.0) || !(label_noise >= 0.0 && label_noise < 0.5) || !(signal >= 0.0)) {
        throw InvalidInput("synthetic shift/noise/signal out of range");
    }
    if (informative > d) {
        throw InvalidInput("informative feature count exceeds d");
    }
}

namespace {

std::vector<double> random_normal(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = normal(rng);
    }
    return v;
}

double norm2(const std::vector<double>& v, std::size_t upto) {
    double s = 0.0;
    for (std::size_t j = 0; j < upto; ++j) {
        s += v[j] * v[j];
    }
    return std::sqrt(s);
}

Dataset draw_domain(std::mt19937_64& rng, std::size_t n, const std::vector<double>& mean,
                    const std::vector<double>& scale, const ModelParams& theta, double label_noise,
                    const std::string& group) {
    const std::size_t d = mean.size();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Dataset ds;
    ds.X = Matrix(n, d);
    ds.Y = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = ds.X.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = mean[j] + scale[j] * normal(rng);
        }
        double y = unif(rng) < predict_proba(theta, x) ? 1.0 : 0.0;
        if (unif(rng) < label_noise) {
            y = 1.0 - y;
        }
        ds.Y(i, 0) = y;
    }
    ds.task = TaskKind::binary();
    ds.feature_names = default_feature_names(d);
    ds.group = std::vector<std::string>(n, group);
    return ds;
}

}  // namespace

SynthDomains synth_shifted_domains(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t d = cfg.d;
    const std::size_t active = cfg.informative == 0 ? d : cfg.informative;

    auto theta_rng = make_rng(cfg.seed, "synth/theta");
    std::vector<double> w = random_normal(theta_rng, d + 1);
    for (std::size_t j = active; j < d; ++j) {
        w[j] = 0.0;
    }
    const double wn = norm2(w, d);
    for (std::size_t j = 0; j < d; ++j) {
        w[j] = wn > 0.0 ? w[j] * cfg.signal / wn : 0.0;
    }
    w[d] *= 0.5;
    ModelParams theta_star(w);

    // Target concept: theta* moved by `shift` times its own norm in a random
    // direction over the informative coordinates.
    auto shift_rng = make_rng(cfg.seed, "synth/shift");
    std::vector<double> eta = random_normal(shift_rng, d);
    const double en = norm2(eta, active);
    std::vector<double> wt = w;
    for (std::size_t j = 0; j < active; ++j) {
        wt[j] += en > 0.0 ? cfg.shift * cfg.signal * eta[j] / en : 0.0;
    }
    ModelParams theta_target(wt);

    std::vector<double> m = random_normal(shift_rng, d);
    std::vector<double> r = random_normal(shift_rng, d);
    std::vector<double> target_mean(d);
    std::vector<double> target_scale(d);
    for (std::size_t j = 0; j < d; ++j) {
        target_mean[j] = cfg.shift * m[j] / std::sqrt(static_cast<double>(d)) * 2.0;
        target_scale[j] = std::exp(0.25 * cfg.shift * r[j]);
    }

    auto src_rng = make_rng(cfg.seed, "synth/source");
    auto tgt_rng = make_rng(cfg.seed, "synth/target");
    SynthDomains out{
        draw_domain(src_rng, cfg.n_source, std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), theta_star,
                    cfg.label_noise, "source"),
        draw_domain(tgt_rng, cfg.n_target, target_mean, target_scale, theta_target, cfg.label_noise, "target"),
        theta_star, theta_target};
    return out;
}

}  // namespace advda
