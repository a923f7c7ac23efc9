#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "advda/core_model.hpp"
#include "advda/matrix.hpp"

namespace advda {

/// Iterative fast-gradient-sign attack settings. The perturbation set is
/// always the L-infinity ball of radius `epsilon` around the clean sample;
/// each of the `steps` iterations moves by epsilon / steps.
/// `alpha` weights the adversarial loss term when the attack is used for
/// training.
struct AdvConfig {
    double epsilon = 0.1;
    std::size_t steps = 20;
    double alpha = 1.0;

    void validate() const;
};

/// Componentwise projection of `candidate` onto [origin - eps, origin + eps].
std::vector<double> clip_linf(std::span<const double> origin, std::span<const double> candidate,
                              double epsilon);

/// Runs exactly cfg.steps signed-gradient ascent steps on the single-sample
/// loss starting from x, clipping back into the epsilon ball after each step.
/// Zero gradient components are not perturbed.
std::vector<double> iter_fgsm(const ModelParams& params, std::span<const double> x, double y,
                              const AdvConfig& cfg);

/// Rowwise iter_fgsm against `params`; labels are unchanged so the caller
/// keeps using `y`. Serial reference; see kernels::omp::augment_rows.
Matrix augment_batch(const ModelParams& params, const Matrix& X, std::span<const double> y,
                     const AdvConfig& cfg);

}  // namespace advda
