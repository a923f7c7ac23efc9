#pragma once

#include <cstddef>
#include <cstdint>

#include "advda/core_model.hpp"
#include "advda/dataset.hpp"

namespace advda {

/// Two binary domains sharing a logistic ground truth. The source draws
/// x ~ N(0, I); the target draws x ~ N(shift * m, diag(s^2)) with a random
/// direction m and per-feature scales s = exp(0.25 * shift * r). Target
/// labels come from theta* plus a perturbation of relative size `shift`,
/// so shift = 0 gives identically distributed domains.
struct SynthConfig {
    std::size_t d = 10;
    std::size_t n_source = 5000;
    std::size_t n_target = 2000;
    double shift = 1.0;
    double label_noise = 0.0;  // probability of flipping each label
    double signal = 3.0;       // norm of the ground-truth weights
    // Number of leading features carrying signal; 0 means all of them.
    std::size_t informative = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthDomains {
    Dataset source;  // group column "source"
    Dataset target;  // group column "target"
    ModelParams theta_star;
    ModelParams theta_target;
};

SynthDomains synth_shifted_domains(const SynthConfig& cfg);

}  // namespace advda
