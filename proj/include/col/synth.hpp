#pragma once

#include <cstdint>

#include "col/dataset.hpp"

namespace col::synth {

// Low-rank synthetic rating generator used as a stand-in when no public
// dataset is on disk. Emits residual-scale ratings in [r_min, r_max] with a
// planted rank-`factor_count` signal plus biases and Gaussian noise, so that
// matrix factorization genuinely benefits from more users.
struct SynthConfig {
    std::size_t user_count = 600;
    std::size_t item_count = 1500;
    std::size_t rating_count = 30000;
    std::size_t factor_count = 4;
    double amplitude = 2.0;      // scales the planted low-rank signal
    double item_bias_sd = 0.4;
    double user_bias_sd = 0.2;
    double noise_sd = 0.1;
    double r_min = -2.0;
    double r_max = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
};

recsys::RatingDataset generate(const SynthConfig& cfg);

}  // namespace col::synth
