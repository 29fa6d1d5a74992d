#pragma once

#include <cstdint>
#include <string>

#include "col/dataset.hpp"
#include "col/rng.hpp"

namespace col::privacy {

enum class MechanismKind { Suppression, BoundedDP };

std::string to_string(MechanismKind kind);
MechanismKind mechanism_from_string(const std::string& s);

// Canonical privacy level p in [0,1]; for bDP, epsilon = 1/p - 1 (inf at p=0).
struct MechanismSpec {
    MechanismKind kind = MechanismKind::Suppression;
    double p = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
    double epsilon() const;

    std::string to_json() const;
    static MechanismSpec from_json(const std::string& text);
};

// p = 1/(eps+1); eps = 1/p - 1. Mutually inverse, monotone decreasing.
double epsilon_to_p(double epsilon);
double p_to_epsilon(double p);

enum class SensitivityVariant { PaperEq6, AppendixC };

struct SensitivityParams {
    std::size_t feature_count = 4;   // kappa
    std::size_t iteration_count = 20;  // iota
    double learning_rate = 0.0075;   // gamma
    double regularization = 0.01;    // lambda
    double rating_span = 4.0;        // delta r
    double p_max = 0.5;
    double q_max = 0.5;
    SensitivityVariant variant = SensitivityVariant::PaperEq6;
};

// Bound on one rating's influence on the shared item features across training.
// PaperEq6: k*i*g*(dr*p_max - l*q_max); AppendixC: same with +l*q_max.
double sensitivity(const SensitivityParams& params);

// Single Laplace(0, scale) draw.
double laplace_sample(col::Rng& rng, double scale);

// Keeps exactly round((1-p)*|ratings|) ratings, seeded sample without replacement.
recsys::RatingDataset apply_suppression(const recsys::RatingDataset& ds, double p, std::uint64_t seed);

// Adds Laplace(S/eps) noise to every rating, then clamps to [r_min, r_max].
// eps = +inf means an exact no-op.
recsys::RatingDataset apply_bdp(const recsys::RatingDataset& ds, double epsilon, double sensitivity,
                                std::uint64_t seed);

}  // namespace col::privacy
