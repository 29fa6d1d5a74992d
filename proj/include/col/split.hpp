#pragma once

#include <cstdint>
#include <utility>

#include "col/dataset.hpp"

namespace col::recsys {

// Player 1 size / Player 2 size, in ratings. Users are assigned whole.
struct SplitSpec {
    double size_ratio = 1.0;
    std::uint64_t rng_seed = 0;
};

// Disjoint user sets, shared item id space; realized rating-count ratio must
// land within 5% of the requested one or the split is reported infeasible.
std::pair<RatingDataset, RatingDataset> split_players(const RatingDataset& ds, const SplitSpec& spec);

// Per-rating seeded assignment with exact counts (seeded shuffle then cut).
std::pair<RatingDataset, RatingDataset> split_train_test(const RatingDataset& ds, double train_fraction,
                                                         std::uint64_t seed);

}  // namespace col::recsys
