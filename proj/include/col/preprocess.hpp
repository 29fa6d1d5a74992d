#pragma once

#include <map>

#include "col/dataset.hpp"

namespace col::recsys {

// Residual dataset plus the per-item / per-user averages removed from it.
// Residual ratings and user averages live in [-2, 2]; item averages in [1, 5].
struct PreprocessResult {
    RatingDataset residual;
    std::map<std::int64_t, double> item_averages;
    std::map<std::int64_t, double> user_averages;
};

// Filters items/users with <10 ratings (iterated to a fixpoint), subtracts
// item then user averages, clamps averages and residuals to their ranges.
PreprocessResult preprocess(const RatingDataset& ds);

}  // namespace col::recsys
