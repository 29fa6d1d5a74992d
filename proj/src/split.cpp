#include "col/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "col/rng.hpp"

namespace col::recsys {

std::pair<RatingDataset, RatingDataset> split_players(const RatingDataset& ds, const SplitSpec& spec) {
    if (spec.size_ratio <= 0) throw Error("split_players: size-ratio must be positive");
    if (ds.user_ids().size() < 2) throw Error("split_players: need at least 2 users");

    std::vector<std::int64_t> users(ds.user_ids().begin(), ds.user_ids().end());
    auto rng = make_rng(spec.rng_seed, /*stream=*/17);
    std::shuffle(users.begin(), users.end(), rng);

    std::unordered_map<std::int64_t, std::size_t> user_ratings;
    for (const auto& r : ds.ratings()) ++user_ratings[r.user];

    // Player 1 takes shuffled users until its rating count is closest to target.
    const double target = ds.size() * spec.size_ratio / (1.0 + spec.size_ratio);
    std::unordered_set<std::int64_t> p1_users;
    std::size_t count1 = 0;
    for (std::size_t k = 0; k + 1 < users.size(); ++k) {
        const std::size_t c = user_ratings[users[k]];
        if (std::abs(static_cast<double>(count1 + c) - target) >= std::abs(static_cast<double>(count1) - target))
            break;
        p1_users.insert(users[k]);
        count1 += c;
    }
    if (p1_users.empty() || p1_users.size() == users.size())
        throw InfeasibleSplitError("split_players: ratio unachievable with whole users");

    const double count2 = static_cast<double>(ds.size() - count1);
    const double realized = static_cast<double>(count1) / count2;
    if (std::abs(realized - spec.size_ratio) > 0.05 * spec.size_ratio)
        throw InfeasibleSplitError("split_players: realized ratio " + std::to_string(realized) +
                                   " off target " + std::to_string(spec.size_ratio) + " by more than 5%");

    std::vector<Rating> r1, r2;
    for (const auto& r : ds.ratings()) (p1_users.count(r.user) ? r1 : r2).push_back(r);
    return {RatingDataset(std::move(r1), ds.r_min(), ds.r_max()),
            RatingDataset(std::move(r2), ds.r_min(), ds.r_max())};
}

std::pair<RatingDataset, RatingDataset> split_train_test(const RatingDataset& ds, double train_fraction,
                                                         std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("split_train_test: train-fraction must be in (0,1)");
    if (ds.empty()) throw EmptyDatasetError("split_train_test: empty input");

    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto rng = make_rng(seed, /*stream=*/23);
    std::shuffle(idx.begin(), idx.end(), rng);

    const auto cut = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.size())));
    std::vector<char> is_train(ds.size(), 0);
    for (std::size_t k = 0; k < cut && k < idx.size(); ++k) is_train[idx[k]] = 1;

    std::vector<Rating> train, test;
    for (std::size_t k = 0; k < ds.size(); ++k)
        (is_train[k] ? train : test).push_back(ds.ratings()[k]);
    return {RatingDataset(std::move(train), ds.r_min(), ds.r_max()),
            RatingDataset(std::move(test), ds.r_min(), ds.r_max())};
}

}  // namespace col::recsys
