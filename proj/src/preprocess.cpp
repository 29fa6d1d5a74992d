#include "col/preprocess.hpp"

#include <algorithm>
#include <unordered_map>

namespace col::recsys {

namespace {

constexpr std::size_t kMinRatings = 10;

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

PreprocessResult preprocess(const RatingDataset& ds) {
    if (ds.empty()) throw EmptyDatasetError("preprocess: empty input");

    std::vector<Rating> kept = ds.ratings();

    // Step 1: drop items then users with <10 ratings; repeat until stable.
    while (true) {
        std::unordered_map<std::int64_t, std::size_t> item_count, user_count;
        for (const auto& r : kept) {
            ++item_count[r.item];
            ++user_count[r.user];
        }
        std::vector<Rating> next;
        next.reserve(kept.size());
        for (const auto& r : kept)
            if (item_count[r.item] >= kMinRatings && user_count[r.user] >= kMinRatings) next.push_back(r);
        if (next.size() == kept.size()) break;
        kept = std::move(next);
    }
    if (kept.empty()) throw EmptyDatasetError("preprocess: all data filtered out");

    // Step 2: item averages, clamped to [1, 5].
    std::unordered_map<std::int64_t, double> item_sum;
    std::unordered_map<std::int64_t, std::size_t> item_cnt;
    for (const auto& r : kept) {
        item_sum[r.item] += r.value;
        ++item_cnt[r.item];
    }
    std::map<std::int64_t, double> item_avg;
    for (const auto& [item, sum] : item_sum) item_avg[item] = clamp(sum / static_cast<double>(item_cnt[item]), 1.0, 5.0);

    // Step 3: user averages of the item-discounted ratings, clamped to [-2, 2].
    std::unordered_map<std::int64_t, double> user_sum;
    std::unordered_map<std::int64_t, std::size_t> user_cnt;
    for (const auto& r : kept) {
        user_sum[r.user] += r.value - item_avg[r.item];
        ++user_cnt[r.user];
    }
    std::map<std::int64_t, double> user_avg;
    for (const auto& [user, sum] : user_sum) user_avg[user] = clamp(sum / static_cast<double>(user_cnt[user]), -2.0, 2.0);

    // Step 4: residuals, clamped to [-2, 2].
    std::vector<Rating> residual;
    residual.reserve(kept.size());
    for (const auto& r : kept)
        residual.push_back({r.user, r.item, clamp(r.value - item_avg[r.item] - user_avg[r.user], -2.0, 2.0)});

    return PreprocessResult{RatingDataset(std::move(residual), -2.0, 2.0), std::move(item_avg), std::move(user_avg)};
}

}  // namespace col::recsys
