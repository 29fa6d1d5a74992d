#include "col/synth.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "col/rng.hpp"

namespace col::synth {

void SynthConfig::validate() const {
    if (user_count < 1 || item_count < 1) throw Error("SynthConfig: need at least one user and item");
    if (rating_count > user_count * item_count) throw Error("SynthConfig: more ratings than user-item pairs");
    if (!(r_max > r_min)) throw Error("SynthConfig: empty rating range");
    if (factor_count < 1) throw Error("SynthConfig: factor-count must be >= 1");
}

recsys::RatingDataset generate(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t k = cfg.factor_count;

    auto rng = make_rng(cfg.seed, /*stream=*/5);
    std::normal_distribution<double> item_bias_d(0.0, cfg.item_bias_sd);
    std::normal_distribution<double> user_bias_d(0.0, cfg.user_bias_sd);
    std::normal_distribution<double> noise_d(0.0, cfg.noise_sd);

    std::vector<double> u(cfg.user_count * k), v(cfg.item_count * k);
    for (double& x : u) x = uniform_real(rng, -0.5, 0.5);
    for (double& x : v) x = uniform_real(rng, -0.5, 0.5);
    std::vector<double> item_bias(cfg.item_count), user_bias(cfg.user_count);
    for (double& x : item_bias) x = item_bias_d(rng);
    for (double& x : user_bias) x = user_bias_d(rng);

    std::uniform_int_distribution<std::size_t> pick_user(0, cfg.user_count - 1);
    std::uniform_int_distribution<std::size_t> pick_item(0, cfg.item_count - 1);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(cfg.rating_count * 2);
    std::vector<recsys::Rating> ratings;
    ratings.reserve(cfg.rating_count);
    while (ratings.size() < cfg.rating_count) {
        const std::size_t us = pick_user(rng);
        const std::size_t it = pick_item(rng);
        const std::uint64_t key = static_cast<std::uint64_t>(us) * cfg.item_count + it;
        if (!seen.insert(key).second) continue;
        double dot = 0.0;
        for (std::size_t f = 0; f < k; ++f) dot += u[us * k + f] * v[it * k + f];
        double val = cfg.amplitude * dot + item_bias[it] + user_bias[us] + noise_d(rng);
        val = std::clamp(val, cfg.r_min, cfg.r_max);
        ratings.push_back({static_cast<std::int64_t>(us + 1), static_cast<std::int64_t>(it + 1), val});
    }
    return recsys::RatingDataset(std::move(ratings), cfg.r_min, cfg.r_max);
}

}  // namespace col::synth
