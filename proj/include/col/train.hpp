#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "col/dataset.hpp"
#include "col/preprocess.hpp"

namespace col::recsys {

struct TrainConfig {
    std::size_t feature_count = 4;      // kappa
    std::size_t iteration_count = 20;   // iota, full passes
    double learning_rate = 0.0075;      // gamma
    double regularization = 0.01;       // lambda
    double feature_bound = 0.5;         // p_max = q_max
    std::uint64_t rng_seed = 0;

    void validate() const;
};

// User-feature and item-feature matrices; every entry stays within
// [-feature_bound, feature_bound] after every update.
class FactorModel {
public:
    FactorModel() = default;
    FactorModel(std::size_t feature_count, double feature_bound)
        : feature_count_(feature_count), feature_bound_(feature_bound) {}

    std::size_t feature_count() const { return feature_count_; }
    double feature_bound() const { return feature_bound_; }

    bool has_user(std::int64_t u) const { return user_index_.count(u) != 0; }
    bool has_item(std::int64_t i) const { return item_index_.count(i) != 0; }

    std::vector<double>& user_features(std::int64_t u) { return user_rows_[user_index_.at(u)]; }
    const std::vector<double>& user_features(std::int64_t u) const { return user_rows_[user_index_.at(u)]; }
    std::vector<double>& item_features(std::int64_t i) { return item_cols_[item_index_.at(i)]; }
    const std::vector<double>& item_features(std::int64_t i) const { return item_cols_[item_index_.at(i)]; }

    double predict(std::int64_t u, std::int64_t i) const;

    void add_user(std::int64_t u, std::vector<double> row);
    void add_item(std::int64_t i, std::vector<double> col);
    void set_shared_items(const FactorModel& other);  // copies item matrix

    std::size_t user_count() const { return user_rows_.size(); }
    std::size_t item_count() const { return item_cols_.size(); }

    // Max |entry| across both matrices.
    double max_abs_entry() const;

    friend bool operator==(const FactorModel&, const FactorModel&) = default;

private:
    std::size_t feature_count_ = 0;
    double feature_bound_ = 0.0;
    std::unordered_map<std::int64_t, std::size_t> user_index_;
    std::unordered_map<std::int64_t, std::size_t> item_index_;
    std::vector<std::vector<double>> user_rows_;
    std::vector<std::vector<double>> item_cols_;
};

// One descending SGD step for a single rating: e = r - p.q, then
// p' = p + gamma*(e*q - lambda*p), q' = q + gamma*(e*p - lambda*q),
// both clamped entrywise to [-bound, bound].
std::pair<std::vector<double>, std::vector<double>> sgd_update(const std::vector<double>& p_u,
                                                               const std::vector<double>& q_i, double rating,
                                                               double gamma, double lambda, double bound);

FactorModel train_alone(const RatingDataset& train, const TrainConfig& cfg);

struct TogetherResult {
    FactorModel player1;  // holds P1 and the shared Q
    FactorModel player2;  // holds P2 and the same shared Q
};

// Sequential rounds: player 1 does a full pass updating (P1, Q), then player 2
// updates (P2, Q). Item features are shared; user features never cross sides.
TogetherResult train_together(const RatingDataset& train1, const RatingDataset& train2, const TrainConfig& cfg);

struct RmseResult {
    double value = 0.0;
    std::size_t used = 0;
    std::size_t skipped_cold = 0;  // test ratings whose item or user is absent from the model
};

// Root mean square prediction error in residual space.
RmseResult rmse(const FactorModel& model, const RatingDataset& test);

}  // namespace col::recsys
