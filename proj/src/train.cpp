#include "col/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "col/rng.hpp"

namespace col::recsys {

void TrainConfig::validate() const {
    if (feature_count < 1) throw Error("TrainConfig: feature-count must be >= 1");
    if (iteration_count < 1) throw Error("TrainConfig: iteration-count must be >= 1");
    if (!(learning_rate > 0)) throw Error("TrainConfig: learning-rate must be positive");
    if (regularization < 0) throw Error("TrainConfig: regularization must be non-negative");
    if (!(feature_bound > 0)) throw Error("TrainConfig: feature-bound must be positive");
}

double FactorModel::predict(std::int64_t u, std::int64_t i) const {
    const auto& p = user_features(u);
    const auto& q = item_features(i);
    return std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
}

void FactorModel::add_user(std::int64_t u, std::vector<double> row) {
    user_index_[u] = user_rows_.size();
    user_rows_.push_back(std::move(row));
}

void FactorModel::add_item(std::int64_t i, std::vector<double> col) {
    item_index_[i] = item_cols_.size();
    item_cols_.push_back(std::move(col));
}

void FactorModel::set_shared_items(const FactorModel& other) {
    item_index_ = other.item_index_;
    item_cols_ = other.item_cols_;
}

double FactorModel::max_abs_entry() const {
    double m = 0.0;
    for (const auto& row : user_rows_)
        for (double v : row) m = std::max(m, std::abs(v));
    for (const auto& col : item_cols_)
        for (double v : col) m = std::max(m, std::abs(v));
    return m;
}

namespace {

double clamp(double v, double b) { return std::min(b, std::max(-b, v)); }

struct Entry {
    std::size_t user_row;
    std::size_t item_col;
    double value;
};

// Sequential mini-batch SGD over one or more player datasets with a shared
// item matrix. Deterministic: every random stream is derived from cfg.rng_seed
// and does not depend on the other players' data.
std::vector<FactorModel> train_sequential(const std::vector<const RatingDataset*>& datasets,
                                          const TrainConfig& cfg) {
    cfg.validate();
    const std::size_t k = cfg.feature_count;
    const double b = cfg.feature_bound;

    std::set<std::int64_t> item_ids;
    for (const auto* ds : datasets)
        item_ids.insert(ds->item_ids().begin(), ds->item_ids().end());

    std::vector<std::int64_t> items(item_ids.begin(), item_ids.end());
    std::vector<double> q(items.size() * k);
    {
        auto rng = make_rng(cfg.rng_seed, 1);
        for (double& v : q) v = uniform_real(rng, -b / 2, b / 2);
    }
    std::unordered_map<std::int64_t, std::size_t> item_col;
    for (std::size_t j = 0; j < items.size(); ++j) item_col[items[j]] = j;

    std::vector<std::vector<std::int64_t>> users_of(datasets.size());
    std::vector<std::vector<double>> p_of(datasets.size());
    std::vector<std::vector<Entry>> entries_of(datasets.size());
    for (std::size_t n = 0; n < datasets.size(); ++n) {
        const auto& ds = *datasets[n];
        users_of[n].assign(ds.user_ids().begin(), ds.user_ids().end());
        std::unordered_map<std::int64_t, std::size_t> user_row;
        for (std::size_t j = 0; j < users_of[n].size(); ++j) user_row[users_of[n][j]] = j;
        p_of[n].resize(users_of[n].size() * k);
        auto rng = make_rng(cfg.rng_seed, 100 + n);
        for (double& v : p_of[n]) v = uniform_real(rng, -b / 2, b / 2);
        entries_of[n].reserve(ds.size());
        for (const auto& r : ds.ratings()) entries_of[n].push_back({user_row[r.user], item_col[r.item], r.value});
    }

    const double gamma = cfg.learning_rate;
    const double lambda = cfg.regularization;
    for (std::size_t round = 0; round < cfg.iteration_count; ++round) {
        for (std::size_t n = 0; n < datasets.size(); ++n) {
            auto& entries = entries_of[n];
            if (entries.empty()) continue;
            auto rng = make_rng(cfg.rng_seed, 1000 + round * 64 + n);
            std::shuffle(entries.begin(), entries.end(), rng);
            double* p_base = p_of[n].data();
            for (const Entry& e : entries) {
                double* p = p_base + e.user_row * k;
                double* qi = q.data() + e.item_col * k;
                double err = e.value;
                for (std::size_t f = 0; f < k; ++f) err -= p[f] * qi[f];
                for (std::size_t f = 0; f < k; ++f) {
                    const double pf = p[f];
                    const double qf = qi[f];
                    p[f] = clamp(pf + gamma * (err * qf - lambda * pf), b);
                    qi[f] = clamp(qf + gamma * (err * pf - lambda * qf), b);
                }
            }
        }
    }

    std::vector<FactorModel> out;
    out.reserve(datasets.size());
    for (std::size_t n = 0; n < datasets.size(); ++n) {
        FactorModel m(k, b);
        for (std::size_t j = 0; j < items.size(); ++j)
            m.add_item(items[j], std::vector<double>(q.begin() + j * k, q.begin() + (j + 1) * k));
        for (std::size_t j = 0; j < users_of[n].size(); ++j)
            m.add_user(users_of[n][j],
                       std::vector<double>(p_of[n].begin() + j * k, p_of[n].begin() + (j + 1) * k));
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> sgd_update(const std::vector<double>& p_u,
                                                               const std::vector<double>& q_i, double rating,
                                                               double gamma, double lambda, double bound) {
    if (p_u.size() != q_i.size()) throw Error("sgd_update: dimension mismatch");
    double err = rating;
    for (std::size_t f = 0; f < p_u.size(); ++f) err -= p_u[f] * q_i[f];
    std::vector<double> p_next(p_u.size()), q_next(q_i.size());
    for (std::size_t f = 0; f < p_u.size(); ++f) {
        p_next[f] = clamp(p_u[f] + gamma * (err * q_i[f] - lambda * p_u[f]), bound);
        q_next[f] = clamp(q_i[f] + gamma * (err * p_u[f] - lambda * q_i[f]), bound);
    }
    return {std::move(p_next), std::move(q_next)};
}

FactorModel train_alone(const RatingDataset& train, const TrainConfig& cfg) {
    if (train.empty()) throw EmptyDatasetError("train_alone: empty training set");
    return std::move(train_sequential({&train}, cfg)[0]);
}

TogetherResult train_together(const RatingDataset& train1, const RatingDataset& train2, const TrainConfig& cfg) {
    for (auto u : train1.user_ids())
        if (train2.user_ids().count(u))
            throw ContractViolation("train_together: user sets overlap at id " + std::to_string(u));
    auto models = train_sequential({&train1, &train2}, cfg);
    return TogetherResult{std::move(models[0]), std::move(models[1])};
}

RmseResult rmse(const FactorModel& model, const RatingDataset& test) {
    RmseResult res;
    double sum = 0.0;
    for (const auto& r : test.ratings()) {
        if (!model.has_item(r.item)) {
            ++res.skipped_cold;
            continue;
        }
        // users absent from training (e.g. fully suppressed) get the neutral
        // empty-profile prediction 0
        const double pred = model.has_user(r.user) ? model.predict(r.user, r.item) : 0.0;
        const double e = r.value - pred;
        sum += e * e;
        ++res.used;
    }
    if (res.used == 0) throw Error("rmse: empty effective test set");
    res.value = std::sqrt(sum / static_cast<double>(res.used));
    return res;
}

}  // namespace col::recsys
