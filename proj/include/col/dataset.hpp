#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "col/errors.hpp"

namespace col::recsys {

struct Rating {
    std::int64_t user = 0;
    std::int64_t item = 0;
    double value = 0.0;

    friend bool operator==(const Rating&, const Rating&) = default;
};

enum class FileFormat { MovielensDat, Csv };

// Sparse user-item rating triplets with id sets and rating bounds.
// Invariants: no duplicate (user,item) pair, every value in [r_min, r_max].
class RatingDataset {
public:
    RatingDataset() = default;
    RatingDataset(std::vector<Rating> ratings, double r_min, double r_max);

    // Bounds taken from observed values.
    static RatingDataset from_ratings(std::vector<Rating> ratings);

    const std::vector<Rating>& ratings() const { return ratings_; }
    const std::set<std::int64_t>& user_ids() const { return users_; }
    const std::set<std::int64_t>& item_ids() const { return items_; }
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    double rating_span() const { return r_max_ - r_min_; }
    std::size_t size() const { return ratings_.size(); }
    bool empty() const { return ratings_.empty(); }

    // |ratings| / (|users| * |items|)
    double density() const;

private:
    std::vector<Rating> ratings_;
    std::set<std::int64_t> users_;
    std::set<std::int64_t> items_;
    double r_min_ = 0.0;
    double r_max_ = 0.0;

    void rebuild_ids_and_check();
};

RatingDataset ingest(const std::filesystem::path& path, FileFormat format);

void write_csv(const RatingDataset& ds, const std::filesystem::path& path);

}  // namespace col::recsys
