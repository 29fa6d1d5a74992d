#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "col/dataset.hpp"
#include "col/mechanism.hpp"
#include "col/train.hpp"

namespace col::tradeoff {

enum class Provenance { Measured, SelfDivision, Fixture };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// Normalized accuracy improvement y = (theta_n - Phi_n)/theta_n per player
// over a (p1, p2) grid. Cells are stored own-parameter-first: cells[n][i][j]
// is player n's y at (own p = own-axis[i], other p = other-axis[j]); player
// 1's own axis is p1_axis, player 2's is p2_axis.
struct TradeoffGrid {
    std::vector<double> p1_axis;
    std::vector<double> p2_axis;
    std::array<std::vector<std::vector<double>>, 2> cells;
    std::array<double, 2> theta{1.0, 1.0};
    privacy::MechanismKind mechanism = privacy::MechanismKind::Suppression;
    std::size_t repeats = 1;
    Provenance provenance = Provenance::Measured;
    std::uint64_t seed = 0;

    const std::vector<double>& own_axis(std::size_t player) const { return player == 0 ? p1_axis : p2_axis; }
    const std::vector<double>& other_axis(std::size_t player) const { return player == 0 ? p2_axis : p1_axis; }

    void validate() const;

    std::string to_json() const;
    static TradeoffGrid from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static TradeoffGrid load(const std::filesystem::path& path);

    // columns p1,p2,y1,y2
    void write_csv(const std::filesystem::path& path) const;
};

// Piecewise-bilinear evaluation over the grid. Outside the measured axis
// range the value clamps to the boundary; at p = 1 (either coordinate) it is
// additionally capped at 0 so full protection never shows a benefit.
class TradeoffSurface {
public:
    explicit TradeoffSurface(TradeoffGrid grid);

    const TradeoffGrid& grid() const { return grid_; }

    // y for `player` at (own parameter, other parameter).
    double eval(std::size_t player, double p_own, double p_other) const;

    // y as a function of the canonical pair (p1, p2).
    double eval_p1p2(std::size_t player, double p1, double p2) const {
        return player == 0 ? eval(0, p1, p2) : eval(1, p2, p1);
    }

private:
    TradeoffGrid grid_;
};

TradeoffSurface interpolate(TradeoffGrid grid);

struct PlayerData {
    recsys::RatingDataset train;
    recsys::RatingDataset test;
};

struct MeasureOptions {
    privacy::MechanismKind mechanism = privacy::MechanismKind::Suppression;
    std::vector<double> axes{0.0, 0.2, 0.4, 0.6};
    recsys::TrainConfig train;
    std::size_t repeats = 3;
    // Laplace scale numerator for bDP; defaults to the closed-form SGD bound computed
    // from the train config and the data's rating span.
    std::optional<double> sensitivity;
};

// Runs the full measurement protocol: per (p1,p2) cell apply the mechanism to
// both training sets, train together, evaluate both players, average RMSEs
// over repeats; theta from train_alone with the same repeats.
TradeoffGrid measure_grid(const PlayerData& player1, const PlayerData& player2, const MeasureOptions& opt);

struct PhiPropertyReport {
    bool full_protection_ok = true;   // y <= 0 wherever a coordinate is 1
    bool monotone_ok = true;          // y non-increasing along both axes
    bool positive_at_origin = true;   // y(0,0) > 0
    std::vector<std::string> violations;

    bool all_ok() const { return full_protection_ok && monotone_ok && positive_at_origin; }
};

PhiPropertyReport validate_phi_properties(const TradeoffSurface& surface, double tol);

// Symmetry check: own-parameter derivatives of the two players' surfaces
// agree (first and second order central differences) within tol.
bool check_symmetric_derivatives(const TradeoffSurface& s1, const TradeoffSurface& s2, double tol);

struct SelfDivisionOptions {
    MeasureOptions measure;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

// Approximates the player's trade-off surface from its own data alone:
// halves the user set, runs the measurement protocol on the halves, and
// averages the two halves' accuracies.
TradeoffGrid self_division(const recsys::RatingDataset& own_data, const SelfDivisionOptions& opt);

// d * |ratings| = |ratings|^2 / (|users| * |items|); compared against the
// 1e5 target when judging self-division fidelity.
double heuristic_score(const recsys::RatingDataset& ds);

// Root-mean-square cellwise difference over both players' cells.
double grid_rmse(const TradeoffGrid& a, const TradeoffGrid& b);

// Optional isotonic pass: pool-adjacent-violators along each axis so y is
// non-increasing in both coordinates. Not applied anywhere by default.
TradeoffGrid smooth_monotone(const TradeoffGrid& grid);

}  // namespace col::tradeoff
