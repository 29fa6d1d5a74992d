#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "col/tradeoff.hpp"

namespace col::game {

struct PlayerWeights {
    double accuracy_weight = 1.0;  // B
    double privacy_weight = 0.0;   // C

    void validate() const;
    double ratio() const { return privacy_weight / accuracy_weight; }
    bool unconcerned() const { return privacy_weight == 0.0; }
};

// Linear cost c(p) = 1 - p and benefit b = [y]+ over the players' surfaces.
struct GameConfig {
    std::array<PlayerWeights, 2> weights;
    std::array<tradeoff::TradeoffSurface, 2> surfaces;
    std::vector<double> strategy_grid;

    GameConfig(std::array<PlayerWeights, 2> w, std::array<tradeoff::TradeoffSurface, 2> s,
               std::vector<double> grid = default_strategy_grid());

    static std::vector<double> default_strategy_grid();  // {0, 0.1, ..., 1.0}

    // b_n(p1, p2) = [y_n]+
    double benefit(std::size_t n, double p1, double p2) const;
};

enum class EqStatus { Converged, Trivial, NoPositiveUtility };

std::string to_string(EqStatus s);

struct EquilibriumResult {
    std::pair<double, double> strategies{1.0, 1.0};
    std::array<double, 2> utilities{0.0, 0.0};
    double pop = 1.0;
    std::vector<std::pair<double, double>> trace;
    EqStatus status = EqStatus::Converged;

    std::string to_json() const;
};

// u_n(p1, p2) = B_n [y_n]+ - C_n (1 - p_n)
double utility(std::size_t n, double p1, double p2, const GameConfig& cfg);

// Argmax of u_n over the strategy grid with the opponent fixed; ties within
// 1e-9 break toward the smaller p.
double best_response(std::size_t n, double p_other, const GameConfig& cfg);

struct ThresholdBounds {
    double alpha = 0.0;       // largest C/B with BR 0
    double beta = 0.0;        // smallest C/B with BR 1
    double positivity = 0.0;  // largest C/B with BR < 1 and u(BR) >= 0
};

// Scans C_n/B_n over [0, ratio_max] in steps of ratio_step with the opponent
// fixed at p = 0.
ThresholdBounds threshold_bounds(std::size_t n, const GameConfig& cfg, double ratio_max = 5.0,
                                 double ratio_step = 1e-3);

// Closed-form equilibrium when exactly one player is unconcerned: that player
// plays 0, the concerned one plays rho (0 if its ratio <= b at the origin,
// else an interior local max with positive utility, else 1).
EquilibriumResult caas_equilibrium(const GameConfig& cfg);

// Alternating best responses on the strategy grid, first_mover moving first
// each round. Stops when a round changes nothing; capped at |grid|^2 rounds.
// Any equilibrium leaving a player with negative utility becomes (1,1).
EquilibriumResult br_dynamics(const GameConfig& cfg, std::pair<double, double> start = {0.0, 0.0},
                              std::size_t first_mover = 0);

// True iff neither player has a strictly improving unilateral grid deviation.
bool verify_ne(std::pair<double, double> candidate, const GameConfig& cfg);

// 1 - (b1 + b2 at the strategies) / (b1 + b2 at (0,0)), clamped to [0,1].
double price_of_privacy(std::pair<double, double> strategies, const GameConfig& cfg);

// Max over interior nodes of a uniform evaluation grid of the difference of
// the players' mixed second partials of u_n/B_n (central differences).
double check_potential(const GameConfig& cfg, std::size_t nodes_per_axis = 21);

struct SweepRow {
    double ratio1 = 0.0;
    double ratio2 = 0.0;
    EquilibriumResult eq;
};

// br_dynamics for every (r1, r2) pair with B = 1, C = r.
std::vector<SweepRow> ratio_sweep(const GameConfig& base, const std::vector<double>& ratios1,
                                  const std::vector<double>& ratios2);

// columns ratio1,ratio2,p1,p2,u1,u2,pop,status
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

}  // namespace col::game
