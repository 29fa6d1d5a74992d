#include "col/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace col::game {

namespace {
constexpr double kTieTol = 1e-9;
}

void PlayerWeights::validate() const {
    if (!(accuracy_weight > 0)) throw Error("PlayerWeights: B must be positive");
    if (privacy_weight < 0) throw Error("PlayerWeights: C must be non-negative");
    if (!std::isfinite(ratio())) throw Error("PlayerWeights: C/B must be finite");
}

std::vector<double> GameConfig::default_strategy_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
}

GameConfig::GameConfig(std::array<PlayerWeights, 2> w, std::array<tradeoff::TradeoffSurface, 2> s,
                       std::vector<double> grid)
    : weights(w), surfaces{std::move(s[0]), std::move(s[1])}, strategy_grid(std::move(grid)) {
    weights[0].validate();
    weights[1].validate();
    if (strategy_grid.size() < 2) throw Error("GameConfig: strategy grid needs at least {0, 1}");
    for (std::size_t i = 0; i < strategy_grid.size(); ++i) {
        if (strategy_grid[i] < 0.0 || strategy_grid[i] > 1.0)
            throw Error("GameConfig: strategy grid value outside [0,1]");
        if (i > 0 && !(strategy_grid[i] > strategy_grid[i - 1]))
            throw Error("GameConfig: strategy grid not strictly increasing");
    }
    if (strategy_grid.front() != 0.0 || strategy_grid.back() != 1.0)
        throw Error("GameConfig: strategy grid must contain 0 and 1");
}

double GameConfig::benefit(std::size_t n, double p1, double p2) const {
    return std::max(0.0, surfaces[n].eval_p1p2(n, p1, p2));
}

std::string to_string(EqStatus s) {
    switch (s) {
        case EqStatus::Converged: return "converged";
        case EqStatus::Trivial: return "trivial";
        case EqStatus::NoPositiveUtility: return "no-positive-utility";
    }
    return "converged";
}

std::string EquilibriumResult::to_json() const {
    nlohmann::json j;
    j["p1"] = strategies.first;
    j["p2"] = strategies.second;
    j["u1"] = utilities[0];
    j["u2"] = utilities[1];
    j["pop"] = pop;
    j["status"] = to_string(status);
    auto& t = j["trace"] = nlohmann::json::array();
    for (const auto& [a, b] : trace) t.push_back({a, b});
    return j.dump(2);
}

double utility(std::size_t n, double p1, double p2, const GameConfig& cfg) {
    const double p_own = n == 0 ? p1 : p2;
    return cfg.weights[n].accuracy_weight * cfg.benefit(n, p1, p2) -
           cfg.weights[n].privacy_weight * (1.0 - p_own);
}

namespace {

double utility_own(std::size_t n, double p_own, double p_other, const GameConfig& cfg) {
    return n == 0 ? utility(0, p_own, p_other, cfg) : utility(1, p_other, p_own, cfg);
}

// PoP with a fallback for degenerate (non-positive total benefit) games,
// used when attaching PoP to equilibria; the public op still throws.
double pop_or(std::pair<double, double> s, const GameConfig& cfg, double fallback) {
    const double denom = cfg.benefit(0, 0, 0) + cfg.benefit(1, 0, 0);
    if (!(denom > 0)) return fallback;
    const double num = cfg.benefit(0, s.first, s.second) + cfg.benefit(1, s.first, s.second);
    return std::clamp(1.0 - num / denom, 0.0, 1.0);
}

EquilibriumResult finish(std::pair<double, double> s, const GameConfig& cfg, EqStatus status,
                         std::vector<std::pair<double, double>> trace) {
    EquilibriumResult res;
    res.strategies = s;
    res.utilities = {utility(0, s.first, s.second, cfg), utility(1, s.first, s.second, cfg)};
    if (res.utilities[0] < -kTieTol || res.utilities[1] < -kTieTol) {
        res.strategies = {1.0, 1.0};
        res.utilities = {utility(0, 1, 1, cfg), utility(1, 1, 1, cfg)};
        status = EqStatus::NoPositiveUtility;
    } else if (res.strategies == std::make_pair(1.0, 1.0)) {
        status = EqStatus::Trivial;
    }
    res.pop = pop_or(res.strategies, cfg, 1.0);
    res.status = status;
    res.trace = std::move(trace);
    res.trace.push_back(res.strategies);
    return res;
}

}  // namespace

double best_response(std::size_t n, double p_other, const GameConfig& cfg) {
    double best_p = cfg.strategy_grid.front();
    double best_u = utility_own(n, best_p, p_other, cfg);
    for (double p : cfg.strategy_grid) {
        const double u = utility_own(n, p, p_other, cfg);
        if (u > best_u + kTieTol) {  // strict improvement only: ties keep the smaller p
            best_u = u;
            best_p = p;
        }
    }
    return best_p;
}

ThresholdBounds threshold_bounds(std::size_t n, const GameConfig& cfg, double ratio_max, double ratio_step) {
    ThresholdBounds out;
    out.beta = ratio_max;
    bool beta_found = false;
    GameConfig scan = cfg;
    for (double r = 0.0; r <= ratio_max + ratio_step / 2; r += ratio_step) {
        scan.weights[n] = PlayerWeights{1.0, r};
        const double br = best_response(n, 0.0, scan);
        if (br == 0.0) out.alpha = r;
        if (br == 1.0 && !beta_found) {
            out.beta = r;
            beta_found = true;
        }
        // u(1) = 0 always, so the no-collaboration branch is excluded: the
        // bound is about the largest ratio at which collaborating still pays.
        if (br < 1.0 && utility_own(n, br, 0.0, scan) >= -kTieTol) out.positivity = r;
    }
    return out;
}

EquilibriumResult caas_equilibrium(const GameConfig& cfg) {
    const bool un0 = cfg.weights[0].unconcerned();
    const bool un1 = cfg.weights[1].unconcerned();
    if (un0 == un1)
        throw Error("caas_equilibrium: exactly one player must be unconcerned (use br_dynamics otherwise)");
    const std::size_t conc = un0 ? 1 : 0;

    // The concerned player's best grid point against the unconcerned 0;
    // ties toward smaller p make rho = 0 whenever its ratio <= b(0,0).
    const double rho = best_response(conc, 0.0, cfg);
    const std::pair<double, double> s = conc == 0 ? std::make_pair(rho, 0.0) : std::make_pair(0.0, rho);
    return finish(s, cfg, EqStatus::Converged, {s});
}

EquilibriumResult br_dynamics(const GameConfig& cfg, std::pair<double, double> start, std::size_t first_mover) {
    if (first_mover > 1) throw Error("br_dynamics: first mover must be 0 or 1");
    std::array<double, 2> p{start.first, start.second};
    std::vector<std::pair<double, double>> trace{{p[0], p[1]}};
    const std::size_t cap = cfg.strategy_grid.size() * cfg.strategy_grid.size();
    for (std::size_t round = 0; round < cap; ++round) {
        bool changed = false;
        for (std::size_t k = 0; k < 2; ++k) {
            const std::size_t n = (first_mover + k) % 2;
            const double next = best_response(n, p[1 - n], cfg);
            if (next != p[n]) {
                p[n] = next;
                changed = true;
                trace.emplace_back(p[0], p[1]);
            }
        }
        if (!changed) return finish({p[0], p[1]}, cfg, EqStatus::Converged, std::move(trace));
    }
    throw Error("br_dynamics: no convergence within " + std::to_string(cap) + " rounds");
}

bool verify_ne(std::pair<double, double> candidate, const GameConfig& cfg) {
    auto on_grid = [&](double p) {
        return std::any_of(cfg.strategy_grid.begin(), cfg.strategy_grid.end(),
                           [&](double g) { return std::abs(g - p) < 1e-12; });
    };
    if (!on_grid(candidate.first) || !on_grid(candidate.second))
        throw Error("verify_ne: candidate not on the strategy grid");
    for (std::size_t n = 0; n < 2; ++n) {
        const double p_other = n == 0 ? candidate.second : candidate.first;
        const double here = utility_own(n, n == 0 ? candidate.first : candidate.second, p_other, cfg);
        for (double dev : cfg.strategy_grid)
            if (utility_own(n, dev, p_other, cfg) > here + kTieTol) return false;
    }
    return true;
}

double price_of_privacy(std::pair<double, double> strategies, const GameConfig& cfg) {
    const double denom = cfg.benefit(0, 0, 0) + cfg.benefit(1, 0, 0);
    if (!(denom > 0)) throw Error("price_of_privacy: zero total benefit at (0,0), PoP undefined");
    const double num = cfg.benefit(0, strategies.first, strategies.second) +
                       cfg.benefit(1, strategies.first, strategies.second);
    return std::clamp(1.0 - num / denom, 0.0, 1.0);
}

double check_potential(const GameConfig& cfg, std::size_t nodes_per_axis) {
    if (nodes_per_axis < 3) throw Error("check_potential: need at least 3 nodes per axis");
    const std::size_t m = nodes_per_axis;
    const double h = 1.0 / static_cast<double>(m - 1);
    auto node = [&](std::size_t k) { return static_cast<double>(k) * h; };
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        for (std::size_t j = 1; j + 1 < m; ++j) {
            double mixed[2];
            for (std::size_t n = 0; n < 2; ++n) {
                auto f = [&](std::size_t a, std::size_t b) {
                    return utility(n, node(a), node(b), cfg) / cfg.weights[n].accuracy_weight;
                };
                mixed[n] = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4 * h * h);
            }
            worst = std::max(worst, std::abs(mixed[0] - mixed[1]));
        }
    }
    return worst;
}

std::vector<SweepRow> ratio_sweep(const GameConfig& base, const std::vector<double>& ratios1,
                                  const std::vector<double>& ratios2) {
    std::vector<SweepRow> rows;
    GameConfig cfg = base;
    for (double r1 : ratios1) {
        for (double r2 : ratios2) {
            cfg.weights[0] = PlayerWeights{1.0, r1};
            cfg.weights[1] = PlayerWeights{1.0, r2};
            rows.push_back({r1, r2, br_dynamics(cfg)});
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "ratio1,ratio2,p1,p2,u1,u2,pop,status\n";
    for (const auto& r : rows)
        out << r.ratio1 << ',' << r.ratio2 << ',' << r.eq.strategies.first << ',' << r.eq.strategies.second << ','
            << r.eq.utilities[0] << ',' << r.eq.utilities[1] << ',' << r.eq.pop << ',' << to_string(r.eq.status)
            << '\n';
}

}  // namespace col::game
