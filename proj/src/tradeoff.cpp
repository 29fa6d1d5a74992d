#include "col/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "col/rng.hpp"
#include "col/split.hpp"

namespace col::tradeoff {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Measured: return "measured";
        case Provenance::SelfDivision: return "self-division";
        case Provenance::Fixture: return "fixture";
    }
    return "measured";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "measured") return Provenance::Measured;
    if (s == "self-division") return Provenance::SelfDivision;
    if (s == "fixture") return Provenance::Fixture;
    throw Error("unknown provenance '" + s + "'");
}

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw Error(std::string("TradeoffGrid: empty ") + name);
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (axis[i] < 0.0 || axis[i] > 1.0) throw Error(std::string("TradeoffGrid: ") + name + " value outside [0,1]");
        if (i > 0 && !(axis[i] > axis[i - 1]))
            throw Error(std::string("TradeoffGrid: ") + name + " not strictly increasing");
    }
}

}  // namespace

void TradeoffGrid::validate() const {
    check_axis(p1_axis, "p1-axis");
    check_axis(p2_axis, "p2-axis");
    for (std::size_t n = 0; n < 2; ++n) {
        if (!(theta[n] > 0)) throw Error("TradeoffGrid: theta must be positive");
        if (cells[n].size() != own_axis(n).size()) throw Error("TradeoffGrid: cell row count mismatch");
        for (const auto& row : cells[n])
            if (row.size() != other_axis(n).size()) throw Error("TradeoffGrid: cell column count mismatch");
    }
}

std::string TradeoffGrid::to_json() const {
    nlohmann::json j;
    j["p1_axis"] = p1_axis;
    j["p2_axis"] = p2_axis;
    j["cells_player1"] = cells[0];
    j["cells_player2"] = cells[1];
    j["theta"] = theta;
    j["mechanism"] = privacy::to_string(mechanism);
    j["repeats"] = repeats;
    j["provenance"] = to_string(provenance);
    j["seed"] = seed;
    j["orientation"] = "own-first";
    return j.dump(2);
}

TradeoffGrid TradeoffGrid::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    TradeoffGrid g;
    g.p1_axis = j.at("p1_axis").get<std::vector<double>>();
    g.p2_axis = j.at("p2_axis").get<std::vector<double>>();
    g.cells[0] = j.at("cells_player1").get<std::vector<std::vector<double>>>();
    g.cells[1] = j.at("cells_player2").get<std::vector<std::vector<double>>>();
    auto th = j.at("theta").get<std::vector<double>>();
    if (th.size() != 2) throw Error("TradeoffGrid: theta must have 2 entries");
    g.theta = {th[0], th[1]};
    g.mechanism = privacy::mechanism_from_string(j.at("mechanism").get<std::string>());
    g.repeats = j.at("repeats").get<std::size_t>();
    g.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    g.seed = j.value("seed", std::uint64_t{0});
    g.validate();
    return g;
}

void TradeoffGrid::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json() << '\n';
}

TradeoffGrid TradeoffGrid::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void TradeoffGrid::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "p1,p2,y1,y2\n";
    for (std::size_t i = 0; i < p1_axis.size(); ++i)
        for (std::size_t j = 0; j < p2_axis.size(); ++j)
            out << p1_axis[i] << ',' << p2_axis[j] << ',' << cells[0][i][j] << ',' << cells[1][j][i] << '\n';
}

TradeoffSurface::TradeoffSurface(TradeoffGrid grid) : grid_(std::move(grid)) {
    grid_.validate();
    if (grid_.p1_axis.size() < 2 || grid_.p2_axis.size() < 2)
        throw Error("TradeoffSurface: need at least 2 axis values per dimension");
}

namespace {

// 1D piecewise-linear with clamped extension.
double interp1(const std::vector<double>& axis, const std::vector<double>& vals, double x) {
    if (x <= axis.front()) return vals.front();
    if (x >= axis.back()) return vals.back();
    std::size_t hi = 1;
    while (axis[hi] < x) ++hi;
    const double w = (x - axis[hi - 1]) / (axis[hi] - axis[hi - 1]);
    return vals[hi - 1] * (1.0 - w) + vals[hi] * w;
}

}  // namespace

double TradeoffSurface::eval(std::size_t player, double p_own, double p_other) const {
    const auto& ao = grid_.own_axis(player);
    const auto& aq = grid_.other_axis(player);
    const auto& c = grid_.cells[player];
    std::vector<double> along_own(ao.size());
    for (std::size_t i = 0; i < ao.size(); ++i) along_own[i] = interp1(aq, c[i], p_other);
    double v = interp1(ao, along_own, p_own);
    if (p_own >= 1.0 || p_other >= 1.0) v = std::min(v, 0.0);
    return v;
}

TradeoffSurface interpolate(TradeoffGrid grid) { return TradeoffSurface(std::move(grid)); }

namespace {

// Averaged train-alone and train-together RMSEs for one grid; shared by
// measure_grid and self_division (which needs the raw accuracies).
struct RawMeasurement {
    std::array<double, 2> theta;                            // averaged alone RMSE
    std::array<std::vector<std::vector<double>>, 2> phi;    // averaged together RMSE, own-first
};

RawMeasurement measure_raw(const PlayerData& d1, const PlayerData& d2, const MeasureOptions& opt) {
    if (opt.repeats < 1) throw Error("measure_grid: repeats must be >= 1");
    for (double a : opt.axes)
        if (a < 0.0 || a > 1.0) throw Error("measure_grid: axis value outside [0,1]");

    const double sens = opt.sensitivity.value_or(privacy::sensitivity({
        opt.train.feature_count, opt.train.iteration_count, opt.train.learning_rate, opt.train.regularization,
        d1.train.rating_span(), opt.train.feature_bound, opt.train.feature_bound,
        privacy::SensitivityVariant::PaperEq6}));

    const std::array<const PlayerData*, 2> players{&d1, &d2};
    RawMeasurement out;

    std::array<std::vector<double>, 2> alone_rep;
    for (std::size_t n = 0; n < 2; ++n) {
        for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
            auto cfg = opt.train;
            cfg.rng_seed = mix_seed(opt.train.rng_seed, 7000 + rep);
            alone_rep[n].push_back(recsys::rmse(recsys::train_alone(players[n]->train, cfg), players[n]->test).value);
        }
        out.theta[n] = std::accumulate(alone_rep[n].begin(), alone_rep[n].end(), 0.0) /
                       static_cast<double>(opt.repeats);
        out.phi[n].assign(opt.axes.size(), std::vector<double>(opt.axes.size(), 0.0));
    }

    auto protect = [&](const recsys::RatingDataset& ds, double p, std::uint64_t seed) {
        if (opt.mechanism == privacy::MechanismKind::Suppression) return privacy::apply_suppression(ds, p, seed);
        return privacy::apply_bdp(ds, privacy::p_to_epsilon(p), sens, seed);
    };

    // Heavy suppression can leave a model with no item the test set knows
    // about; score it as the neutral all-zero predictor instead of failing.
    auto scored_rmse = [](const recsys::FactorModel& m, const recsys::RatingDataset& test) {
        bool any = false;
        for (const auto& r : test.ratings())
            if (m.has_item(r.item)) {
                any = true;
                break;
            }
        if (any) return recsys::rmse(m, test).value;
        double s = 0.0;
        for (const auto& r : test.ratings()) s += r.value * r.value;
        return std::sqrt(s / static_cast<double>(test.size()));
    };

    for (std::size_t i = 0; i < opt.axes.size(); ++i) {
        for (std::size_t j = 0; j < opt.axes.size(); ++j) {
            const double p1 = opt.axes[i];
            const double p2 = opt.axes[j];
            std::array<double, 2> sum{0.0, 0.0};
            for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
                const std::uint64_t cell = (i * opt.axes.size() + j) * 64 + rep;
                auto t1 = protect(d1.train, p1, mix_seed(opt.train.rng_seed, 8000 + cell * 2));
                auto t2 = protect(d2.train, p2, mix_seed(opt.train.rng_seed, 8001 + cell * 2));
                auto cfg = opt.train;
                cfg.rng_seed = mix_seed(opt.train.rng_seed, 7000 + rep);  // same seed as the alone baseline
                try {
                    auto together = recsys::train_together(t1, t2, cfg);
                    // with nothing left to contribute, collaboration cannot
                    // beat training alone: floor that player's error at the
                    // matching alone baseline
                    const double r1 = scored_rmse(together.player1, d1.test);
                    const double r2 = scored_rmse(together.player2, d2.test);
                    sum[0] += t1.empty() ? std::max(r1, alone_rep[0][rep]) : r1;
                    sum[1] += t2.empty() ? std::max(r2, alone_rep[1][rep]) : r2;
                } catch (const Error& e) {
                    throw Error("measure_grid: cell (p1=" + std::to_string(p1) + ", p2=" + std::to_string(p2) +
                                "): " + e.what());
                }
            }
            // own-first: player 1 at (own=i, other=j); player 2 at (own=j, other=i)
            out.phi[0][i][j] = sum[0] / static_cast<double>(opt.repeats);
            out.phi[1][j][i] = sum[1] / static_cast<double>(opt.repeats);
        }
    }
    return out;
}

}  // namespace

TradeoffGrid measure_grid(const PlayerData& player1, const PlayerData& player2, const MeasureOptions& opt) {
    auto raw = measure_raw(player1, player2, opt);
    TradeoffGrid g;
    g.p1_axis = opt.axes;
    g.p2_axis = opt.axes;
    g.theta = raw.theta;
    g.mechanism = opt.mechanism;
    g.repeats = opt.repeats;
    g.provenance = Provenance::Measured;
    g.seed = opt.train.rng_seed;
    for (std::size_t n = 0; n < 2; ++n) {
        g.cells[n].assign(opt.axes.size(), std::vector<double>(opt.axes.size(), 0.0));
        for (std::size_t i = 0; i < opt.axes.size(); ++i)
            for (std::size_t j = 0; j < opt.axes.size(); ++j)
                g.cells[n][i][j] = (raw.theta[n] - raw.phi[n][i][j]) / raw.theta[n];
    }
    g.validate();
    return g;
}

PhiPropertyReport validate_phi_properties(const TradeoffSurface& surface, double tol) {
    PhiPropertyReport rep;
    const auto& g = surface.grid();
    for (std::size_t n = 0; n < 2; ++n) {
        const auto& ao = g.own_axis(n);
        const auto& aq = g.other_axis(n);
        const auto& c = g.cells[n];
        for (std::size_t i = 0; i < ao.size(); ++i) {
            for (std::size_t j = 0; j < aq.size(); ++j) {
                if ((ao[i] >= 1.0 || aq[j] >= 1.0) && c[i][j] > tol) {
                    rep.full_protection_ok = false;
                    rep.violations.push_back("player " + std::to_string(n + 1) + ": y > 0 at full protection node (" +
                                             std::to_string(ao[i]) + "," + std::to_string(aq[j]) + ")");
                }
                if (i + 1 < ao.size() && c[i + 1][j] > c[i][j] + tol) {
                    rep.monotone_ok = false;
                    rep.violations.push_back("player " + std::to_string(n + 1) + ": y increases in own p at (" +
                                             std::to_string(ao[i + 1]) + "," + std::to_string(aq[j]) + ")");
                }
                if (j + 1 < aq.size() && c[i][j + 1] > c[i][j] + tol) {
                    rep.monotone_ok = false;
                    rep.violations.push_back("player " + std::to_string(n + 1) + ": y increases in other p at (" +
                                             std::to_string(ao[i]) + "," + std::to_string(aq[j + 1]) + ")");
                }
            }
        }
        if (!(surface.eval(n, 0.0, 0.0) > 0.0)) {
            rep.positive_at_origin = false;
            rep.violations.push_back("player " + std::to_string(n + 1) + ": y(0,0) <= 0");
        }
    }
    return rep;
}

namespace {

// central difference on a possibly non-uniform axis
double d1_central(const std::vector<double>& x, const std::vector<double>& f, std::size_t i) {
    return (f[i + 1] - f[i - 1]) / (x[i + 1] - x[i - 1]);
}

double d2_central(const std::vector<double>& x, const std::vector<double>& f, std::size_t i) {
    const double hl = x[i] - x[i - 1];
    const double hr = x[i + 1] - x[i];
    return 2.0 * (hl * f[i + 1] - (hl + hr) * f[i] + hr * f[i - 1]) / (hl * hr * (hl + hr));
}

}  // namespace

bool check_symmetric_derivatives(const TradeoffSurface& s1, const TradeoffSurface& s2, double tol) {
    const auto& g1 = s1.grid();
    const auto& g2 = s2.grid();
    if (g1.own_axis(0) != g2.own_axis(1) || g1.other_axis(0) != g2.other_axis(1))
        throw Error("check_symmetric_derivatives: axis mismatch");
    const auto& ao = g1.own_axis(0);
    const auto& aq = g1.other_axis(0);
    double worst = 0.0;
    for (std::size_t j = 0; j < aq.size(); ++j) {
        std::vector<double> f1(ao.size()), f2(ao.size());
        for (std::size_t i = 0; i < ao.size(); ++i) {
            f1[i] = g1.cells[0][i][j];
            f2[i] = g2.cells[1][i][j];
        }
        for (std::size_t i = 1; i + 1 < ao.size(); ++i) {
            worst = std::max(worst, std::abs(d1_central(ao, f1, i) - d1_central(ao, f2, i)));
            worst = std::max(worst, std::abs(d2_central(ao, f1, i) - d2_central(ao, f2, i)));
        }
    }
    return worst < tol;
}

TradeoffGrid self_division(const recsys::RatingDataset& own_data, const SelfDivisionOptions& opt) {
    if (own_data.user_ids().size() < 2) throw Error("self_division: too few users to halve");

    recsys::SplitSpec half{1.0, mix_seed(opt.seed, 9001)};
    auto [a, b] = recsys::split_players(own_data, half);
    auto [tr_a, te_a] = recsys::split_train_test(a, opt.train_fraction, mix_seed(opt.seed, 9002));
    auto [tr_b, te_b] = recsys::split_train_test(b, opt.train_fraction, mix_seed(opt.seed, 9003));

    auto raw = measure_raw({std::move(tr_a), std::move(te_a)}, {std::move(tr_b), std::move(te_b)}, opt.measure);

    // theta and Phi are the means of the two halves'
    // accuracies; one approximated surface serves both player slots.
    const double theta = (raw.theta[0] + raw.theta[1]) / 2.0;
    const std::size_t m = opt.measure.axes.size();
    TradeoffGrid g;
    g.p1_axis = opt.measure.axes;
    g.p2_axis = opt.measure.axes;
    g.theta = {theta, theta};
    g.mechanism = opt.measure.mechanism;
    g.repeats = opt.measure.repeats;
    g.provenance = Provenance::SelfDivision;
    g.seed = opt.seed;
    std::vector<std::vector<double>> y(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double phi_a = raw.phi[0][i][j];
            const double phi_b = raw.phi[1][i][j];
            y[i][j] = (theta - (phi_a + phi_b) / 2.0) / theta;
        }
    g.cells[0] = y;
    g.cells[1] = std::move(y);
    g.validate();
    return g;
}

double heuristic_score(const recsys::RatingDataset& ds) {
    if (ds.empty()) throw EmptyDatasetError("heuristic_score: empty dataset");
    return ds.density() * static_cast<double>(ds.size());
}

double grid_rmse(const TradeoffGrid& a, const TradeoffGrid& b) {
    if (a.p1_axis != b.p1_axis || a.p2_axis != b.p2_axis) throw Error("grid_rmse: axis mismatch");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t i = 0; i < a.cells[n].size(); ++i)
            for (std::size_t j = 0; j < a.cells[n][i].size(); ++j) {
                const double d = a.cells[n][i][j] - b.cells[n][i][j];
                sum += d * d;
                ++count;
            }
    return std::sqrt(sum / static_cast<double>(count));
}

namespace {

// pool-adjacent-violators, non-increasing fit
std::vector<double> pav_decreasing(const std::vector<double>& v) {
    std::vector<double> level;
    std::vector<std::size_t> weight;
    for (double x : v) {
        level.push_back(x);
        weight.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] < level.back()) {
            const double merged =
                (level[level.size() - 2] * weight[weight.size() - 2] + level.back() * weight.back()) /
                static_cast<double>(weight[weight.size() - 2] + weight.back());
            weight[weight.size() - 2] += weight.back();
            level[level.size() - 2] = merged;
            level.pop_back();
            weight.pop_back();
        }
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < level.size(); ++k) out.insert(out.end(), weight[k], level[k]);
    return out;
}

}  // namespace

TradeoffGrid smooth_monotone(const TradeoffGrid& grid) {
    TradeoffGrid g = grid;
    for (std::size_t n = 0; n < 2; ++n) {
        auto& c = g.cells[n];
        // alternate row/column pooling to a fixpoint: one pass in each
        // direction can break monotonicity in the other
        for (int pass = 0; pass < 100; ++pass) {
            auto before = c;
            for (auto& row : c) row = pav_decreasing(row);  // along other axis
            for (std::size_t j = 0; j < c[0].size(); ++j) {  // along own axis
                std::vector<double> col(c.size());
                for (std::size_t i = 0; i < c.size(); ++i) col[i] = c[i][j];
                col = pav_decreasing(col);
                for (std::size_t i = 0; i < c.size(); ++i) c[i][j] = col[i];
            }
            if (c == before) break;
        }
    }
    return g;
}

}  // namespace col::tradeoff
