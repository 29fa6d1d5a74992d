#include "col/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "col/preprocess.hpp"
#include "col/rng.hpp"
#include "col/split.hpp"
#include "col/synth.hpp"

namespace col::pipeline {

namespace {

// Sub-seed streams per pipeline stage.
enum Stage : std::uint64_t {
    kSynth = 11,
    kPlayerSplit = 12,
    kTrainTest1 = 13,
    kTrainTest2 = 14,
    kTraining = 15,
    kSelfDiv1 = 16,
    kSelfDiv2 = 17,
    kRatioBase = 30,
};

std::string format_to_string(recsys::FileFormat f) {
    return f == recsys::FileFormat::Csv ? "csv" : "movielens-dat";
}

recsys::FileFormat format_from_string(const std::string& s) {
    if (s == "csv") return recsys::FileFormat::Csv;
    if (s == "movielens-dat") return recsys::FileFormat::MovielensDat;
    throw Error("unknown dataset format '" + s + "'");
}

[[noreturn]] void stage_fail(const char* stage, const std::exception& e) {
    throw Error(std::string("stage ") + stage + ": " + e.what());
}

}  // namespace

void ExperimentPlan::validate() const {
    train.validate();
    weights[0].validate();
    weights[1].validate();
    if (!(split_ratio > 0)) throw Error("ExperimentPlan: split ratio must be positive");
    if (!(train_fraction > 0 && train_fraction < 1)) throw Error("ExperimentPlan: train fraction must be in (0,1)");
    if (repeats < 1) throw Error("ExperimentPlan: repeats must be >= 1");
    if (axes.size() < 2) throw Error("ExperimentPlan: need at least 2 axis values");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i] < 0.0 || axes[i] > 1.0) throw Error("ExperimentPlan: axis value outside [0,1]");
        if (i > 0 && !(axes[i] > axes[i - 1])) throw Error("ExperimentPlan: axes not strictly increasing");
    }
    if (strategy_grid.size() < 2 || strategy_grid.front() != 0.0 || strategy_grid.back() != 1.0)
        throw Error("ExperimentPlan: strategy grid must run from 0 to 1");
}

std::string ExperimentPlan::to_json() const {
    nlohmann::json j;
    j["dataset_path"] = dataset_path.string();
    j["dataset_format"] = format_to_string(dataset_format);
    j["dataset_preprocessed"] = dataset_preprocessed;
    j["synth_ratings"] = synth_ratings;
    j["split_ratio"] = split_ratio;
    j["train_fraction"] = train_fraction;
    j["train"] = {{"features", train.feature_count},     {"iterations", train.iteration_count},
                  {"learning_rate", train.learning_rate}, {"regularization", train.regularization},
                  {"feature_bound", train.feature_bound}, {"seed", train.rng_seed}};
    j["mechanism"] = privacy::to_string(mechanism);
    if (sensitivity) j["sensitivity"] = *sensitivity;
    j["axes"] = axes;
    j["repeats"] = repeats;
    j["weights"] = {{{"B", weights[0].accuracy_weight}, {"C", weights[0].privacy_weight}},
                    {{"B", weights[1].accuracy_weight}, {"C", weights[1].privacy_weight}}};
    j["strategy_grid"] = strategy_grid;
    j["out_dir"] = out_dir.string();
    j["master_seed"] = master_seed;
    return j.dump(2);
}

ExperimentPlan ExperimentPlan::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    ExperimentPlan plan;
    plan.dataset_path = j.value("dataset_path", std::string{});
    plan.dataset_format = format_from_string(j.value("dataset_format", std::string{"csv"}));
    plan.dataset_preprocessed = j.value("dataset_preprocessed", false);
    plan.synth_ratings = j.value("synth_ratings", std::size_t{30000});
    plan.split_ratio = j.value("split_ratio", 1.0);
    plan.train_fraction = j.value("train_fraction", 0.8);
    if (j.contains("train")) {
        const auto& t = j.at("train");
        plan.train.feature_count = t.value("features", std::size_t{4});
        plan.train.iteration_count = t.value("iterations", std::size_t{20});
        plan.train.learning_rate = t.value("learning_rate", 0.0075);
        plan.train.regularization = t.value("regularization", 0.01);
        plan.train.feature_bound = t.value("feature_bound", 0.5);
        plan.train.rng_seed = t.value("seed", std::uint64_t{0});
    }
    plan.mechanism = privacy::mechanism_from_string(j.value("mechanism", std::string{"bdp"}));
    if (j.contains("sensitivity")) plan.sensitivity = j.at("sensitivity").get<double>();
    if (j.contains("axes")) plan.axes = j.at("axes").get<std::vector<double>>();
    plan.repeats = j.value("repeats", std::size_t{3});
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        if (w.size() != 2) throw Error("ExperimentPlan: weights must have 2 entries");
        for (std::size_t n = 0; n < 2; ++n)
            plan.weights[n] = game::PlayerWeights{w[n].value("B", 1.0), w[n].value("C", 0.0)};
    }
    if (j.contains("strategy_grid")) plan.strategy_grid = j.at("strategy_grid").get<std::vector<double>>();
    plan.out_dir = j.value("out_dir", std::string{});
    plan.master_seed = j.value("master_seed", std::uint64_t{0});
    plan.validate();
    return plan;
}

ExperimentPlan ExperimentPlan::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void ExperimentPlan::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json() << '\n';
}

std::string to_string(Recommendation r) {
    return r == Recommendation::Collaborate ? "collaborate" : "train-alone";
}

std::string ProcessReport::to_json() const {
    nlohmann::json j;
    j["theta"] = theta;
    j["grids"] = {nlohmann::json::parse(grids[0].to_json()), nlohmann::json::parse(grids[1].to_json())};
    j["equilibria"] = {nlohmann::json::parse(equilibria[0].to_json()),
                       nlohmann::json::parse(equilibria[1].to_json())};
    j["ne"] = {ne.first, ne.second};
    j["utilities"] = utilities;
    j["pop"] = pop;
    j["recommendation"] = to_string(recommendation);
    return j.dump(2);
}

recsys::RatingDataset load_plan_dataset(const ExperimentPlan& plan) {
    if (plan.dataset_path.empty()) {
        // Surrogate keeps density ~0.033 at any size (users = sqrt(12 |D|),
        // items = 2.5 users); it is generated residual-scale, no preprocessing.
        synth::SynthConfig sc;
        sc.rating_count = plan.synth_ratings;
        sc.user_count = static_cast<std::size_t>(std::lround(std::sqrt(12.0 * plan.synth_ratings)));
        sc.item_count = static_cast<std::size_t>(std::lround(2.5 * sc.user_count));
        sc.factor_count = plan.train.feature_count;
        sc.seed = mix_seed(plan.master_seed, kSynth);
        return synth::generate(sc);
    }
    auto raw = recsys::ingest(plan.dataset_path, plan.dataset_format);
    if (plan.dataset_preprocessed) return raw;
    return recsys::preprocess(raw).residual;
}

ProcessReport run_full_process(const ExperimentPlan& plan) {
    plan.validate();
    ProcessReport report;

    // Initialization: data, per-player train/test, theta via train_alone.
    recsys::RatingDataset d1, d2;
    std::array<tradeoff::PlayerData, 2> players;
    try {
        auto ds = load_plan_dataset(plan);
        recsys::SplitSpec split{plan.split_ratio, mix_seed(plan.master_seed, kPlayerSplit)};
        std::tie(d1, d2) = recsys::split_players(ds, split);
        auto [tr1, te1] = recsys::split_train_test(d1, plan.train_fraction, mix_seed(plan.master_seed, kTrainTest1));
        auto [tr2, te2] = recsys::split_train_test(d2, plan.train_fraction, mix_seed(plan.master_seed, kTrainTest2));
        players[0] = {std::move(tr1), std::move(te1)};
        players[1] = {std::move(tr2), std::move(te2)};
        for (std::size_t n = 0; n < 2; ++n) {
            double sum = 0.0;
            for (std::size_t rep = 0; rep < plan.repeats; ++rep) {
                auto cfg = plan.train;
                cfg.rng_seed = mix_seed(mix_seed(plan.master_seed, kTraining), 7000 + rep);
                sum += recsys::rmse(recsys::train_alone(players[n].train, cfg), players[n].test).value;
            }
            report.theta[n] = sum / static_cast<double>(plan.repeats);
        }
    } catch (const Error& e) {
        stage_fail("initialization", e);
    }

    // Split + Approximation: each player self-divides its own data.
    try {
        const std::array<const recsys::RatingDataset*, 2> own{&d1, &d2};
        for (std::size_t n = 0; n < 2; ++n) {
            tradeoff::SelfDivisionOptions opt;
            opt.measure.mechanism = plan.mechanism;
            opt.measure.axes = plan.axes;
            opt.measure.train = plan.train;
            opt.measure.train.rng_seed = mix_seed(plan.master_seed, kTraining);
            opt.measure.repeats = plan.repeats;
            opt.measure.sensitivity = plan.sensitivity;
            opt.train_fraction = plan.train_fraction;
            opt.seed = mix_seed(plan.master_seed, n == 0 ? kSelfDiv1 : kSelfDiv2);
            report.grids[n] = tradeoff::self_division(*own[n], opt);
        }
    } catch (const Error& e) {
        stage_fail("approximation", e);
    }

    // Game: each player solves the game on its own approximated surface.
    try {
        for (std::size_t n = 0; n < 2; ++n) {
            auto surface = tradeoff::interpolate(report.grids[n]);
            game::GameConfig cfg(plan.weights, {surface, surface}, plan.strategy_grid);
            report.equilibria[n] = game::br_dynamics(cfg);
        }
        report.ne = {report.equilibria[0].strategies.first, report.equilibria[1].strategies.second};
        report.utilities = {report.equilibria[0].utilities[0], report.equilibria[1].utilities[1]};
        report.pop = report.equilibria[0].pop;
        report.recommendation = report.utilities[0] > 0 && report.utilities[1] > 0 ? Recommendation::Collaborate
                                                                                   : Recommendation::TrainAlone;
    } catch (const Error& e) {
        stage_fail("game", e);
    }

    if (!plan.out_dir.empty()) {
        try {
            std::filesystem::create_directories(plan.out_dir);
            report.grids[0].save(plan.out_dir / "selfdiv_player1.json");
            report.grids[1].save(plan.out_dir / "selfdiv_player2.json");
            for (std::size_t n = 0; n < 2; ++n) {
                std::ofstream out(plan.out_dir / ("equilibrium_player" + std::to_string(n + 1) + ".json"));
                out << report.equilibria[n].to_json() << '\n';
            }
            std::ofstream out(plan.out_dir / "report.json");
            out << report.to_json() << '\n';
        } catch (const std::exception& e) {
            stage_fail("persistence", e);
        }
    }
    return report;
}

std::vector<RatioRow> reproduce_alone_vs_together(const ExperimentPlan& plan, const std::vector<double>& ratios) {
    plan.validate();
    auto ds = load_plan_dataset(plan);
    std::vector<RatioRow> rows;
    for (std::size_t idx = 0; idx < ratios.size(); ++idx) {
        RatioRow row;
        row.size_ratio = ratios[idx];
        try {
            recsys::SplitSpec split{ratios[idx], mix_seed(plan.master_seed, kRatioBase + idx)};
            auto [d1, d2] = recsys::split_players(ds, split);
            auto [tr1, te1] =
                recsys::split_train_test(d1, plan.train_fraction, mix_seed(plan.master_seed, kTrainTest1));
            auto [tr2, te2] =
                recsys::split_train_test(d2, plan.train_fraction, mix_seed(plan.master_seed, kTrainTest2));
            double theta[2] = {0, 0}, phi[2] = {0, 0};
            for (std::size_t rep = 0; rep < plan.repeats; ++rep) {
                auto cfg = plan.train;
                cfg.rng_seed = mix_seed(mix_seed(plan.master_seed, kTraining), 7000 + rep);
                theta[0] += recsys::rmse(recsys::train_alone(tr1, cfg), te1).value;
                theta[1] += recsys::rmse(recsys::train_alone(tr2, cfg), te2).value;
                auto together = recsys::train_together(tr1, tr2, cfg);
                phi[0] += recsys::rmse(together.player1, te1).value;
                phi[1] += recsys::rmse(together.player2, te2).value;
            }
            row.y1 = (theta[0] - phi[0]) / theta[0];
            row.y2 = (theta[1] - phi[1]) / theta[1];
        } catch (const Error&) {
            row.y1 = row.y2 = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

void write_ratio_csv(const std::vector<RatioRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "size_ratio,y1,y2\n";
    for (const auto& r : rows) out << r.size_ratio << ',' << r.y1 << ',' << r.y2 << '\n';
}

std::vector<game::SweepRow> reproduce_ne_table(const std::array<tradeoff::TradeoffSurface, 2>& surfaces,
                                               const std::vector<double>& strategy_grid,
                                               const std::vector<double>& ratios) {
    game::GameConfig base({game::PlayerWeights{1.0, 0.0}, game::PlayerWeights{1.0, 0.0}}, surfaces, strategy_grid);
    return game::ratio_sweep(base, ratios, ratios);
}

}  // namespace col::pipeline
