#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "col/fixtures.hpp"
#include "col/game.hpp"
#include "col/pipeline.hpp"
#include "col/preprocess.hpp"
#include "col/rng.hpp"
#include "col/split.hpp"
#include "col/synth.hpp"
#include "col/tradeoff.hpp"

namespace {

using namespace col;

recsys::FileFormat parse_format(const std::string& s) {
    if (s == "dat" || s == "movielens-dat") return recsys::FileFormat::MovielensDat;
    if (s == "csv") return recsys::FileFormat::Csv;
    throw Error("unknown format '" + s + "' (expected dat or csv)");
}

std::vector<double> grid_from_step(double step) {
    if (!(step > 0 && step <= 1)) throw Error("grid step must be in (0,1]");
    std::vector<double> g;
    for (double p = 0.0; p < 1.0 - step / 2; p += step) g.push_back(p);
    g.push_back(1.0);
    return g;
}

// Shared knobs; each subcommand registers the ones it uses.
struct Options {
    std::uint64_t seed = 0;
    std::size_t repeats = 3;
    std::string mech = "sup";
    std::vector<double> axes{0.0, 0.2, 0.4, 0.6};
    double grid_step = 0.1;
    std::string out;
    std::string config;
    recsys::TrainConfig train;
    double sensitivity = -1.0;  // <0 means closed-form default
};

recsys::TrainConfig train_of(const Options& opt) {
    auto cfg = opt.train;
    cfg.rng_seed = opt.seed;
    return cfg;
}

tradeoff::MeasureOptions measure_of(const Options& opt) {
    tradeoff::MeasureOptions m;
    m.mechanism = privacy::mechanism_from_string(opt.mech);
    m.axes = opt.axes;
    m.train = train_of(opt);
    m.repeats = opt.repeats;
    if (opt.sensitivity >= 0) m.sensitivity = opt.sensitivity;
    return m;
}

void add_train_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--features", opt.train.feature_count, "latent feature count");
    cmd->add_option("--iterations", opt.train.iteration_count, "training passes");
    cmd->add_option("--learning-rate", opt.train.learning_rate, "SGD step size");
    cmd->add_option("--regularization", opt.train.regularization, "L2 weight");
    cmd->add_option("--feature-bound", opt.train.feature_bound, "feature clamp bound");
    cmd->add_option("--sensitivity", opt.sensitivity, "bDP noise scale numerator (default: closed-form SGD bound)");
}

tradeoff::TradeoffGrid load_grid(const std::string& grid_path, const std::string& fixture) {
    if (!fixture.empty()) {
        if (fixture == "true") return fixtures::true_grid();
        if (fixture == "approx") return fixtures::approximated_grid();
        throw Error("unknown fixture '" + fixture + "' (expected true or approx)");
    }
    if (grid_path.empty()) throw Error("either --grid or --fixture is required");
    return tradeoff::TradeoffGrid::load(grid_path);
}

game::GameConfig game_of(const tradeoff::TradeoffGrid& grid, double b1, double c1, double b2, double c2,
                         double step) {
    auto surface = tradeoff::interpolate(grid);
    return game::GameConfig({game::PlayerWeights{b1, c1}, game::PlayerWeights{b2, c2}}, {surface, surface},
                            grid_from_step(step));
}

tradeoff::PlayerData split_tt(const recsys::RatingDataset& ds, double fraction, std::uint64_t seed) {
    auto [tr, te] = recsys::split_train_test(ds, fraction, seed);
    return {std::move(tr), std::move(te)};
}

int run(int argc, char** argv) {
    CLI::App app{"Collaborative-learning game toolkit: trade-off measurement, interpolation and equilibria"};
    app.require_subcommand(1);
    Options opt;

    std::string in_path, in2_path, format = "csv", fixture, grid_path;
    double ratio = 1.0, train_fraction = 0.8;
    double b1 = 1.0, c1 = 0.1, b2 = 1.0, c2 = 0.1;
    double p1 = 0.0, p2 = 0.0;
    double ratio_max = 2.0, ratio_step = 0.1;
    std::size_t synth_users = 600, synth_items = 1500, synth_ratings = 30000;

    auto* ingest = app.add_subcommand("ingest", "parse a ratings file and re-emit it as CSV");
    ingest->add_option("--in", in_path, "input ratings file")->required();
    ingest->add_option("--format", format, "dat or csv");
    ingest->add_option("--out", opt.out, "output CSV path");

    auto* prep = app.add_subcommand("preprocess", "filter sparse users/items and remove item/user averages");
    prep->add_option("--in", in_path, "input ratings file")->required();
    prep->add_option("--format", format, "dat or csv");
    prep->add_option("--out", opt.out, "residual dataset CSV path");

    auto* split = app.add_subcommand("split", "split users into two players by rating-count ratio");
    split->add_option("--in", in_path, "input CSV (preprocessed)")->required();
    split->add_option("--ratio", ratio, "player 1 : player 2 rating counts");
    split->add_option("--seed", opt.seed, "split seed");
    split->add_option("--out", opt.out, "output directory")->required();

    auto* measure = app.add_subcommand("measure", "measure the trade-off grid for two player datasets");
    measure->add_option("--p1", in_path, "player 1 dataset CSV")->required();
    measure->add_option("--p2", in2_path, "player 2 dataset CSV")->required();
    measure->add_option("--mech", opt.mech, "sup or bdp");
    measure->add_option("--axes", opt.axes, "privacy-parameter axis values");
    measure->add_option("--repeats", opt.repeats, "seeds to average");
    measure->add_option("--seed", opt.seed, "master seed");
    measure->add_option("--train-fraction", train_fraction, "per-player train share");
    measure->add_option("--out", opt.out, "grid JSON path")->required();
    add_train_flags(measure, opt);

    auto* interp = app.add_subcommand("interpolate", "evaluate an interpolated grid at a point");
    interp->add_option("--grid", grid_path, "grid JSON");
    interp->add_option("--fixture", fixture, "true or approx");
    interp->add_option("--p1", p1, "player 1 parameter")->required();
    interp->add_option("--p2", p2, "player 2 parameter")->required();

    auto* selfdiv = app.add_subcommand("selfdiv", "approximate the trade-off grid from one player's data");
    selfdiv->add_option("--in", in_path, "player dataset CSV")->required();
    selfdiv->add_option("--mech", opt.mech, "sup or bdp");
    selfdiv->add_option("--axes", opt.axes, "privacy-parameter axis values");
    selfdiv->add_option("--repeats", opt.repeats, "seeds to average");
    selfdiv->add_option("--seed", opt.seed, "master seed");
    selfdiv->add_option("--train-fraction", train_fraction, "train share inside each half");
    selfdiv->add_option("--out", opt.out, "grid JSON path")->required();
    add_train_flags(selfdiv, opt);

    auto* caas = app.add_subcommand("caas", "closed-form equilibrium with one unconcerned player");
    caas->add_option("--grid", grid_path, "grid JSON");
    caas->add_option("--fixture", fixture, "true or approx");
    caas->add_option("--b1", b1)->capture_default_str();
    caas->add_option("--c1", c1)->capture_default_str();
    caas->add_option("--b2", b2)->capture_default_str();
    caas->add_option("--c2", c2)->capture_default_str();
    caas->add_option("--grid-step", opt.grid_step, "strategy grid step");

    auto* dyn = app.add_subcommand("dynamics", "best-response dynamics from a starting point");
    dyn->add_option("--grid", grid_path, "grid JSON");
    dyn->add_option("--fixture", fixture, "true or approx");
    dyn->add_option("--b1", b1)->capture_default_str();
    dyn->add_option("--c1", c1)->capture_default_str();
    dyn->add_option("--b2", b2)->capture_default_str();
    dyn->add_option("--c2", c2)->capture_default_str();
    dyn->add_option("--start-p1", p1, "initial player 1 strategy");
    dyn->add_option("--start-p2", p2, "initial player 2 strategy");
    dyn->add_option("--grid-step", opt.grid_step, "strategy grid step");

    auto* pop = app.add_subcommand("pop", "Price of Privacy at a strategy pair");
    pop->add_option("--grid", grid_path, "grid JSON");
    pop->add_option("--fixture", fixture, "true or approx");
    pop->add_option("--p1", p1)->required();
    pop->add_option("--p2", p2)->required();

    auto* table = app.add_subcommand("table", "NE matrix over weight-ratio pairs");
    table->add_option("--grid", grid_path, "grid JSON");
    table->add_option("--fixture", fixture, "true or approx");
    table->add_option("--ratio-max", ratio_max, "largest C/B ratio");
    table->add_option("--ratio-step", ratio_step, "ratio increment");
    table->add_option("--grid-step", opt.grid_step, "strategy grid step");
    table->add_option("--out", opt.out, "CSV path")->required();

    auto* pipe = app.add_subcommand("pipeline", "full pre-collaboration process from a JSON plan");
    pipe->add_option("--config", opt.config, "ExperimentPlan JSON")->required();
    pipe->add_option("--out", opt.out, "output directory override");
    pipe->add_option("--seed", opt.seed, "master seed override")->check(CLI::NonNegativeNumber);

    auto* synth = app.add_subcommand("synth", "generate a synthetic surrogate dataset");
    synth->add_option("--users", synth_users)->capture_default_str();
    synth->add_option("--items", synth_items)->capture_default_str();
    synth->add_option("--ratings", synth_ratings)->capture_default_str();
    synth->add_option("--seed", opt.seed, "generator seed");
    synth->add_option("--out", opt.out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    if (*ingest) {
        auto ds = recsys::ingest(in_path, parse_format(format));
        if (!opt.out.empty()) recsys::write_csv(ds, opt.out);
        std::printf("ratings=%zu users=%zu items=%zu density=%.4f\n", ds.size(), ds.user_ids().size(),
                    ds.item_ids().size(), ds.density());
    } else if (*prep) {
        auto res = recsys::preprocess(recsys::ingest(in_path, parse_format(format)));
        if (!opt.out.empty()) recsys::write_csv(res.residual, opt.out);
        std::printf("ratings=%zu users=%zu items=%zu density=%.4f\n", res.residual.size(),
                    res.residual.user_ids().size(), res.residual.item_ids().size(), res.residual.density());
    } else if (*split) {
        auto ds = recsys::ingest(in_path, recsys::FileFormat::Csv);
        auto [d1, d2] = recsys::split_players(ds, {ratio, opt.seed});
        std::filesystem::create_directories(opt.out);
        recsys::write_csv(d1, std::filesystem::path(opt.out) / "player1.csv");
        recsys::write_csv(d2, std::filesystem::path(opt.out) / "player2.csv");
        std::printf("player1=%zu ratings, player2=%zu ratings\n", d1.size(), d2.size());
    } else if (*measure) {
        auto da = recsys::ingest(in_path, recsys::FileFormat::Csv);
        auto db = recsys::ingest(in2_path, recsys::FileFormat::Csv);
        auto g = tradeoff::measure_grid(split_tt(da, train_fraction, mix_seed(opt.seed, 13)),
                                        split_tt(db, train_fraction, mix_seed(opt.seed, 14)), measure_of(opt));
        g.save(opt.out);
        g.write_csv(std::filesystem::path(opt.out).replace_extension(".csv"));
        std::printf("theta1=%.4f theta2=%.4f -> %s\n", g.theta[0], g.theta[1], opt.out.c_str());
    } else if (*interp) {
        auto surface = tradeoff::interpolate(load_grid(grid_path, fixture));
        std::printf("y1=%.6f y2=%.6f\n", surface.eval_p1p2(0, p1, p2), surface.eval_p1p2(1, p1, p2));
    } else if (*selfdiv) {
        auto ds = recsys::ingest(in_path, recsys::FileFormat::Csv);
        tradeoff::SelfDivisionOptions sopt;
        sopt.measure = measure_of(opt);
        sopt.train_fraction = train_fraction;
        sopt.seed = opt.seed;
        auto g = tradeoff::self_division(ds, sopt);
        g.save(opt.out);
        std::printf("theta=%.4f -> %s\n", g.theta[0], opt.out.c_str());
    } else if (*caas) {
        auto cfg = game_of(load_grid(grid_path, fixture), b1, c1, b2, c2, opt.grid_step);
        std::cout << game::caas_equilibrium(cfg).to_json() << '\n';
    } else if (*dyn) {
        auto cfg = game_of(load_grid(grid_path, fixture), b1, c1, b2, c2, opt.grid_step);
        std::cout << game::br_dynamics(cfg, {p1, p2}).to_json() << '\n';
    } else if (*pop) {
        auto cfg = game_of(load_grid(grid_path, fixture), 1.0, 0.0, 1.0, 0.0, 0.1);
        std::printf("pop=%.6f\n", game::price_of_privacy({p1, p2}, cfg));
    } else if (*table) {
        auto surface = tradeoff::interpolate(load_grid(grid_path, fixture));
        std::vector<double> ratios;
        for (double r = 0.0; r <= ratio_max + ratio_step / 2; r += ratio_step) ratios.push_back(r);
        auto rows = pipeline::reproduce_ne_table({surface, surface}, grid_from_step(opt.grid_step), ratios);
        game::write_sweep_csv(rows, opt.out);
        std::printf("%zu rows -> %s\n", rows.size(), opt.out.c_str());
    } else if (*pipe) {
        auto plan = pipeline::ExperimentPlan::load(opt.config);
        if (!opt.out.empty()) plan.out_dir = opt.out;
        if (pipe->count("--seed")) plan.master_seed = opt.seed;
        auto report = pipeline::run_full_process(plan);
        std::cout << report.to_json() << '\n';
    } else if (*synth) {
        synth::SynthConfig sc;
        sc.user_count = synth_users;
        sc.item_count = synth_items;
        sc.rating_count = synth_ratings;
        sc.seed = opt.seed;
        auto ds = synth::generate(sc);
        recsys::write_csv(ds, opt.out);
        std::printf("ratings=%zu users=%zu items=%zu -> %s\n", ds.size(), ds.user_ids().size(),
                    ds.item_ids().size(), opt.out.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const col::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
