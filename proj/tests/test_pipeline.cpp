#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "col/fixtures.hpp"
#include "col/pipeline.hpp"

using namespace col;
using namespace col::pipeline;

namespace {

ExperimentPlan desk_plan(std::uint64_t seed, std::size_t ratings = 8000) {
    ExperimentPlan plan;
    plan.synth_ratings = ratings;
    plan.train.learning_rate = 0.1;
    plan.train.iteration_count = 30;
    plan.mechanism = privacy::MechanismKind::BoundedDP;
    plan.sensitivity = 0.3;
    plan.repeats = 1;
    plan.master_seed = seed;
    return plan;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("plan json roundtrip") {
    auto plan = desk_plan(3);
    plan.dataset_path = "data/ratings.csv";
    plan.split_ratio = 2.0;
    plan.weights = {game::PlayerWeights{1.0, 0.25}, game::PlayerWeights{2.0, 0.1}};
    plan.out_dir = "out/run1";
    auto back = ExperimentPlan::from_json(plan.to_json());
    CHECK(back.dataset_path == plan.dataset_path);
    CHECK(back.synth_ratings == plan.synth_ratings);
    CHECK(back.split_ratio == plan.split_ratio);
    CHECK(back.train.learning_rate == plan.train.learning_rate);
    CHECK(back.mechanism == plan.mechanism);
    CHECK(back.sensitivity == plan.sensitivity);
    CHECK(back.axes == plan.axes);
    CHECK(back.weights[0].privacy_weight == 0.25);
    CHECK(back.weights[1].accuracy_weight == 2.0);
    CHECK(back.out_dir == plan.out_dir);
    CHECK(back.master_seed == plan.master_seed);
}

TEST_CASE("plan validation") {
    auto plan = desk_plan(1);
    plan.split_ratio = 0.0;
    CHECK_THROWS_AS(plan.validate(), Error);
    plan = desk_plan(1);
    plan.train_fraction = 1.0;
    CHECK_THROWS_AS(plan.validate(), Error);
    plan = desk_plan(1);
    plan.axes = {0.0, 1.2};
    CHECK_THROWS_AS(plan.validate(), Error);
    plan = desk_plan(1);
    plan.repeats = 0;
    CHECK_THROWS_AS(plan.validate(), Error);
    plan = desk_plan(1);
    plan.strategy_grid = {0.0, 0.5};
    CHECK_THROWS_AS(plan.validate(), Error);
}

TEST_CASE("full process: unconcerned players collaborate at (0,0)") {
    auto plan = desk_plan(11);
    plan.weights = {game::PlayerWeights{1.0, 0.0}, game::PlayerWeights{1.0, 0.0}};
    auto report = run_full_process(plan);
    CHECK(report.ne == std::make_pair(0.0, 0.0));
    CHECK(report.theta[0] > 0.0);
    CHECK(report.theta[1] > 0.0);
    CHECK(report.utilities[0] > 0.0);
    CHECK(report.utilities[1] > 0.0);
    CHECK(report.pop == doctest::Approx(0.0));
    CHECK(report.recommendation == Recommendation::Collaborate);
    for (const auto& g : report.grids) {
        CHECK(g.provenance == tradeoff::Provenance::SelfDivision);
        CHECK(g.cells[0][0][0] > 0.0);
    }
}

TEST_CASE("full process: privacy-dominated players train alone") {
    auto plan = desk_plan(11);
    plan.weights = {game::PlayerWeights{1.0, 5.0}, game::PlayerWeights{1.0, 5.0}};
    auto report = run_full_process(plan);
    CHECK(report.ne == std::make_pair(1.0, 1.0));
    CHECK(report.utilities[0] == 0.0);
    CHECK(report.utilities[1] == 0.0);
    CHECK(report.recommendation == Recommendation::TrainAlone);
}

TEST_CASE("full process is deterministic in the master seed") {
    auto a = run_full_process(desk_plan(19));
    auto b = run_full_process(desk_plan(19));
    CHECK(a.to_json() == b.to_json());
    auto c = run_full_process(desk_plan(20));
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("full process persists grids, equilibria, and the report") {
    TempDir dir("col_pipeline_test");
    auto plan = desk_plan(23);
    plan.out_dir = dir.path;
    auto report = run_full_process(plan);

    for (int n = 1; n <= 2; ++n) {
        auto g = tradeoff::TradeoffGrid::load(dir.path / ("selfdiv_player" + std::to_string(n) + ".json"));
        CHECK(g.cells == report.grids[n - 1].cells);
        CHECK(g.theta == report.grids[n - 1].theta);
        CHECK(std::filesystem::exists(dir.path / ("equilibrium_player" + std::to_string(n) + ".json")));
    }
    auto j = nlohmann::json::parse([&] {
        std::ifstream in(dir.path / "report.json");
        return std::string(std::istreambuf_iterator<char>(in), {});
    }());
    CHECK(j.at("ne")[0].get<double>() == report.ne.first);
    CHECK(j.at("ne")[1].get<double>() == report.ne.second);
    CHECK(j.at("recommendation").get<std::string>() == to_string(report.recommendation));
}

TEST_CASE("alone vs together: equal partners both gain, the smaller gains more") {
    auto plan = desk_plan(29, 12000);
    plan.repeats = 2;
    auto rows = reproduce_alone_vs_together(plan, {1.0, 4.0});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].size_ratio == 1.0);
    CHECK(rows[0].y1 > 0.0);
    CHECK(rows[0].y2 > 0.0);
    CHECK(rows[0].y1 == doctest::Approx(rows[0].y2).epsilon(1.0));
    // at ratio 4 player 2 holds the smaller share and improves more
    CHECK(rows[1].y2 > rows[1].y1);

    TempDir dir("col_ratio_csv");
    std::filesystem::create_directories(dir.path);
    write_ratio_csv(rows, dir.path / "ratios.csv");
    std::ifstream in(dir.path / "ratios.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "size_ratio,y1,y2");
}

TEST_CASE("ne table on the published fixture hits both corner regimes") {
    auto s = tradeoff::interpolate(fixtures::true_grid());
    auto rows = reproduce_ne_table({s, s}, game::GameConfig::default_strategy_grid(), {0.0, 2.0});
    REQUIRE(rows.size() == 4);
    CHECK(rows.front().eq.strategies == std::make_pair(0.0, 0.0));
    CHECK(rows.front().eq.pop == doctest::Approx(0.0));
    CHECK(rows.back().eq.strategies == std::make_pair(1.0, 1.0));
    CHECK(rows.back().eq.pop == doctest::Approx(1.0));
}

TEST_CASE("load_plan_dataset scales the surrogate with the requested size") {
    auto small = load_plan_dataset(desk_plan(31, 4000));
    auto large = load_plan_dataset(desk_plan(31, 16000));
    CHECK(small.size() == 4000);
    CHECK(large.size() == 16000);
    CHECK(large.user_ids().size() > small.user_ids().size());
    const double ds = static_cast<double>(small.size()) /
                      (static_cast<double>(small.user_ids().size()) * static_cast<double>(small.item_ids().size()));
    const double dl = static_cast<double>(large.size()) /
                      (static_cast<double>(large.user_ids().size()) * static_cast<double>(large.item_ids().size()));
    CHECK(ds == doctest::Approx(dl).epsilon(0.35));
}

TEST_CASE("missing dataset path fails with a stage-tagged error") {
    auto plan = desk_plan(37);
    plan.dataset_path = "/nonexistent/ratings.csv";
    CHECK_THROWS_WITH_AS(run_full_process(plan), doctest::Contains("stage"), Error);
}
