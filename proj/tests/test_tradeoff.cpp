#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "col/fixtures.hpp"
#include "col/synth.hpp"
#include "col/split.hpp"
#include "col/tradeoff.hpp"

using namespace col;
using namespace col::tradeoff;

namespace {

// y(p1,p2) = a - b*p_own - c*p_other sampled on the given axes, same for
// both players.
TradeoffGrid linear_grid(double a, double b, double c, std::vector<double> axes = {0.0, 0.5, 1.0}) {
    TradeoffGrid g;
    g.p1_axis = axes;
    g.p2_axis = axes;
    g.theta = {1.0, 1.0};
    for (std::size_t n = 0; n < 2; ++n) {
        g.cells[n].assign(axes.size(), std::vector<double>(axes.size(), 0.0));
        for (std::size_t i = 0; i < axes.size(); ++i)
            for (std::size_t j = 0; j < axes.size(); ++j) g.cells[n][i][j] = a - b * axes[i] - c * axes[j];
    }
    return g;
}

struct DeskData {
    PlayerData p1, p2;
};

DeskData desk_players(std::size_t ratings, std::uint64_t seed) {
    synth::SynthConfig sc;
    sc.rating_count = ratings;
    sc.user_count = static_cast<std::size_t>(std::lround(std::sqrt(12.0 * ratings)));
    sc.item_count = static_cast<std::size_t>(std::lround(2.5 * sc.user_count));
    sc.seed = seed;
    auto ds = synth::generate(sc);
    auto [d1, d2] = recsys::split_players(ds, {1.0, seed});
    auto [tr1, te1] = recsys::split_train_test(d1, 0.8, mix_seed(seed, 13));
    auto [tr2, te2] = recsys::split_train_test(d2, 0.8, mix_seed(seed, 14));
    return {{std::move(tr1), std::move(te1)}, {std::move(tr2), std::move(te2)}};
}

MeasureOptions desk_options(std::uint64_t seed, privacy::MechanismKind mech = privacy::MechanismKind::Suppression) {
    MeasureOptions opt;
    opt.mechanism = mech;
    opt.train.learning_rate = 0.1;
    opt.train.iteration_count = 30;
    opt.train.rng_seed = seed;
    opt.repeats = 1;
    opt.sensitivity = 0.3;
    return opt;
}

}  // namespace

TEST_CASE("grid validation catches malformed grids") {
    auto g = linear_grid(0.3, 0.2, 0.1);
    CHECK_NOTHROW(g.validate());
    auto bad = g;
    bad.p1_axis = {0.0, 0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = g;
    bad.p2_axis = {0.0, 0.5, 1.5};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = g;
    bad.theta[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = g;
    bad.cells[0].pop_back();
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("grid json and csv serialization roundtrip") {
    auto g = fixtures::true_grid();
    g.seed = 99;
    auto back = TradeoffGrid::from_json(g.to_json());
    CHECK(back.cells[0] == g.cells[0]);
    CHECK(back.cells[1] == g.cells[1]);
    CHECK(back.p1_axis == g.p1_axis);
    CHECK(back.theta == g.theta);
    CHECK(back.provenance == g.provenance);
    CHECK(back.seed == 99);

    auto dir = std::filesystem::temp_directory_path();
    g.save(dir / "grid.json");
    auto loaded = TradeoffGrid::load(dir / "grid.json");
    CHECK(loaded.cells[0] == g.cells[0]);
    g.write_csv(dir / "grid.csv");
    CHECK(std::filesystem::file_size(dir / "grid.csv") > 0);
}

TEST_CASE("interpolation: exact at nodes, mean at edge midpoints") {
    auto g = fixtures::approximated_grid();
    auto surface = interpolate(g);
    for (std::size_t i = 0; i < g.p1_axis.size(); ++i)
        for (std::size_t j = 0; j < g.p2_axis.size(); ++j)
            CHECK(surface.eval(0, g.p1_axis[i], g.p2_axis[j]) == doctest::Approx(g.cells[0][i][j]));
    CHECK(surface.eval(0, 0.1, 0.0) == doctest::Approx((0.28 + 0.25) / 2));
    CHECK(surface.eval(0, 0.0, 0.1) == doctest::Approx((0.28 + 0.26) / 2));
    CHECK(surface.eval(1, 0.1, 0.0) == doctest::Approx((0.17 + 0.14) / 2));
}

TEST_CASE("interpolation: clamped extension and the p=1 rule") {
    auto surface = interpolate(fixtures::approximated_grid());
    // beyond the last measured axis value the boundary value carries over
    CHECK(surface.eval(0, 0.8, 0.0) == doctest::Approx(-1.01));
    CHECK(surface.eval(0, 0.0, 0.8) == doctest::Approx(-0.05));
    // at p=1 a positive carried-over value would be forced to zero
    auto pos = linear_grid(0.5, 0.1, 0.05, {0.0, 0.2, 0.4, 0.6});
    auto s2 = interpolate(pos);
    CHECK(s2.eval(0, 1.0, 0.0) == 0.0);
    CHECK(s2.eval(0, 0.0, 1.0) == 0.0);
    CHECK(s2.eval(0, 0.9, 0.0) == doctest::Approx(0.5 - 0.1 * 0.6));  // clamp, not forced
}

TEST_CASE("degenerate single-node axis is rejected") {
    TradeoffGrid g;
    g.p1_axis = {0.0};
    g.p2_axis = {0.0, 1.0};
    g.cells[0] = {{0.1, 0.0}};
    g.cells[1] = {{0.1}, {0.0}};
    CHECK_THROWS_AS(interpolate(g), Error);
}

TEST_CASE("phi property validation") {
    // analytic: (b),(c) pass; (a) flagged because y(1,*) stays positive
    auto good = linear_grid(0.3, 0.2, 0.1);
    auto rep = validate_phi_properties(interpolate(good), 1e-9);
    CHECK(rep.monotone_ok);
    CHECK(rep.positive_at_origin);
    CHECK_FALSE(rep.full_protection_ok);
    CHECK_FALSE(rep.violations.empty());

    auto fix = validate_phi_properties(interpolate(fixtures::approximated_grid()), 1e-9);
    CHECK(fix.positive_at_origin);

    auto zero = linear_grid(0.0, 0.0, 0.0);
    CHECK_FALSE(validate_phi_properties(interpolate(zero), 1e-9).positive_at_origin);
}

TEST_CASE("symmetric derivative check") {
    auto sym = linear_grid(0.3, 0.2, 0.1, {0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(check_symmetric_derivatives(interpolate(sym), interpolate(sym), 1e-9));

    auto doubled = sym;
    for (auto& row : doubled.cells[1])
        for (auto& v : row) v *= 2.0;
    CHECK_FALSE(check_symmetric_derivatives(interpolate(sym), interpolate(doubled), 0.05));

    auto other_axes = sym;
    other_axes.p1_axis = {0.0, 0.5, 0.6, 0.9, 1.0};
    CHECK_THROWS_AS(check_symmetric_derivatives(interpolate(sym), interpolate(other_axes), 0.1), Error);
}

TEST_CASE("measure_grid: deterministic, improvement at the origin, p=1 kills it") {
    auto data = desk_players(8000, 21);
    auto opt = desk_options(21);
    opt.axes = {0.0, 1.0};
    auto g = measure_grid(data.p1, data.p2, opt);
    CHECK(g.provenance == Provenance::Measured);
    CHECK(g.theta[0] > 0);
    CHECK(g.theta[1] > 0);
    CHECK(g.cells[0][0][0] > 0.0);  // training together beats training alone
    CHECK(g.cells[1][0][0] > 0.0);
    // suppression with p=1 wipes that player's data: no possible benefit
    CHECK(g.cells[0][1][0] <= 0.0);
    CHECK(g.cells[0][1][1] <= 0.0);
    CHECK(g.cells[1][1][0] <= 0.0);

    auto again = measure_grid(data.p1, data.p2, opt);
    CHECK(again.cells[0] == g.cells[0]);
    CHECK(again.cells[1] == g.cells[1]);
    CHECK(again.theta == g.theta);
}

TEST_CASE("measure_grid rejects bad axes") {
    auto data = desk_players(4000, 22);
    auto opt = desk_options(22);
    opt.axes = {0.0, 1.2};
    CHECK_THROWS_AS(measure_grid(data.p1, data.p2, opt), Error);
    opt.axes = {0.0, 0.5};
    opt.repeats = 0;
    CHECK_THROWS_AS(measure_grid(data.p1, data.p2, opt), Error);
}

TEST_CASE("self_division: metadata, shape and determinism") {
    synth::SynthConfig sc;
    sc.rating_count = 8000;
    sc.user_count = 310;
    sc.item_count = 775;
    sc.seed = 23;
    auto ds = synth::generate(sc);

    SelfDivisionOptions opt;
    opt.measure = desk_options(23);
    opt.measure.axes = {0.0, 0.3, 0.6};
    opt.seed = 23;
    auto g = self_division(ds, opt);
    CHECK(g.provenance == Provenance::SelfDivision);
    CHECK(g.p1_axis == opt.measure.axes);
    CHECK(g.p2_axis == opt.measure.axes);
    CHECK(g.cells[0].size() == 3);
    CHECK(g.theta[0] == g.theta[1]);  // one approximated surface for both slots
    CHECK(g.cells[0] == g.cells[1]);
    CHECK_NOTHROW(interpolate(g));  // interchangeable with measured grids downstream

    auto again = self_division(ds, opt);
    CHECK(again.cells[0] == g.cells[0]);

    recsys::RatingDataset tiny({{1, 1, 0.0}}, -2.0, 2.0);
    CHECK_THROWS_AS(self_division(tiny, opt), Error);
}

TEST_CASE("heuristic_score") {
    recsys::RatingDataset one({{1, 1, 0.5}}, -2.0, 2.0);
    CHECK(heuristic_score(one) == doctest::Approx(1.0));
    // 6 ratings over 2 users x 3 items: 36/6 = 6
    recsys::RatingDataset six({{1, 1, 0.0}, {1, 2, 0.0}, {1, 3, 0.0}, {2, 1, 0.0}, {2, 2, 0.0}, {2, 3, 0.0}}, -2.0, 2.0);
    CHECK(heuristic_score(six) == doctest::Approx(6.0));
    CHECK_THROWS_AS(heuristic_score(recsys::RatingDataset{}), EmptyDatasetError);
}

TEST_CASE("grid_rmse") {
    auto a = fixtures::approximated_grid();
    CHECK(grid_rmse(a, a) == doctest::Approx(0.0));
    auto shifted = a;
    for (auto& cells : shifted.cells)
        for (auto& row : cells)
            for (auto& v : row) v += 0.1;
    CHECK(grid_rmse(a, shifted) == doctest::Approx(0.1));
    const double fixture_err = grid_rmse(fixtures::approximated_grid(), fixtures::true_grid());
    CHECK(fixture_err > 0.0);
    CHECK(fixture_err < 0.5);
    auto other = a;
    other.p1_axis = {0.0, 0.1, 0.2, 0.3};
    CHECK_THROWS_AS(grid_rmse(a, other), Error);
}

TEST_CASE("smooth_monotone enforces non-increasing cells and keeps monotone grids") {
    auto monotone = linear_grid(0.3, 0.2, 0.1);
    auto smoothed = smooth_monotone(monotone);
    CHECK(smoothed.cells[0] == monotone.cells[0]);

    auto noisy = monotone;
    noisy.cells[0][1][1] = 0.9;  // bump violating both directions
    auto fixed = smooth_monotone(noisy);
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                if (i + 1 < 3) CHECK(fixed.cells[n][i + 1][j] <= fixed.cells[n][i][j] + 1e-12);
                if (j + 1 < 3) CHECK(fixed.cells[n][i][j + 1] <= fixed.cells[n][i][j] + 1e-12);
            }
}
