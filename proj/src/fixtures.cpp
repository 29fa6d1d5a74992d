#include "col/fixtures.hpp"

namespace col::fixtures {

namespace {

const std::vector<double> kAxes{0.0, 0.2, 0.4, 0.6};

tradeoff::TradeoffGrid make(std::vector<std::vector<double>> y1, std::vector<std::vector<double>> y2,
                            tradeoff::Provenance prov) {
    tradeoff::TradeoffGrid g;
    g.p1_axis = kAxes;
    g.p2_axis = kAxes;
    g.cells[0] = std::move(y1);
    g.cells[1] = std::move(y2);
    g.theta = {1.0, 1.0};
    g.mechanism = privacy::MechanismKind::BoundedDP;
    g.repeats = 1;
    g.provenance = prov;
    g.validate();
    return g;
}

}  // namespace

tradeoff::TradeoffGrid approximated_grid() {
    return make({{0.28, 0.26, 0.24, -0.05},
                 {0.25, 0.16, 0.15, -0.05},
                 {-0.07, -0.10, -0.19, -0.37},
                 {-1.01, -1.16, -1.37, -1.72}},
                {{0.17, 0.16, 0.15, -0.05},
                 {0.14, 0.12, 0.12, -0.07},
                 {-0.14, -0.17, -0.28, -0.60},
                 {-1.19, -1.21, -1.28, -1.83}},
                tradeoff::Provenance::Fixture);
}

tradeoff::TradeoffGrid true_grid() {
    return make({{0.17, 0.14, 0.11, -0.03},
                 {0.15, 0.12, 0.08, -0.26},
                 {-0.13, -0.19, -0.33, -0.69},
                 {-1.16, -1.32, -1.49, -2.08}},
                {{0.31, 0.23, 0.17, -0.05},
                 {0.31, 0.22, 0.11, -0.18},
                 {-0.14, -0.16, -0.22, -0.52},
                 {-1.13, -1.25, -1.30, -1.85}},
                tradeoff::Provenance::Fixture);
}

}  // namespace col::fixtures
