#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "col/game.hpp"
#include "col/tradeoff.hpp"

namespace col::pipeline {

// Everything one end-to-end run needs; loads from / saves to a JSON file.
// The master seed derives every stage's sub-seed, so a plan is a complete
// recipe for a byte-identical rerun.
struct ExperimentPlan {
    std::filesystem::path dataset_path;                    // empty => synthetic surrogate
    recsys::FileFormat dataset_format = recsys::FileFormat::Csv;
    bool dataset_preprocessed = false;                     // input is already filtered/centered
    std::size_t synth_ratings = 30000;                     // surrogate size when no dataset_path
    double split_ratio = 1.0;                              // player 1 : player 2 rating counts
    double train_fraction = 0.8;
    recsys::TrainConfig train;
    privacy::MechanismKind mechanism = privacy::MechanismKind::BoundedDP;
    std::optional<double> sensitivity;                     // bDP noise override
    std::vector<double> axes{0.0, 0.2, 0.4, 0.6};
    std::size_t repeats = 3;
    std::array<game::PlayerWeights, 2> weights{game::PlayerWeights{1.0, 0.1}, game::PlayerWeights{1.0, 0.1}};
    std::vector<double> strategy_grid = game::GameConfig::default_strategy_grid();
    std::filesystem::path out_dir;
    std::uint64_t master_seed = 0;

    void validate() const;
    std::string to_json() const;
    static ExperimentPlan from_json(const std::string& text);
    static ExperimentPlan load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

enum class Recommendation { Collaborate, TrainAlone };

std::string to_string(Recommendation r);

struct ProcessReport {
    std::array<double, 2> theta{0.0, 0.0};
    std::array<tradeoff::TradeoffGrid, 2> grids;  // self-division, one per player
    std::array<game::EquilibriumResult, 2> equilibria;  // each player's own game
    std::pair<double, double> ne{0.0, 0.0};       // p1 from player 1's game, p2 from player 2's
    std::array<double, 2> utilities{0.0, 0.0};    // each player's utility in its own game
    double pop = 0.0;                             // from player 1's game
    Recommendation recommendation = Recommendation::TrainAlone;

    std::string to_json() const;
};

// The full pre-collaboration process: ingest (or generate), preprocess,
// per-player theta, self-division approximation, each player's game via
// br_dynamics on its own approximated surface, and the collaborate /
// train-alone decision (collaborate iff both utilities are positive).
// Persists grids, equilibria, and the report under plan.out_dir when set.
ProcessReport run_full_process(const ExperimentPlan& plan);

struct RatioRow {
    double size_ratio = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
};

// Alone-vs-together improvement per dataset size ratio, no privacy applied.
// Per-ratio failures are recorded with NaN improvements and the run continues.
std::vector<RatioRow> reproduce_alone_vs_together(const ExperimentPlan& plan,
                                                  const std::vector<double>& ratios);

void write_ratio_csv(const std::vector<RatioRow>& rows, const std::filesystem::path& path);

// NE matrix over weight-ratio pairs on the given surfaces.
std::vector<game::SweepRow> reproduce_ne_table(const std::array<tradeoff::TradeoffSurface, 2>& surfaces,
                                               const std::vector<double>& strategy_grid,
                                               const std::vector<double>& ratios);

// The plan's input data after ingest/generate and preprocessing.
recsys::RatingDataset load_plan_dataset(const ExperimentPlan& plan);

}  // namespace col::pipeline
