#pragma once

#include "col/tradeoff.hpp"

namespace col::fixtures {

// 4x4 normalized-improvement tables on axes {0, 0.2, 0.4, 0.6}, theta = 1.
// Rows are the player's own parameter, columns the other player's, matching
// TradeoffGrid's own-parameter-first cell layout.

// Self-division approximations: player 1's table in slot 0, player 2's in
// slot 1. Used for the approximated game (each player's own view).
tradeoff::TradeoffGrid approximated_grid();

// The directly measured surfaces for the same collaboration.
tradeoff::TradeoffGrid true_grid();

}  // namespace col::fixtures
