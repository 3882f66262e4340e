// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

// Exhaustive interleaving enumerator: explores every stall/no-stall choice
// per arrow per tick (up to a tick bound) instead of sampling seeds.

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "opsai/game/engine.hpp"

namespace opsai::testing {

struct InterleavingSearch {
  bool failing_found = false;           // collision or wrong_exit reachable
  std::vector<std::set<std::string>> witness;  // stall sets per tick
  std::int64_t states_explored = 0;
  bool bound_reached = false;
};

InterleavingSearch enumerate_interleavings(const game::LevelSpec& level,
                                           const game::BoardState& placements,
                                           const game::SimConfig& cfg,
                                           std::int64_t tick_bound);

}  // namespace opsai::testing
