// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

// Random value generators for property-style tests.

#pragma once

#include <string>

#include "opsai/core/model.hpp"
#include "opsai/game/rng.hpp"

namespace opsai::testing {

std::string random_text(game::SplitMix64& rng, std::size_t max_len);
game::BoardState random_board(game::SplitMix64& rng);
PlayerAction random_action(game::SplitMix64& rng);
SystemEvent random_system_event(game::SplitMix64& rng);

/// A SessionLog satisfying every invariant, with arbitrary content.
SessionLog random_session(game::SplitMix64& rng);

}  // namespace opsai::testing
