// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "opsai/core/model.hpp"
#include "opsai/game/board.hpp"

namespace opsai::game {

struct Replay {
  std::vector<BoardSnapshot> snapshots;
  BoardState final_board;
};

/// Re-applies the board-mutating player actions of `events` to the level's
/// initial edit board, taking a snapshot after each one. StartTest and
/// SubmitSolution run on a copy and leave the edit board untouched.
///
/// Throws IntegrityError when an action is rejected (`replay_rejected`) or a
/// client-reported board_hash disagrees with the replay (`replay_mismatch`),
/// carrying the offending seq.
Replay replay_actions(const LevelSpec& level,
                      const std::vector<GameEvent>& events);

/// First at_seq whose stored snapshot differs from the replay, if any.
std::optional<std::int64_t> first_divergent_snapshot(const LevelSpec& level,
                                                     const SessionLog& log);

}  // namespace opsai::game
