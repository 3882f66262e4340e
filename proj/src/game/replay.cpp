// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/game/replay.hpp"

#include <algorithm>

#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/core/fnv.hpp"
#include "opsai/game/engine.hpp"

namespace opsai::game {

Replay replay_actions(const LevelSpec& level,
                      const std::vector<GameEvent>& events) {
  Replay r;
  r.final_board = initial_state(level);
  for (const auto& e : events) {
    const PlayerAction* a = e.action();
    if (a == nullptr || !action_mutates_board(a->kind)) continue;
    try {
      r.final_board = apply_action(level, r.final_board, *a);
    } catch (const ActionRejected& ex) {
      throw IntegrityError("replay_rejected",
                           "replay rejected action at seq " +
                               std::to_string(e.seq) + ": " + ex.what(),
                           e.seq);
    }
    std::uint64_t h = canonical_state_hash(r.final_board);
    if (e.board_hash && *e.board_hash != h) {
      throw IntegrityError("replay_mismatch",
                           "board hash mismatch at seq " +
                               std::to_string(e.seq) + ": reported " +
                               hash_to_hex(*e.board_hash) + ", replay " +
                               hash_to_hex(h),
                           e.seq);
    }
    r.snapshots.push_back(BoardSnapshot{e.seq, h, r.final_board});
  }
  return r;
}

std::optional<std::int64_t> first_divergent_snapshot(const LevelSpec& level,
                                                     const SessionLog& log) {
  Replay r = replay_actions(level, log.events);
  std::size_t n = std::max(r.snapshots.size(), log.snapshots.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= r.snapshots.size()) return log.snapshots[i].at_seq;
    if (i >= log.snapshots.size()) return r.snapshots[i].at_seq;
    const auto& stored = log.snapshots[i];
    const auto& replayed = r.snapshots[i];
    if (stored.at_seq != replayed.at_seq ||
        stored.state_hash != replayed.state_hash) {
      return std::min(stored.at_seq, replayed.at_seq);
    }
  }
  return std::nullopt;
}

}  // namespace opsai::game
