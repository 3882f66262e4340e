// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "opsai/core/model.hpp"
#include "opsai/game/board.hpp"
#include "opsai/game/rng.hpp"

namespace opsai::game {

struct SimConfig {
  double stall_probability = 0.25;
  std::int64_t max_ticks = 1000;
  std::int64_t deadlock_window = 50;
  std::int64_t verify_seeds = 64;
  std::uint64_t base_seed = 0;

  /// Throws ValidationError when a field is out of range.
  void validate() const;

  /// `base` with the level's own defaults layered on top.
  static SimConfig for_level(const LevelSpec& level, SimConfig base);

  bool operator==(const SimConfig&) const = default;
};

/// True when a stall draw stalls its arrow: draw / 2^64 < p.
bool stall_draw(std::uint64_t draw, double stall_probability) noexcept;

struct StepOutput {
  BoardState state;
  std::vector<SystemEvent> events;
  SplitMix64 rng;
};

struct RunResult {
  Outcome outcome = Outcome::timeout;
  std::int64_t ticks = 0;
  std::vector<SystemEvent> events;
  BoardState final_state;

  bool operator==(const RunResult&) const = default;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::timeout;
  std::int64_t ticks = 0;

  bool operator==(const SeedOutcome&) const = default;
};

struct VerifyResult {
  std::int64_t seeds_run = 0;
  std::int64_t seeds_passed = 0;
  std::vector<SeedOutcome> per_seed;

  bool solved() const noexcept {
    return seeds_run > 0 && seeds_passed == seeds_run;
  }
};

/// Empty edit board for `level`.
BoardState initial_state(const LevelSpec& level);

/// Applies one player action and returns the new state; `state` is not
/// modified. Throws ActionRejected naming the element on illegal edits.
/// StartTest and SubmitSolution return the board in running phase at tick 0;
/// ResetBoard returns the initial edit board from any phase.
BoardState apply_action(const LevelSpec& level, const BoardState& state,
                        const PlayerAction& action);

/// Builds an edit board from a placement description: semaphores on the
/// listed edges (closed) and signals with their links.
BoardState board_from_placements(
    const LevelSpec& level, const std::vector<std::string>& semaphores,
    const std::map<std::string, std::vector<std::string>>& signals);

/// Arrows that receive a stall draw this tick, ascending by arrow_id: every
/// scheduled arrow not yet delivered, whether on the board or pending.
std::vector<std::string> stall_candidates(const BoardState& state);

/// One tick with explicit stall decisions. Everything after the draws.
StepOutput step_with_stalls(const LevelSpec& level, const BoardState& state,
                            const std::set<std::string>& stalled,
                            const SimConfig& cfg);

/// One tick: one draw per stall candidate, then step_with_stalls.
StepOutput step(const LevelSpec& level, const BoardState& state,
                SplitMix64 rng, const SimConfig& cfg);

/// Runs a test from an edit board. Events begin with TestStarted and end
/// with TestResult.
RunResult run_test(const LevelSpec& level, const BoardState& placements,
                   std::uint64_t seed, const SimConfig& cfg);

/// Runs cfg.verify_seeds tests with seeds splitmix64(base_seed + i).
VerifyResult verify_solution(const LevelSpec& level,
                             const BoardState& placements,
                             const SimConfig& cfg);

}  // namespace opsai::game
