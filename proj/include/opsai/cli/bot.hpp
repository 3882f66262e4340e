// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opsai/core/json_util.hpp"
#include "opsai/core/model.hpp"
#include "opsai/game/engine.hpp"

namespace opsai::cli {

/// Synthetic player. With probability `competence` the bot ends by playing
/// the level's known-good script; otherwise it only makes random legal
/// edits. After each edit it runs a test with probability `test_propensity`.
struct BotProfile {
  double competence = 0.5;
  double test_propensity = 0.5;
  std::uint64_t seed = 0;

  bool operator==(const BotProfile&) const = default;
  /// Throws ValidationError when a probability is outside [0, 1].
  void validate() const;
};

Json to_json(const BotProfile& profile);
BotProfile bot_profile_from_json(const Json& j);

struct BotSession {
  SessionHeader header;
  std::vector<GameEvent> events;
};

/// Plays one session. The result depends only on the arguments; the
/// session id and timestamps are drawn from the profile seed.
BotSession play_bot_session(const game::LevelSpec& level,
                            const std::vector<PlayerAction>* solution,
                            const BotProfile& profile,
                            const std::string& player_id,
                            const game::SimConfig& cfg);

/// Splits events into append batches of at most `max_batch`.
std::vector<std::vector<GameEvent>> batches(const std::vector<GameEvent>& events,
                                            std::size_t max_batch);

}  // namespace opsai::cli
