// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "opsai/api/client.hpp"
#include "opsai/cli/bot.hpp"
#include "opsai/game/catalog.hpp"
#include "opsai/storage/reference.hpp"

namespace opsai::cli {

struct SimulateOptions {
  std::string level_id;
  std::size_t bots = 1;
  BotProfile profile;
  std::size_t concurrency = 4;
  std::size_t max_batch = 6;
  game::SimConfig sim;  // layered under the level's defaults
};

/// Profile of bot `index`: the base profile with a per-bot seed.
BotProfile bot_profile(const BotProfile& base, std::size_t index);

/// Plays `bots` sessions, streams each through `client` in batches and
/// finalizes it. Bots run concurrently; results are in bot order.
std::vector<storage::ReferenceEntry> simulate_bots(api::Client& client,
                                                   const game::LevelCatalog& levels,
                                                   const SimulateOptions& options);

}  // namespace opsai::cli
