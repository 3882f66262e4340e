// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "opsai/core/json_util.hpp"
#include "opsai/game/board.hpp"

namespace opsai::game {

struct LevelFinding {
  std::string element;  // node, edge, arrow id, or JSON path
  std::string message;
};

/// Parses and validates a level file. Throws ParseError with the byte
/// offset on malformed JSON and ValidationError naming the element on the
/// first violated invariant.
LevelSpec load_level(std::string_view text);

/// Every problem found in `text`, for operator tooling. Empty iff
/// load_level would succeed.
std::vector<LevelFinding> validate_level_text(std::string_view text);

/// All invariant violations of an unindexed level description.
std::vector<LevelFinding> check_level(const LevelSpec& level);

Json level_to_json(const LevelSpec& level);
LevelSpec level_from_json(const Json& j);

}  // namespace opsai::game
