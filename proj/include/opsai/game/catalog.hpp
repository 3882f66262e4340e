// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opsai/core/model.hpp"
#include "opsai/game/board.hpp"

namespace opsai::game {

/// Parses a known-good placement script:
/// `{"level_id": ..., "actions": [PlayerAction...]}`.
std::vector<PlayerAction> load_solution(std::string_view text);

/// Read-only set of levels loaded from a directory of `{id}.json` files,
/// with optional `{id}.solution.json` placement scripts alongside.
class LevelCatalog {
 public:
  LevelCatalog() = default;

  /// Throws IoError when the directory is unreadable and ValidationError
  /// when a level file is invalid.
  explicit LevelCatalog(const std::filesystem::path& dir);

  void add(LevelSpec level,
           std::optional<std::vector<PlayerAction>> solution = std::nullopt);

  /// Throws NotFoundError.
  const LevelSpec& get(std::string_view level_id) const;
  const LevelSpec* find(std::string_view level_id) const;
  const std::vector<PlayerAction>* solution(std::string_view level_id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, LevelSpec, std::less<>> levels_;
  std::map<std::string, std::vector<PlayerAction>, std::less<>> solutions_;
};

}  // namespace opsai::game
