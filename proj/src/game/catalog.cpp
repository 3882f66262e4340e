// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/game/catalog.hpp"

#include <fstream>
#include <sstream>

#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/game/level.hpp"

namespace opsai::game {
namespace {

constexpr std::string_view kSolutionSuffix = ".solution.json";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<PlayerAction> load_solution(std::string_view text) {
  Json j = parse_json(text);
  const Json& actions = json_field::require(j, "actions", "");
  json_field::expect_array(actions, "actions");
  std::vector<PlayerAction> out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out.push_back(
        action_from_json(actions[i], "actions[" + std::to_string(i) + "]"));
  }
  return out;
}

LevelCatalog::LevelCatalog(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot open level directory " + dir.string());
  std::map<std::string, std::vector<PlayerAction>> scripts;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    auto name = entry.path().filename().string();
    if (name.size() > kSolutionSuffix.size() &&
        name.ends_with(kSolutionSuffix)) {
      auto id = name.substr(0, name.size() - kSolutionSuffix.size());
      scripts[id] = load_solution(read_file(entry.path()));
    } else if (entry.path().extension() == ".json") {
      LevelSpec level = load_level(read_file(entry.path()));
      auto id = level.level_id;
      levels_.emplace(std::move(id), std::move(level));
    }
  }
  for (auto& [id, actions] : scripts) {
    if (levels_.contains(id)) solutions_[id] = std::move(actions);
  }
}

void LevelCatalog::add(LevelSpec level,
                       std::optional<std::vector<PlayerAction>> solution) {
  auto id = level.level_id;
  if (solution) solutions_[id] = std::move(*solution);
  levels_.insert_or_assign(std::move(id), std::move(level));
}

const LevelSpec& LevelCatalog::get(std::string_view level_id) const {
  const LevelSpec* l = find(level_id);
  if (l == nullptr) {
    throw NotFoundError("unknown level '" + std::string(level_id) + "'");
  }
  return *l;
}

const LevelSpec* LevelCatalog::find(std::string_view level_id) const {
  auto it = levels_.find(level_id);
  return it == levels_.end() ? nullptr : &it->second;
}

const std::vector<PlayerAction>* LevelCatalog::solution(
    std::string_view level_id) const {
  auto it = solutions_.find(level_id);
  return it == solutions_.end() ? nullptr : &it->second;
}

std::vector<std::string> LevelCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : levels_) out.push_back(id);
  return out;
}

}  // namespace opsai::game
