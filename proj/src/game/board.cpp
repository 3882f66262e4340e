// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/game/board.hpp"

#include "opsai/core/error.hpp"
#include "opsai/game/level.hpp"

namespace opsai::game {
namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::string& field,
             const E (&values)[N], const char* what) {
  for (auto v : values) {
    if (to_string(v) == text) return v;
  }
  throw ValidationError(field, field + ": unknown " + what + " '" +
                                   std::string(text) + "'");
}

}  // namespace

std::string_view to_string(Color c) noexcept {
  switch (c) {
    case Color::red: return "red";
    case Color::blue: return "blue";
    case Color::yellow: return "yellow";
    case Color::purple: return "purple";
  }
  return "red";
}

std::string_view to_string(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::track: return "track";
    case NodeKind::spawn: return "spawn";
    case NodeKind::exit: return "exit";
  }
  return "track";
}

std::string_view to_string(SemaphoreState s) noexcept {
  return s == SemaphoreState::open ? "open" : "closed";
}

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::edit: return "edit";
    case Phase::running: return "running";
    case Phase::terminal: return "terminal";
  }
  return "edit";
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::success: return "success";
    case Outcome::collision: return "collision";
    case Outcome::wrong_exit: return "wrong_exit";
    case Outcome::timeout: return "timeout";
  }
  return "success";
}

Color parse_color(std::string_view text, const std::string& field) {
  static constexpr Color kAll[] = {Color::red, Color::blue, Color::yellow,
                                   Color::purple};
  return parse_enum(text, field, kAll, "color");
}

NodeKind parse_node_kind(std::string_view text, const std::string& field) {
  static constexpr NodeKind kAll[] = {NodeKind::track, NodeKind::spawn,
                                      NodeKind::exit};
  return parse_enum(text, field, kAll, "node kind");
}

SemaphoreState parse_semaphore_state(std::string_view text,
                                     const std::string& field) {
  static constexpr SemaphoreState kAll[] = {SemaphoreState::open,
                                            SemaphoreState::closed};
  return parse_enum(text, field, kAll, "semaphore state");
}

Phase parse_phase(std::string_view text, const std::string& field) {
  static constexpr Phase kAll[] = {Phase::edit, Phase::running,
                                   Phase::terminal};
  return parse_enum(text, field, kAll, "phase");
}

Outcome parse_outcome(std::string_view text, const std::string& field) {
  static constexpr Outcome kAll[] = {Outcome::success, Outcome::collision,
                                     Outcome::wrong_exit, Outcome::timeout};
  return parse_enum(text, field, kAll, "outcome");
}

LevelSpec LevelSpec::build(std::string level_id, std::vector<Node> nodes,
                           std::vector<Edge> edges,
                           std::vector<Spawn> spawn_schedule,
                           LevelDefaults defaults) {
  LevelSpec level;
  level.level_id = std::move(level_id);
  level.nodes = std::move(nodes);
  level.edges = std::move(edges);
  level.spawn_schedule = std::move(spawn_schedule);
  level.defaults = defaults;
  auto findings = check_level(level);
  if (!findings.empty()) {
    throw ValidationError(findings.front().element, findings.front().message);
  }
  level.reindex();
  return level;
}

void LevelSpec::reindex() {
  node_index_.clear();
  edge_index_.clear();
  routes_.clear();
  for (std::size_t i = 0; i < nodes.size(); ++i) node_index_[nodes[i].id] = i;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edge_index_[edges[i].id] = i;
    for (auto c : edges[i].colors) routes_[{edges[i].from, c}] = i;
  }
}

const Node* LevelSpec::find_node(std::string_view id) const {
  auto it = node_index_.find(id);
  return it == node_index_.end() ? nullptr : &nodes[it->second];
}

const Edge* LevelSpec::find_edge(std::string_view id) const {
  auto it = edge_index_.find(id);
  return it == edge_index_.end() ? nullptr : &edges[it->second];
}

const Edge* LevelSpec::route(std::string_view node, Color color) const {
  auto it = routes_.find({std::string(node), color});
  return it == routes_.end() ? nullptr : &edges[it->second];
}

}  // namespace opsai::game
