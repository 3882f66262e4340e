// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace opsai::game {

enum class Color { red, blue, yellow, purple };
enum class NodeKind { track, spawn, exit };
enum class SemaphoreState { open, closed };
enum class Phase { edit, running, terminal };
enum class Outcome { success, collision, wrong_exit, timeout };

std::string_view to_string(Color c) noexcept;
std::string_view to_string(NodeKind k) noexcept;
std::string_view to_string(SemaphoreState s) noexcept;
std::string_view to_string(Phase p) noexcept;
std::string_view to_string(Outcome o) noexcept;

// Parsers throw ValidationError naming `field` on unknown names.
Color parse_color(std::string_view text, const std::string& field);
NodeKind parse_node_kind(std::string_view text, const std::string& field);
SemaphoreState parse_semaphore_state(std::string_view text,
                                     const std::string& field);
Phase parse_phase(std::string_view text, const std::string& field);
Outcome parse_outcome(std::string_view text, const std::string& field);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::track;
  bool signal_eligible = false;
  std::optional<Color> exit_color;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  std::set<Color> colors;
  bool sem_eligible = false;

  bool operator==(const Edge&) const = default;
};

struct Spawn {
  std::int64_t tick = 0;
  std::string spawn_node;
  Color color = Color::red;
  std::string arrow_id;

  bool operator==(const Spawn&) const = default;
};

/// Per-level overrides of the simulation defaults.
struct LevelDefaults {
  std::optional<double> stall_probability;
  std::optional<std::int64_t> max_ticks;
  std::optional<std::int64_t> deadlock_window;
  std::optional<std::int64_t> verify_seeds;

  bool operator==(const LevelDefaults&) const = default;
};

/// A puzzle board: a directed graph of capacity-1 nodes with colored edges,
/// plus the schedule of arrows (threads) entering it.
///
/// Construct through `game::load_level` or `LevelSpec::build`, which check
/// every invariant and build the lookup tables used by the engine.
class LevelSpec {
 public:
  std::string level_id;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<Spawn> spawn_schedule;
  LevelDefaults defaults;

  /// Validates and indexes a level. Throws ValidationError on the first
  /// violated invariant, naming the offending element id.
  static LevelSpec build(std::string level_id, std::vector<Node> nodes,
                         std::vector<Edge> edges,
                         std::vector<Spawn> spawn_schedule,
                         LevelDefaults defaults = {});

  const Node* find_node(std::string_view id) const;
  const Edge* find_edge(std::string_view id) const;

  /// The unique outgoing edge from `node` whose colors contain `color`.
  const Edge* route(std::string_view node, Color color) const;

  bool operator==(const LevelSpec& other) const {
    return level_id == other.level_id && nodes == other.nodes &&
           edges == other.edges && spawn_schedule == other.spawn_schedule &&
           defaults == other.defaults;
  }

 private:
  void reindex();

  std::map<std::string, std::size_t, std::less<>> node_index_;
  std::map<std::string, std::size_t, std::less<>> edge_index_;
  std::map<std::pair<std::string, Color>, std::size_t> routes_;
};

struct Arrow {
  std::string arrow_id;
  Color color = Color::red;
  std::string node;
  bool delivered = false;

  bool operator==(const Arrow&) const = default;
};

/// Instantaneous game state. Containers are kept in canonical order:
/// arrows by arrow_id, pending spawns by arrow_id, maps and sets sorted.
struct BoardState {
  std::string level_id;
  std::int64_t tick = 0;
  std::vector<Arrow> arrows;
  std::map<std::string, SemaphoreState> semaphores;
  std::map<std::string, std::set<std::string>> signals;
  std::vector<Spawn> pending_spawns;
  Phase phase = Phase::edit;
  std::optional<Outcome> outcome;
  // Consecutive ticks without a spawn, move or delivery.
  std::int64_t idle_ticks = 0;

  bool operator==(const BoardState&) const = default;
};

}  // namespace opsai::game
