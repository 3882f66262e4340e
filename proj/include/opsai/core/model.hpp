// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opsai/game/board.hpp"

namespace opsai {

inline constexpr int kSchemaVersion = 1;

enum class ActionKind {
  PlaceSemaphore,
  RemoveSemaphore,
  PlaceSignal,
  RemoveSignal,
  LinkSignal,
  UnlinkSignal,
  StartTest,
  SubmitSolution,
  ResetBoard,
};

inline constexpr std::array<ActionKind, 9> kAllActionKinds = {
    ActionKind::PlaceSemaphore, ActionKind::RemoveSemaphore,
    ActionKind::PlaceSignal,    ActionKind::RemoveSignal,
    ActionKind::LinkSignal,     ActionKind::UnlinkSignal,
    ActionKind::StartTest,      ActionKind::SubmitSolution,
    ActionKind::ResetBoard,
};

std::string_view to_string(ActionKind kind) noexcept;
ActionKind parse_action_kind(std::string_view text, const std::string& field);

/// Kinds whose target is a semaphore edge or a signal node.
bool action_needs_target(ActionKind kind) noexcept;
bool action_needs_link(ActionKind kind) noexcept;
/// Kinds that change the edit board and therefore get a snapshot.
bool action_mutates_board(ActionKind kind) noexcept;
/// Single-letter symbol per kind, in declaration order: P R G X L U T S B.
char action_token(ActionKind kind) noexcept;

struct SignalLink {
  std::string signal_node;
  std::string semaphore_edge;

  auto operator<=>(const SignalLink&) const = default;
};

struct PlayerAction {
  ActionKind kind = ActionKind::ResetBoard;
  std::optional<std::string> target;
  std::optional<SignalLink> link;
  std::optional<std::uint64_t> seed;

  bool operator==(const PlayerAction&) const = default;

  static PlayerAction place_semaphore(std::string edge);
  static PlayerAction remove_semaphore(std::string edge);
  static PlayerAction place_signal(std::string node);
  static PlayerAction remove_signal(std::string node);
  static PlayerAction link_signal(std::string node, std::string edge);
  static PlayerAction unlink_signal(std::string node, std::string edge);
  static PlayerAction start_test(std::uint64_t seed);
  static PlayerAction submit_solution();
  static PlayerAction reset_board();
};

enum class SystemEventKind {
  TestStarted,
  TestResult,
  Collision,
  WrongExit,
  DeadlockTimeout,
  Delivered,
  SolutionVerified,
};

std::string_view to_string(SystemEventKind kind) noexcept;
SystemEventKind parse_system_event_kind(std::string_view text,
                                        const std::string& field);

struct TestStartedDetail {
  std::uint64_t seed = 0;
  bool operator==(const TestStartedDetail&) const = default;
};

struct TestResultDetail {
  std::uint64_t seed = 0;
  game::Outcome outcome = game::Outcome::success;
  std::int64_t ticks = 0;
  bool operator==(const TestResultDetail&) const = default;
};

// Shared by Collision and WrongExit.
struct IncidentDetail {
  std::string node_id;
  std::vector<std::string> arrow_ids;
  std::int64_t tick = 0;
  bool operator==(const IncidentDetail&) const = default;
};

struct TimeoutDetail {
  std::int64_t tick = 0;
  bool operator==(const TimeoutDetail&) const = default;
};

struct DeliveredDetail {
  std::string arrow_id;
  std::string node_id;
  std::int64_t tick = 0;
  bool operator==(const DeliveredDetail&) const = default;
};

struct VerifiedDetail {
  std::int64_t seeds_run = 0;
  std::int64_t seeds_passed = 0;
  bool operator==(const VerifiedDetail&) const = default;
};

using SystemEventDetail =
    std::variant<TestStartedDetail, TestResultDetail, IncidentDetail,
                 TimeoutDetail, DeliveredDetail, VerifiedDetail>;

struct SystemEvent {
  SystemEventKind kind = SystemEventKind::TestStarted;
  SystemEventDetail detail;

  bool operator==(const SystemEvent&) const = default;

  /// True when the detail alternative is the one `kind` requires.
  bool detail_matches_kind() const noexcept;

  static SystemEvent test_started(std::uint64_t seed);
  static SystemEvent test_result(std::uint64_t seed, game::Outcome outcome,
                                 std::int64_t ticks);
  static SystemEvent collision(std::string node, std::vector<std::string> arrows,
                               std::int64_t tick);
  static SystemEvent wrong_exit(std::string node,
                                std::vector<std::string> arrows,
                                std::int64_t tick);
  static SystemEvent deadlock_timeout(std::int64_t tick);
  static SystemEvent delivered(std::string arrow, std::string node,
                               std::int64_t tick);
  static SystemEvent solution_verified(std::int64_t seeds_run,
                                       std::int64_t seeds_passed);
};

using EventBody = std::variant<PlayerAction, SystemEvent>;

struct GameEvent {
  std::int64_t seq = 0;
  std::int64_t t_ms = 0;
  EventBody body;
  // Client-reported hash of the edit board after a board-mutating action.
  // Checked against the engine's replay at finalization.
  std::optional<std::uint64_t> board_hash;

  bool operator==(const GameEvent&) const = default;

  const PlayerAction* action() const noexcept {
    return std::get_if<PlayerAction>(&body);
  }
  const SystemEvent* system() const noexcept {
    return std::get_if<SystemEvent>(&body);
  }
};

struct BoardSnapshot {
  std::int64_t at_seq = 0;
  std::uint64_t state_hash = 0;
  game::BoardState state;

  bool operator==(const BoardSnapshot&) const = default;
};

struct Enrichment {
  std::string name;
  std::string media_type;
  std::string bytes;  // raw; base64 on the wire

  bool operator==(const Enrichment&) const = default;
};

struct SessionHeader {
  std::string session_id;
  std::string player_id;
  std::string level_id;
  std::int64_t started_at = 0;
  int schema_version = kSchemaVersion;

  bool operator==(const SessionHeader&) const = default;
};

struct DerivedMetrics {
  std::int64_t action_count = 0;
  std::map<ActionKind, std::int64_t> action_counts_by_kind;
  std::int64_t test_run_count = 0;
  std::optional<std::int64_t> first_test_seq;
  bool solved = false;
  std::int64_t duration_ms = 0;
  std::int64_t board_state_trajectory_len = 0;
  std::set<std::string> final_placements;

  bool operator==(const DerivedMetrics&) const = default;

  std::int64_t count(ActionKind kind) const {
    auto it = action_counts_by_kind.find(kind);
    return it == action_counts_by_kind.end() ? 0 : it->second;
  }
};

/// Enrichment written by finalization under the `derived` key.
struct DerivedSection {
  DerivedMetrics metrics;
  std::uint64_t trace_signature = 0;
  bool replay_verified = false;

  bool operator==(const DerivedSection&) const = default;
};

struct SessionLog {
  SessionHeader header;
  std::vector<GameEvent> events;
  std::vector<BoardSnapshot> snapshots;
  std::vector<Enrichment> enrichments;
  bool finalized = false;
  std::optional<DerivedSection> derived;

  bool operator==(const SessionLog&) const = default;
};

}  // namespace opsai
