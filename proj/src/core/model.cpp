// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/core/model.hpp"

#include "opsai/core/error.hpp"

namespace opsai {

std::string_view to_string(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::PlaceSemaphore: return "PlaceSemaphore";
    case ActionKind::RemoveSemaphore: return "RemoveSemaphore";
    case ActionKind::PlaceSignal: return "PlaceSignal";
    case ActionKind::RemoveSignal: return "RemoveSignal";
    case ActionKind::LinkSignal: return "LinkSignal";
    case ActionKind::UnlinkSignal: return "UnlinkSignal";
    case ActionKind::StartTest: return "StartTest";
    case ActionKind::SubmitSolution: return "SubmitSolution";
    case ActionKind::ResetBoard: return "ResetBoard";
  }
  return "ResetBoard";
}

ActionKind parse_action_kind(std::string_view text, const std::string& field) {
  for (auto kind : kAllActionKinds) {
    if (to_string(kind) == text) return kind;
  }
  throw ValidationError(field, field + ": unknown action kind '" +
                                   std::string(text) + "'");
}

bool action_needs_target(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::PlaceSemaphore:
    case ActionKind::RemoveSemaphore:
    case ActionKind::PlaceSignal:
    case ActionKind::RemoveSignal:
      return true;
    default:
      return false;
  }
}

bool action_needs_link(ActionKind kind) noexcept {
  return kind == ActionKind::LinkSignal || kind == ActionKind::UnlinkSignal;
}

bool action_mutates_board(ActionKind kind) noexcept {
  return action_needs_target(kind) || action_needs_link(kind) ||
         kind == ActionKind::ResetBoard;
}

char action_token(ActionKind kind) noexcept {
  static constexpr char kTokens[] = "PRGXLUTSB";
  return kTokens[static_cast<int>(kind)];
}

PlayerAction PlayerAction::place_semaphore(std::string edge) {
  return {ActionKind::PlaceSemaphore, std::move(edge), std::nullopt,
          std::nullopt};
}

PlayerAction PlayerAction::remove_semaphore(std::string edge) {
  return {ActionKind::RemoveSemaphore, std::move(edge), std::nullopt,
          std::nullopt};
}

PlayerAction PlayerAction::place_signal(std::string node) {
  return {ActionKind::PlaceSignal, std::move(node), std::nullopt,
          std::nullopt};
}

PlayerAction PlayerAction::remove_signal(std::string node) {
  return {ActionKind::RemoveSignal, std::move(node), std::nullopt,
          std::nullopt};
}

PlayerAction PlayerAction::link_signal(std::string node, std::string edge) {
  return {ActionKind::LinkSignal, std::nullopt,
          SignalLink{std::move(node), std::move(edge)}, std::nullopt};
}

PlayerAction PlayerAction::unlink_signal(std::string node, std::string edge) {
  return {ActionKind::UnlinkSignal, std::nullopt,
          SignalLink{std::move(node), std::move(edge)}, std::nullopt};
}

PlayerAction PlayerAction::start_test(std::uint64_t seed) {
  return {ActionKind::StartTest, std::nullopt, std::nullopt, seed};
}

PlayerAction PlayerAction::submit_solution() {
  return {ActionKind::SubmitSolution, std::nullopt, std::nullopt,
          std::nullopt};
}

PlayerAction PlayerAction::reset_board() {
  return {ActionKind::ResetBoard, std::nullopt, std::nullopt, std::nullopt};
}

std::string_view to_string(SystemEventKind kind) noexcept {
  switch (kind) {
    case SystemEventKind::TestStarted: return "TestStarted";
    case SystemEventKind::TestResult: return "TestResult";
    case SystemEventKind::Collision: return "Collision";
    case SystemEventKind::WrongExit: return "WrongExit";
    case SystemEventKind::DeadlockTimeout: return "DeadlockTimeout";
    case SystemEventKind::Delivered: return "Delivered";
    case SystemEventKind::SolutionVerified: return "SolutionVerified";
  }
  return "TestStarted";
}

SystemEventKind parse_system_event_kind(std::string_view text,
                                        const std::string& field) {
  static constexpr SystemEventKind kAll[] = {
      SystemEventKind::TestStarted,     SystemEventKind::TestResult,
      SystemEventKind::Collision,       SystemEventKind::WrongExit,
      SystemEventKind::DeadlockTimeout, SystemEventKind::Delivered,
      SystemEventKind::SolutionVerified,
  };
  for (auto kind : kAll) {
    if (to_string(kind) == text) return kind;
  }
  throw ValidationError(field, field + ": unknown system event kind '" +
                                   std::string(text) + "'");
}

bool SystemEvent::detail_matches_kind() const noexcept {
  switch (kind) {
    case SystemEventKind::TestStarted:
      return std::holds_alternative<TestStartedDetail>(detail);
    case SystemEventKind::TestResult:
      return std::holds_alternative<TestResultDetail>(detail);
    case SystemEventKind::Collision:
    case SystemEventKind::WrongExit:
      return std::holds_alternative<IncidentDetail>(detail);
    case SystemEventKind::DeadlockTimeout:
      return std::holds_alternative<TimeoutDetail>(detail);
    case SystemEventKind::Delivered:
      return std::holds_alternative<DeliveredDetail>(detail);
    case SystemEventKind::SolutionVerified:
      return std::holds_alternative<VerifiedDetail>(detail);
  }
  return false;
}

SystemEvent SystemEvent::test_started(std::uint64_t seed) {
  return {SystemEventKind::TestStarted, TestStartedDetail{seed}};
}

SystemEvent SystemEvent::test_result(std::uint64_t seed, game::Outcome outcome,
                                     std::int64_t ticks) {
  return {SystemEventKind::TestResult, TestResultDetail{seed, outcome, ticks}};
}

SystemEvent SystemEvent::collision(std::string node,
                                   std::vector<std::string> arrows,
                                   std::int64_t tick) {
  return {SystemEventKind::Collision,
          IncidentDetail{std::move(node), std::move(arrows), tick}};
}

SystemEvent SystemEvent::wrong_exit(std::string node,
                                    std::vector<std::string> arrows,
                                    std::int64_t tick) {
  return {SystemEventKind::WrongExit,
          IncidentDetail{std::move(node), std::move(arrows), tick}};
}

SystemEvent SystemEvent::deadlock_timeout(std::int64_t tick) {
  return {SystemEventKind::DeadlockTimeout, TimeoutDetail{tick}};
}

SystemEvent SystemEvent::delivered(std::string arrow, std::string node,
                                   std::int64_t tick) {
  return {SystemEventKind::Delivered,
          DeliveredDetail{std::move(arrow), std::move(node), tick}};
}

SystemEvent SystemEvent::solution_verified(std::int64_t seeds_run,
                                           std::int64_t seeds_passed) {
  return {SystemEventKind::SolutionVerified,
          VerifiedDetail{seeds_run, seeds_passed}};
}

}  // namespace opsai
