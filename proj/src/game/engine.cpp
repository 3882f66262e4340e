// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/game/engine.hpp"

#include <algorithm>
#include <cmath>

#include "opsai/core/error.hpp"

namespace opsai::game {
namespace {

bool by_arrow_id(const Spawn& a, const Spawn& b) {
  return a.arrow_id < b.arrow_id;
}

const std::string& require_target(const PlayerAction& action) {
  if (!action.target) {
    throw ActionRejected("", std::string(opsai::to_string(action.kind)) +
                                 " requires a target");
  }
  return *action.target;
}

const SignalLink& require_link(const PlayerAction& action) {
  if (!action.link) {
    throw ActionRejected("", std::string(opsai::to_string(action.kind)) +
                                 " requires a link");
  }
  return *action.link;
}

BoardState start_running(const BoardState& edit) {
  BoardState s = edit;
  s.tick = 0;
  s.idle_ticks = 0;
  s.arrows.clear();
  s.outcome.reset();
  s.phase = Phase::running;
  return s;
}

}  // namespace

void SimConfig::validate() const {
  if (!(stall_probability >= 0.0 && stall_probability <= 1.0)) {
    throw ValidationError("cfg.stall_p", "stall_p must lie in [0, 1]");
  }
  if (max_ticks < 1) throw ValidationError("cfg.max_ticks", "max_ticks must be >= 1");
  if (deadlock_window < 1) {
    throw ValidationError("cfg.deadlock_window", "deadlock_window must be >= 1");
  }
  if (verify_seeds < 1) {
    throw ValidationError("cfg.verify_seeds", "verify_seeds must be >= 1");
  }
}

SimConfig SimConfig::for_level(const LevelSpec& level, SimConfig base) {
  const auto& d = level.defaults;
  if (d.stall_probability) base.stall_probability = *d.stall_probability;
  if (d.max_ticks) base.max_ticks = *d.max_ticks;
  if (d.deadlock_window) base.deadlock_window = *d.deadlock_window;
  if (d.verify_seeds) base.verify_seeds = *d.verify_seeds;
  return base;
}

bool stall_draw(std::uint64_t draw, double p) noexcept {
  if (p >= 1.0) return true;
  if (!(p > 0.0)) return false;
  // p * 2^64 is exact in binary floating point and below 2^64 for p < 1.
  double scaled = std::ceil(std::ldexp(p, 64));
  return draw < static_cast<std::uint64_t>(scaled);
}

BoardState initial_state(const LevelSpec& level) {
  BoardState s;
  s.level_id = level.level_id;
  s.pending_spawns = level.spawn_schedule;
  std::sort(s.pending_spawns.begin(), s.pending_spawns.end(), by_arrow_id);
  return s;
}

BoardState apply_action(const LevelSpec& level, const BoardState& state,
                        const PlayerAction& action) {
  if (action.kind == ActionKind::ResetBoard) return initial_state(level);
  if (state.phase != Phase::edit) {
    throw ActionRejected(level.level_id, "board is not in edit phase");
  }
  BoardState s = state;
  switch (action.kind) {
    case ActionKind::PlaceSemaphore: {
      const auto& id = require_target(action);
      const Edge* e = level.find_edge(id);
      if (e == nullptr) throw ActionRejected(id, "unknown edge '" + id + "'");
      if (!e->sem_eligible) {
        throw ActionRejected(id, "edge '" + id + "' cannot hold a semaphore");
      }
      if (!s.semaphores.emplace(id, SemaphoreState::closed).second) {
        throw ActionRejected(id, "edge '" + id + "' already has a semaphore");
      }
      break;
    }
    case ActionKind::RemoveSemaphore: {
      const auto& id = require_target(action);
      if (s.semaphores.erase(id) == 0) {
        throw ActionRejected(id, "no semaphore on edge '" + id + "'");
      }
      for (auto& [node, links] : s.signals) links.erase(id);
      break;
    }
    case ActionKind::PlaceSignal: {
      const auto& id = require_target(action);
      const Node* n = level.find_node(id);
      if (n == nullptr) throw ActionRejected(id, "unknown node '" + id + "'");
      if (!n->signal_eligible) {
        throw ActionRejected(id, "node '" + id + "' cannot hold a signal");
      }
      if (!s.signals.emplace(id, std::set<std::string>{}).second) {
        throw ActionRejected(id, "node '" + id + "' already has a signal");
      }
      break;
    }
    case ActionKind::RemoveSignal: {
      const auto& id = require_target(action);
      if (s.signals.erase(id) == 0) {
        throw ActionRejected(id, "no signal on node '" + id + "'");
      }
      break;
    }
    case ActionKind::LinkSignal: {
      const auto& link = require_link(action);
      auto sig = s.signals.find(link.signal_node);
      if (sig == s.signals.end()) {
        throw ActionRejected(link.signal_node,
                             "no signal on node '" + link.signal_node + "'");
      }
      if (!s.semaphores.contains(link.semaphore_edge)) {
        throw ActionRejected(link.semaphore_edge, "no semaphore on edge '" +
                                                      link.semaphore_edge + "'");
      }
      if (!sig->second.insert(link.semaphore_edge).second) {
        throw ActionRejected(link.signal_node,
                             "signal '" + link.signal_node +
                                 "' is already linked to '" +
                                 link.semaphore_edge + "'");
      }
      break;
    }
    case ActionKind::UnlinkSignal: {
      const auto& link = require_link(action);
      auto sig = s.signals.find(link.signal_node);
      if (sig == s.signals.end() ||
          sig->second.erase(link.semaphore_edge) == 0) {
        throw ActionRejected(link.signal_node,
                             "no link from '" + link.signal_node + "' to '" +
                                 link.semaphore_edge + "'");
      }
      break;
    }
    case ActionKind::StartTest:
    case ActionKind::SubmitSolution:
      return start_running(s);
    case ActionKind::ResetBoard:
      break;
  }
  return s;
}

BoardState board_from_placements(
    const LevelSpec& level, const std::vector<std::string>& semaphores,
    const std::map<std::string, std::vector<std::string>>& signals) {
  BoardState s = initial_state(level);
  for (const auto& e : semaphores) {
    s = apply_action(level, s, PlayerAction::place_semaphore(e));
  }
  for (const auto& [node, links] : signals) {
    s = apply_action(level, s, PlayerAction::place_signal(node));
    for (const auto& e : links) {
      s = apply_action(level, s, PlayerAction::link_signal(node, e));
    }
  }
  return s;
}

std::vector<std::string> stall_candidates(const BoardState& state) {
  std::vector<std::string> ids;
  for (const auto& a : state.arrows) {
    if (!a.delivered) ids.push_back(a.arrow_id);
  }
  for (const auto& p : state.pending_spawns) ids.push_back(p.arrow_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

StepOutput step_with_stalls(const LevelSpec& level, const BoardState& state,
                            const std::set<std::string>& stalled,
                            const SimConfig& cfg) {
  StepOutput out{state, {}, {}};
  BoardState& s = out.state;
  if (s.phase != Phase::running) return out;
  const std::int64_t tick = s.tick;

  std::map<std::string, std::size_t> occupied;  // node -> arrow index
  for (std::size_t i = 0; i < s.arrows.size(); ++i) {
    if (!s.arrows[i].delivered) occupied[s.arrows[i].node] = i;
  }

  // Spawns due this tick (or deferred from earlier), ascending arrow_id.
  bool progress = false;
  std::vector<Spawn> still_pending;
  for (const auto& sp : s.pending_spawns) {
    if (sp.tick <= tick && !occupied.contains(sp.spawn_node)) {
      s.arrows.push_back(Arrow{sp.arrow_id, sp.color, sp.spawn_node, false});
      progress = true;
      occupied[sp.spawn_node] = s.arrows.size() - 1;
    } else {
      still_pending.push_back(sp);
    }
  }
  s.pending_spawns = std::move(still_pending);
  std::sort(s.arrows.begin(), s.arrows.end(),
            [](const Arrow& a, const Arrow& b) { return a.arrow_id < b.arrow_id; });
  occupied.clear();
  for (std::size_t i = 0; i < s.arrows.size(); ++i) {
    if (!s.arrows[i].delivered) occupied[s.arrows[i].node] = i;
  }

  struct Intent {
    std::size_t arrow;
    std::string from;
    std::string to;
  };
  std::vector<Intent> intents;
  for (std::size_t i = 0; i < s.arrows.size(); ++i) {
    const Arrow& a = s.arrows[i];
    if (a.delivered || stalled.contains(a.arrow_id)) continue;
    const Edge* e = level.route(a.node, a.color);
    if (e == nullptr) continue;
    auto sem = s.semaphores.find(e->id);
    if (sem != s.semaphores.end() && sem->second == SemaphoreState::closed) {
      continue;
    }
    // Moves never chain into nodes vacated during the same tick.
    if (occupied.contains(e->to)) continue;
    intents.push_back({i, a.node, e->to});
  }

  std::map<std::string, std::vector<std::string>> by_target;
  for (const auto& in : intents) {
    by_target[in.to].push_back(s.arrows[in.arrow].arrow_id);
  }
  bool collided = false;
  for (auto& [node, arrows] : by_target) {
    if (arrows.size() >= 2) {
      std::sort(arrows.begin(), arrows.end());
      out.events.push_back(SystemEvent::collision(node, arrows, tick));
      collided = true;
    }
  }
  for (std::size_t i = 0; i < intents.size(); ++i) {
    for (std::size_t j = i + 1; j < intents.size(); ++j) {
      if (intents[i].from == intents[j].to && intents[i].to == intents[j].from) {
        std::vector<std::string> ids{s.arrows[intents[i].arrow].arrow_id,
                                     s.arrows[intents[j].arrow].arrow_id};
        std::sort(ids.begin(), ids.end());
        out.events.push_back(SystemEvent::collision(
            std::min(intents[i].to, intents[j].to), ids, tick));
        collided = true;
      }
    }
  }
  if (collided) {
    s.phase = Phase::terminal;
    s.outcome = Outcome::collision;
    return out;
  }

  std::set<std::string> entered;
  bool wrong_exit = false;
  for (const auto& in : intents) {
    Arrow& a = s.arrows[in.arrow];
    a.node = in.to;
    entered.insert(in.to);
    progress = true;
    const Node* target = level.find_node(in.to);
    if (target != nullptr && target->kind == NodeKind::exit) {
      if (target->exit_color == a.color) {
        a.delivered = true;
        out.events.push_back(SystemEvent::delivered(a.arrow_id, in.to, tick));
      } else {
        out.events.push_back(
            SystemEvent::wrong_exit(in.to, {a.arrow_id}, tick));
        wrong_exit = true;
      }
    }
  }
  if (wrong_exit) {
    s.phase = Phase::terminal;
    s.outcome = Outcome::wrong_exit;
    return out;
  }

  // std::map and std::set iterate in ascending node id, then edge id.
  for (const auto& [node, links] : s.signals) {
    if (!entered.contains(node)) continue;
    for (const auto& edge : links) {
      auto sem = s.semaphores.find(edge);
      if (sem == s.semaphores.end()) continue;
      sem->second = sem->second == SemaphoreState::open ? SemaphoreState::closed
                                                        : SemaphoreState::open;
    }
  }

  bool all_delivered =
      s.pending_spawns.empty() &&
      std::all_of(s.arrows.begin(), s.arrows.end(),
                  [](const Arrow& a) { return a.delivered; });
  if (all_delivered) {
    s.phase = Phase::terminal;
    s.outcome = Outcome::success;
    return out;
  }

  // Waiting for a future spawn is not idling.
  bool spawn_ahead = std::any_of(
      s.pending_spawns.begin(), s.pending_spawns.end(),
      [tick](const Spawn& sp) { return sp.tick > tick; });
  if (progress || spawn_ahead) {
    s.idle_ticks = 0;
  } else {
    ++s.idle_ticks;
  }
  if (s.idle_ticks >= cfg.deadlock_window) {
    out.events.push_back(SystemEvent::deadlock_timeout(tick));
    s.phase = Phase::terminal;
    s.outcome = Outcome::timeout;
    return out;
  }
  s.tick = tick + 1;
  return out;
}

StepOutput step(const LevelSpec& level, const BoardState& state,
                SplitMix64 rng, const SimConfig& cfg) {
  std::set<std::string> stalled;
  if (state.phase == Phase::running) {
    for (const auto& id : stall_candidates(state)) {
      if (stall_draw(rng.next(), cfg.stall_probability)) stalled.insert(id);
    }
  }
  StepOutput out = step_with_stalls(level, state, stalled, cfg);
  out.rng = rng;
  return out;
}

RunResult run_test(const LevelSpec& level, const BoardState& placements,
                   std::uint64_t seed, const SimConfig& cfg) {
  if (placements.phase != Phase::edit) {
    throw ActionRejected(level.level_id, "placements must be in edit phase");
  }
  RunResult result;
  result.events.push_back(SystemEvent::test_started(seed));
  BoardState s = start_running(placements);
  SplitMix64 rng{splitmix64(seed)};
  while (s.phase == Phase::running) {
    StepOutput out = step(level, s, rng, cfg);
    s = std::move(out.state);
    rng = out.rng;
    for (auto& e : out.events) result.events.push_back(std::move(e));
    if (s.phase == Phase::running && s.tick >= cfg.max_ticks) {
      result.events.push_back(SystemEvent::deadlock_timeout(s.tick));
      s.phase = Phase::terminal;
      s.outcome = Outcome::timeout;
    }
  }
  result.outcome = *s.outcome;
  result.ticks = s.tick;
  result.events.push_back(
      SystemEvent::test_result(seed, result.outcome, result.ticks));
  result.final_state = std::move(s);
  return result;
}

VerifyResult verify_solution(const LevelSpec& level,
                             const BoardState& placements,
                             const SimConfig& cfg) {
  VerifyResult v;
  for (std::int64_t i = 0; i < cfg.verify_seeds; ++i) {
    std::uint64_t seed = splitmix64(cfg.base_seed + static_cast<std::uint64_t>(i));
    RunResult r = run_test(level, placements, seed, cfg);
    ++v.seeds_run;
    if (r.outcome == Outcome::success) ++v.seeds_passed;
    v.per_seed.push_back({seed, r.outcome, r.ticks});
  }
  return v;
}

}  // namespace opsai::game
