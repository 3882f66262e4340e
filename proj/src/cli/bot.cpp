// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/cli/bot.hpp"

#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/core/ids.hpp"
#include "opsai/game/rng.hpp"

namespace opsai::cli {

using game::BoardState;
using game::LevelSpec;
using game::SplitMix64;

void BotProfile::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError(name, std::string(name) + " must be in [0, 1]");
    }
  };
  check(competence, "competence");
  check(test_propensity, "test_propensity");
}

Json to_json(const BotProfile& p) {
  return Json{{"competence", p.competence},
              {"test_propensity", p.test_propensity},
              {"seed", p.seed}};
}

BotProfile bot_profile_from_json(const Json& j) {
  namespace jf = json_field;
  jf::expect_object(j, "profile");
  BotProfile p;
  if (auto v = jf::opt_number(j, "competence", "profile")) p.competence = *v;
  if (auto v = jf::opt_number(j, "test_propensity", "profile")) p.test_propensity = *v;
  if (auto v = jf::opt_uint64(j, "seed", "profile")) p.seed = *v;
  p.validate();
  return p;
}

namespace {

// Epoch of the synthetic corpus (2025-01-01T00:00:00Z) and its spread.
constexpr std::int64_t kEpochMs = 1735689600000;
constexpr std::uint64_t kSpreadMs = 30ULL * 24 * 3600 * 1000;

std::vector<PlayerAction> legal_edits(const LevelSpec& level, const BoardState& b) {
  std::vector<PlayerAction> out;
  for (const auto& e : level.edges) {
    if (!e.sem_eligible) continue;
    if (b.semaphores.contains(e.id)) {
      out.push_back(PlayerAction::remove_semaphore(e.id));
    } else {
      out.push_back(PlayerAction::place_semaphore(e.id));
    }
  }
  for (const auto& n : level.nodes) {
    if (!n.signal_eligible) continue;
    auto it = b.signals.find(n.id);
    if (it == b.signals.end()) {
      out.push_back(PlayerAction::place_signal(n.id));
      continue;
    }
    out.push_back(PlayerAction::remove_signal(n.id));
    for (const auto& [edge, state] : b.semaphores) {
      if (it->second.contains(edge)) {
        out.push_back(PlayerAction::unlink_signal(n.id, edge));
      } else {
        out.push_back(PlayerAction::link_signal(n.id, edge));
      }
    }
  }
  return out;
}

class Recorder {
 public:
  Recorder(const LevelSpec& level, const game::SimConfig& cfg, SplitMix64& rng,
           std::int64_t t0)
      : level_(level), cfg_(cfg), rng_(rng), t_(t0), board_(game::initial_state(level)) {}

  const BoardState& board() const { return board_; }
  std::vector<GameEvent> take() { return std::move(events_); }

  void act(const PlayerAction& a) {
    t_ += 400 + static_cast<std::int64_t>(rng_.below(4000));
    GameEvent e{next_seq(), t_, a, std::nullopt};
    if (action_mutates_board(a.kind)) {
      board_ = game::apply_action(level_, board_, a);
      e.board_hash = canonical_state_hash(board_);
    }
    events_.push_back(std::move(e));
  }

  void test() {
    auto seed = rng_.next();
    act(PlayerAction::start_test(seed));
    auto run = game::run_test(level_, board_, seed, cfg_);
    for (auto& s : run.events) system(std::move(s));
  }

  void submit() {
    act(PlayerAction::submit_solution());
    auto v = game::verify_solution(level_, board_, cfg_);
    system(SystemEvent::solution_verified(v.seeds_run, v.seeds_passed));
  }

 private:
  std::int64_t next_seq() const { return static_cast<std::int64_t>(events_.size()); }
  void system(SystemEvent s) { events_.push_back({next_seq(), t_, std::move(s), std::nullopt}); }

  const LevelSpec& level_;
  const game::SimConfig& cfg_;
  SplitMix64& rng_;
  std::int64_t t_;
  BoardState board_;
  std::vector<GameEvent> events_;
};

}  // namespace

BotSession play_bot_session(const LevelSpec& level,
                            const std::vector<PlayerAction>* solution,
                            const BotProfile& profile,
                            const std::string& player_id,
                            const game::SimConfig& cfg) {
  profile.validate();
  SplitMix64 rng{game::splitmix64(profile.seed)};
  BotSession out;
  out.header.session_id = session_id_from_words(rng.next(), rng.next());
  out.header.player_id = player_id;
  out.header.level_id = level.level_id;
  out.header.started_at = kEpochMs + static_cast<std::int64_t>(rng.below(kSpreadMs));

  const bool competent = solution != nullptr && rng.unit() < profile.competence;
  Recorder rec(level, cfg, rng, out.header.started_at);
  auto maybe_test = [&] {
    if (rng.unit() < profile.test_propensity) rec.test();
  };

  auto random_edits = competent ? rng.below(3) : 1 + rng.below(6);
  for (std::uint64_t i = 0; i < random_edits; ++i) {
    auto options = legal_edits(level, rec.board());
    if (options.empty()) break;
    rec.act(options[rng.below(options.size())]);
    maybe_test();
  }
  if (competent) {
    if (rec.board() != game::initial_state(level)) rec.act(PlayerAction::reset_board());
    for (const auto& a : *solution) {
      rec.act(a);
      maybe_test();
    }
  }
  maybe_test();
  rec.submit();
  out.events = rec.take();
  return out;
}

std::vector<std::vector<GameEvent>> batches(const std::vector<GameEvent>& events,
                                            std::size_t max_batch) {
  std::vector<std::vector<GameEvent>> out;
  for (std::size_t i = 0; i < events.size(); i += max_batch) {
    auto end = std::min(events.size(), i + max_batch);
    out.emplace_back(events.begin() + static_cast<std::ptrdiff_t>(i),
                     events.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace opsai::cli
