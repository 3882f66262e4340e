// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "doctest.h"

#include "../support/files.hpp"
#include "../support/interleavings.hpp"
#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/game/catalog.hpp"
#include "opsai/game/engine.hpp"
#include "opsai/game/level.hpp"
#include "opsai/game/replay.hpp"

using namespace opsai;
using namespace opsai::game;
using opsai::testing::fixtures_dir;
using opsai::testing::levels_dir;
using opsai::testing::read_file;

namespace {

LevelSpec fixture(const std::string& id) {
  return load_level(read_file(levels_dir() / (id + ".json")));
}

SimConfig p(double stall) {
  SimConfig cfg;
  cfg.stall_probability = stall;
  return cfg;
}

BoardState with_solution(const LevelSpec& level) {
  LevelCatalog catalog(levels_dir());
  BoardState s = initial_state(level);
  for (const auto& a : *catalog.solution(level.level_id)) {
    s = apply_action(level, s, a);
  }
  return s;
}

std::map<std::string, int> count_kinds(const std::vector<SystemEvent>& events) {
  std::map<std::string, int> out;
  for (const auto& e : events) ++out[std::string(opsai::to_string(e.kind))];
  return out;
}

}  // namespace

TEST_CASE("splitmix64 reference values") {
  // First outputs of the reference generator seeded with 0.
  SplitMix64 rng{0};
  CHECK(rng.next() == 0xe220a8397b1dcdafULL);
  CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("stall draw threshold") {
  CHECK(stall_draw(0, 0.25));
  CHECK(stall_draw((1ULL << 62) - 1, 0.25));
  CHECK_FALSE(stall_draw(1ULL << 62, 0.25));
  CHECK_FALSE(stall_draw(0, 0.0));
  CHECK(stall_draw(~0ULL, 1.0));
  CHECK(stall_draw(0, 1e-30));
  CHECK_FALSE(stall_draw(1, 1e-30));
}

TEST_CASE("load_level") {
  SUBCASE("straightline fixture") {
    auto level = fixture("straightline");
    CHECK(level.nodes.size() == 4);
    CHECK(level.edges.size() == 3);
    CHECK(level.route("s", Color::red)->id == "e1");
    CHECK(level.route("s", Color::blue) == nullptr);
    CHECK(level_from_json(level_to_json(level)) == level);
  }

  SUBCASE("ambiguous routing") {
    try {
      load_level(read_file(fixtures_dir() / "ambiguous.json"));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("ambiguous routing") != std::string::npos);
      CHECK(e.field() == "s");
    }
  }

  SUBCASE("unreachable color") {
    CHECK_THROWS_WITH_AS(
        load_level(read_file(fixtures_dir() / "unreachable.json")),
        doctest::Contains("unreachable color"), ValidationError);
  }

  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(load_level("{\"level_id\": "), ParseError);
    auto findings = validate_level_text("[1, 2");
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].element.rfind("byte ", 0) == 0);
  }

  SUBCASE("every problem is listed") {
    auto text = R"({"level_id":"bad","nodes":[{"id":"s","kind":"spawn"},
      {"id":"s","kind":"track"},{"id":"x","kind":"exit"}],
      "edges":[{"id":"e1","from":"s","to":"zz","colors":["red"]}],
      "spawn_schedule":[{"tick":0,"spawn_node":"x","color":"red","arrow_id":"r"}]})";
    auto findings = validate_level_text(text);
    // duplicate node, exit without color, unknown endpoint, non-spawn spawn
    CHECK(findings.size() == 4);
  }

  SUBCASE("all fixtures are valid") {
    for (auto id : {"straightline", "merge", "critical_section"}) {
      CHECK(validate_level_text(read_file(levels_dir() / (std::string(id) + ".json")))
                .empty());
    }
  }
}

TEST_CASE("apply_action") {
  auto level = fixture("straightline");
  auto s0 = initial_state(level);

  auto s1 = apply_action(level, s0, PlayerAction::place_semaphore("e1"));
  CHECK(s1.semaphores.at("e1") == SemaphoreState::closed);
  CHECK(s0.semaphores.empty());

  SUBCASE("ineligible targets name the element") {
    try {
      apply_action(level, s0, PlayerAction::place_semaphore("e3"));
      FAIL("expected rejection");
    } catch (const ActionRejected& e) {
      CHECK(e.element() == "e3");
    }
    CHECK_THROWS_AS(apply_action(level, s0, PlayerAction::place_signal("s")),
                    ActionRejected);
    CHECK_THROWS_AS(apply_action(level, s0, PlayerAction::place_signal("nope")),
                    ActionRejected);
  }

  SUBCASE("duplicates and missing elements") {
    CHECK_THROWS_AS(apply_action(level, s1, PlayerAction::place_semaphore("e1")),
                    ActionRejected);
    CHECK_THROWS_AS(apply_action(level, s0, PlayerAction::remove_semaphore("e1")),
                    ActionRejected);
    CHECK_THROWS_AS(apply_action(level, s0, PlayerAction::remove_signal("a")),
                    ActionRejected);
    CHECK_THROWS_AS(apply_action(level, s1, PlayerAction::link_signal("a", "e1")),
                    ActionRejected);
  }

  SUBCASE("link then unlink is the identity") {
    auto s2 = apply_action(level, s1, PlayerAction::place_signal("a"));
    auto s3 = apply_action(level, s2, PlayerAction::link_signal("a", "e1"));
    CHECK(s3.signals.at("a").contains("e1"));
    CHECK_THROWS_AS(apply_action(level, s3, PlayerAction::link_signal("a", "e1")),
                    ActionRejected);
    CHECK(apply_action(level, s3, PlayerAction::unlink_signal("a", "e1")) == s2);
    CHECK_THROWS_AS(apply_action(level, s2, PlayerAction::unlink_signal("a", "e1")),
                    ActionRejected);

    auto removed = apply_action(level, s3, PlayerAction::remove_semaphore("e1"));
    CHECK(removed.signals.at("a").empty());
  }

  SUBCASE("phases") {
    auto running = apply_action(level, s1, PlayerAction::start_test(5));
    CHECK(running.phase == Phase::running);
    CHECK(running.semaphores == s1.semaphores);
    CHECK_THROWS_AS(apply_action(level, running, PlayerAction::place_semaphore("e2")),
                    ActionRejected);
    CHECK(apply_action(level, running, PlayerAction::reset_board()) == s0);
    CHECK(apply_action(level, s1, PlayerAction::reset_board()) == s0);
    CHECK(apply_action(level, s1, PlayerAction::submit_solution()).phase ==
          Phase::running);
  }
}

TEST_CASE("tick procedure on the fixtures") {
  SUBCASE("straightline, p=0: delivered at tick 2") {
    auto level = fixture("straightline");
    auto r = run_test(level, initial_state(level), 99, p(0.0));
    CHECK(r.outcome == Outcome::success);
    CHECK(r.ticks == 2);
    REQUIRE(r.events.size() == 3);
    CHECK(r.events[0] == SystemEvent::test_started(99));
    CHECK(r.events[1] == SystemEvent::delivered("r1", "x", 2));
    CHECK(r.events[2] == SystemEvent::test_result(99, Outcome::success, 2));
    CHECK(r.final_state.phase == Phase::terminal);
  }

  SUBCASE("straightline step by step") {
    auto level = fixture("straightline");
    auto s = apply_action(level, initial_state(level), PlayerAction::start_test(0));
    auto out = step_with_stalls(level, s, {}, p(0.0));
    REQUIRE(out.state.arrows.size() == 1);
    CHECK(out.state.arrows[0].node == "a");
    CHECK(out.state.tick == 1);
    out = step_with_stalls(level, out.state, {}, p(0.0));
    CHECK(out.state.arrows[0].node == "b");
    out = step_with_stalls(level, out.state, {}, p(0.0));
    CHECK(out.state.arrows[0].delivered);
    CHECK(out.state.outcome == Outcome::success);
  }

  SUBCASE("p=1: nothing moves, timeout at tick D") {
    auto level = fixture("straightline");
    auto r = run_test(level, initial_state(level), 3, p(1.0));
    CHECK(r.outcome == Outcome::timeout);
    CHECK(r.ticks == 50);
    CHECK(r.final_state.arrows.at(0).node == "s");
  }

  SUBCASE("merge, p=0, no coordination: collision at m on tick 0") {
    auto level = fixture("merge");
    auto r = run_test(level, initial_state(level), 1, p(0.0));
    CHECK(r.outcome == Outcome::collision);
    CHECK(r.ticks == 0);
    CHECK(r.events[1] == SystemEvent::collision("m", {"a1", "b1"}, 0));
  }

  SUBCASE("merge with a bare closed semaphore: B waits until timeout") {
    auto level = fixture("merge");
    auto placed = board_from_placements(level, {"eb"}, {});
    auto r = run_test(level, placed, 1, p(0.0));
    // a1 is delivered at tick 2; ticks 3..52 are idle.
    CHECK(r.outcome == Outcome::timeout);
    CHECK(r.ticks == 52);
    CHECK(count_kinds(r.events)["Delivered"] == 1);
  }

  SUBCASE("merge with the signal downstream of A: B released") {
    auto level = fixture("merge");
    auto placed = board_from_placements(level, {"eb"}, {{"ra", {"eb"}}});
    auto r = run_test(level, placed, 1, p(0.0));
    CHECK(r.outcome == Outcome::success);
    CHECK(r.ticks == 4);
    CHECK(r.final_state.semaphores.at("eb") == SemaphoreState::open);
  }

  SUBCASE("wrong exit") {
    // Blue is not scheduled, so its route into the red exit is legal.
    auto level = LevelSpec::build(
        "wx",
        {{"s", NodeKind::spawn, false, {}}, {"x", NodeKind::exit, false, Color::red}},
        {{"e1", "s", "x", {Color::red, Color::blue}, false}},
        {{0, "s", Color::red, "r1"}});
    auto s = apply_action(level, initial_state(level), PlayerAction::start_test(0));
    s.pending_spawns.clear();
    s.arrows = {{"z1", Color::blue, "s", false}};
    auto out = step_with_stalls(level, s, {}, p(0.0));
    CHECK(out.state.outcome == Outcome::wrong_exit);
    REQUIRE(out.events.size() == 1);
    CHECK(out.events[0] == SystemEvent::wrong_exit("x", {"z1"}, 0));
  }

  SUBCASE("blocked spawn is deferred") {
    auto level = fixture("critical_section");
    auto placed = board_from_placements(level, {"eb0"}, {});
    auto s = apply_action(level, placed, PlayerAction::start_test(0));
    for (int i = 0; i < 3; ++i) s = step_with_stalls(level, s, {}, p(0.0)).state;
    // blue1 is held at sb by the closed semaphore, so blue2 cannot spawn.
    CHECK(s.tick == 3);
    REQUIRE(s.pending_spawns.size() == 1);
    CHECK(s.pending_spawns[0].arrow_id == "blue2");
  }
}

TEST_CASE("determinism, occupancy and conservation") {
  for (auto id : {"straightline", "merge", "critical_section"}) {
    auto level = fixture(id);
    const auto total = level.spawn_schedule.size();
    SplitMix64 picker{7};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      // Random legal placements.
      BoardState placed = initial_state(level);
      for (int k = 0; k < 6; ++k) {
        PlayerAction a;
        switch (picker.below(3)) {
          case 0:
            a = PlayerAction::place_semaphore(
                level.edges[picker.below(level.edges.size())].id);
            break;
          case 1:
            a = PlayerAction::place_signal(
                level.nodes[picker.below(level.nodes.size())].id);
            break;
          default:
            if (placed.signals.empty() || placed.semaphores.empty()) continue;
            a = PlayerAction::link_signal(placed.signals.begin()->first,
                                          placed.semaphores.rbegin()->first);
        }
        try {
          placed = apply_action(level, placed, a);
        } catch (const ActionRejected&) {
        }
      }
      auto cfg = p(0.25);
      auto r1 = run_test(level, placed, seed, cfg);
      auto r2 = run_test(level, placed, seed, cfg);
      REQUIRE(r1 == r2);

      auto s = apply_action(level, placed, PlayerAction::start_test(seed));
      SplitMix64 rng{splitmix64(seed)};
      while (s.phase == Phase::running && s.tick < cfg.max_ticks) {
        auto out = step(level, s, rng, cfg);
        s = out.state;
        rng = out.rng;
        std::set<std::string> nodes;
        std::size_t on_board = 0, delivered = 0;
        for (const auto& a : s.arrows) {
          if (a.delivered) {
            ++delivered;
          } else {
            ++on_board;
            REQUIRE(nodes.insert(a.node).second);
          }
        }
        REQUIRE(delivered + on_board + s.pending_spawns.size() == total);
      }
      CHECK(s.outcome == r1.outcome);
      CHECK(s.tick == r1.ticks);
    }
  }
}

TEST_CASE("verify_solution") {
  auto cfg = p(0.25);

  SUBCASE("straightline passes every seed") {
    auto level = fixture("straightline");
    auto v = verify_solution(level, initial_state(level), cfg);
    CHECK(v.seeds_run == 64);
    CHECK(v.seeds_passed == 64);
    CHECK(v.solved());
  }

  SUBCASE("merge without coordination fails some seeds") {
    auto level = fixture("merge");
    auto v = verify_solution(level, initial_state(level), cfg);
    CHECK(v.seeds_passed < v.seeds_run);
    CHECK_FALSE(v.solved());
  }

  SUBCASE("committed solutions pass every seed") {
    for (auto id : {"merge", "critical_section"}) {
      auto level = fixture(id);
      auto v = verify_solution(level, with_solution(level), cfg);
      CHECK(v.seeds_passed == 64);
    }
  }

  SUBCASE("S=1 is a single run_test") {
    auto level = fixture("merge");
    auto one = cfg;
    one.verify_seeds = 1;
    one.base_seed = 17;
    auto v = verify_solution(level, initial_state(level), one);
    auto r = run_test(level, initial_state(level), splitmix64(17), one);
    REQUIRE(v.per_seed.size() == 1);
    CHECK(v.per_seed[0] == SeedOutcome{splitmix64(17), r.outcome, r.ticks});
  }
}

TEST_CASE("exhaustive interleavings agree with sampled verification") {
  auto cfg = p(0.25);
  for (auto id : {"merge", "critical_section"}) {
    auto level = fixture(id);
    auto bare = opsai::testing::enumerate_interleavings(level, initial_state(level),
                                                        cfg, 12);
    CHECK(bare.failing_found);
    CHECK_FALSE(verify_solution(level, initial_state(level), cfg).solved());

    auto solved = with_solution(level);
    auto search = opsai::testing::enumerate_interleavings(level, solved, cfg, 12);
    CHECK_FALSE(search.failing_found);
    CHECK(search.states_explored > 10);
    CHECK(verify_solution(level, solved, cfg).solved());
  }

  SUBCASE("the witness replays to a collision") {
    auto level = fixture("merge");
    auto bare = opsai::testing::enumerate_interleavings(level, initial_state(level),
                                                        cfg, 12);
    REQUIRE(bare.failing_found);
    auto s = apply_action(level, initial_state(level), PlayerAction::start_test(0));
    for (const auto& stalled : bare.witness) {
      s = step_with_stalls(level, s, stalled, cfg).state;
    }
    CHECK(s.outcome == Outcome::collision);
  }
}

TEST_CASE("replay reproduces snapshots and flags tampering") {
  auto level = fixture("merge");
  std::vector<GameEvent> events;
  auto add = [&](PlayerAction a) {
    GameEvent e;
    e.seq = static_cast<std::int64_t>(events.size());
    e.t_ms = 1000 + e.seq;
    e.body = std::move(a);
    events.push_back(std::move(e));
  };
  add(PlayerAction::place_semaphore("eb"));
  add(PlayerAction::start_test(4));
  add(PlayerAction::place_signal("ra"));
  add(PlayerAction::link_signal("ra", "eb"));
  add(PlayerAction::submit_solution());

  auto r = replay_actions(level, events);
  REQUIRE(r.snapshots.size() == 3);
  CHECK(r.snapshots[0].at_seq == 0);
  CHECK(r.snapshots[2].at_seq == 3);
  CHECK(r.final_board == board_from_placements(level, {"eb"}, {{"ra", {"eb"}}}));

  events[2].board_hash = r.snapshots[1].state_hash;
  CHECK_NOTHROW(replay_actions(level, events));
  events[3].board_hash = r.snapshots[1].state_hash;
  try {
    replay_actions(level, events);
    FAIL("expected IntegrityError");
  } catch (const IntegrityError& e) {
    CHECK(e.seq() == 3);
    CHECK(e.code() == "replay_mismatch");
  }

  events[3].board_hash.reset();
  events[2].body = PlayerAction::place_signal("sa");
  CHECK_THROWS_AS(replay_actions(level, events), IntegrityError);
}
