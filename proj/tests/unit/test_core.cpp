// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "../support/files.hpp"
#include "../support/generators.hpp"
#include "opsai/core/base64.hpp"
#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/core/fnv.hpp"
#include "opsai/game/engine.hpp"
#include "opsai/game/level.hpp"

using namespace opsai;
using opsai::testing::golden_dir;
using opsai::testing::levels_dir;
using opsai::testing::read_file;

namespace {

SessionLog minimal_log() {
  SessionLog log;
  log.header = {"0123456789abcdef0123456789abcdef", "p1", "straightline",
                1700000000000, 1};
  return log;
}

GameEvent action_event(std::int64_t seq, std::int64_t t, PlayerAction a) {
  GameEvent e;
  e.seq = seq;
  e.t_ms = t;
  e.body = std::move(a);
  return e;
}

GameEvent system_event(std::int64_t seq, std::int64_t t, SystemEvent s) {
  GameEvent e;
  e.seq = seq;
  e.t_ms = t;
  e.body = std::move(s);
  return e;
}

game::LevelSpec straightline() {
  return game::load_level(read_file(levels_dir() / "straightline.json"));
}

}  // namespace

TEST_CASE("fnv1a64 of zero bytes is the offset basis") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  // Published test vector.
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  Fnv1a64 h;
  h.update_be64(0x0102030405060708ULL);
  CHECK(h.digest() == fnv1a64(std::string("\x01\x02\x03\x04\x05\x06\x07\x08", 8)));
}

TEST_CASE("hash hex form") {
  CHECK(hash_to_hex(0) == "0000000000000000");
  CHECK(hash_to_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(hash_from_hex("cbf29ce484222325") == 0xcbf29ce484222325ULL);
  CHECK_THROWS_AS(hash_from_hex("CBF29CE484222325"), ValidationError);
  CHECK_THROWS_AS(hash_from_hex("abc"), ValidationError);
}

TEST_CASE("base64") {
  CHECK(base64::encode("") == "");
  CHECK(base64::encode("f") == "Zg==");
  CHECK(base64::encode("fo") == "Zm8=");
  CHECK(base64::encode("foobar") == "Zm9vYmFy");
  CHECK(base64::decode("Zm9vYg==") == "foob");
  CHECK_THROWS_AS(base64::decode("Zm9"), ValidationError);
  CHECK_THROWS_AS(base64::decode("Zm9*"), ValidationError);
  CHECK_THROWS_AS(base64::decode("Z=9v"), ValidationError);

  game::SplitMix64 rng{11};
  for (int i = 0; i < 200; ++i) {
    std::string bytes;
    for (std::uint64_t k = 0, n = rng.below(50); k < n; ++k) {
      bytes.push_back(static_cast<char>(rng.below(256)));
    }
    REQUIRE(base64::decode(base64::encode(bytes)) == bytes);
  }
}

TEST_CASE("minimal log round-trips") {
  SessionLog log = minimal_log();
  auto bytes = serialize_session(log);
  CHECK(deserialize_session(bytes) == log);
  CHECK(bytes.find(' ') == std::string::npos);
}

TEST_CASE("round-trip and canonical fixed point over generated logs") {
  game::SplitMix64 rng{2024};
  for (int i = 0; i < 300; ++i) {
    SessionLog log = opsai::testing::random_session(rng);
    auto bytes = serialize_session(log);
    SessionLog back = deserialize_session(bytes);
    REQUIRE(back == log);
    REQUIRE(serialize_session(back) == bytes);
  }
}

TEST_CASE("state hash is independent of construction order") {
  game::BoardState a;
  a.level_id = "L";
  a.arrows = {{"x1", game::Color::red, "n1", false},
              {"x2", game::Color::blue, "n2", false}};
  a.semaphores["e2"] = game::SemaphoreState::open;
  a.semaphores["e1"] = game::SemaphoreState::closed;
  a.signals["n2"] = {"e2", "e1"};

  game::BoardState b;
  b.level_id = "L";
  b.signals["n2"].insert("e1");
  b.signals["n2"].insert("e2");
  b.semaphores["e1"] = game::SemaphoreState::closed;
  b.semaphores["e2"] = game::SemaphoreState::open;
  b.arrows = {{"x2", game::Color::blue, "n2", false},
              {"x1", game::Color::red, "n1", false}};

  CHECK(canonical_state_bytes(a) == canonical_state_bytes(b));
  CHECK(canonical_state_hash(a) == canonical_state_hash(b));
}

TEST_CASE("golden files: canonical bytes and hashes") {
  auto hashes = opsai::testing::read_kv(golden_dir() / "hashes.txt");
  auto level = straightline();
  auto initial = game::initial_state(level);

  SUBCASE("initial state of straightline") {
    CHECK(canonical_state_bytes(initial) ==
          read_file(golden_dir() / "straightline_initial_state.json"));
    CHECK(hash_to_hex(canonical_state_hash(initial)) ==
          hashes.at("straightline_initial"));
  }

  auto after_e1 =
      game::apply_action(level, initial, PlayerAction::place_semaphore("e1"));
  auto after_a =
      game::apply_action(level, after_e1, PlayerAction::place_signal("a"));
  auto after_link =
      game::apply_action(level, after_a, PlayerAction::link_signal("a", "e1"));
  CHECK(hash_to_hex(canonical_state_hash(after_e1)) == hashes.at("after_e1"));
  CHECK(hash_to_hex(canonical_state_hash(after_a)) == hashes.at("after_a"));
  CHECK(hash_to_hex(canonical_state_hash(after_link)) == hashes.at("after_link"));

  SUBCASE("minimal session") {
    CHECK(serialize_session(minimal_log()) ==
          read_file(golden_dir() / "session_minimal.json"));
  }

  SUBCASE("three-event session") {
    SessionLog log = minimal_log();
    const std::int64_t t0 = log.header.started_at;
    auto h = canonical_state_hash(after_e1);
    auto e0 = action_event(0, t0 + 1000, PlayerAction::place_semaphore("e1"));
    e0.board_hash = h;
    log.events = {e0, action_event(1, t0 + 2500, PlayerAction::start_test(7)),
                  system_event(2, t0 + 2600,
                               SystemEvent::test_result(
                                   7, game::Outcome::timeout, 50))};
    log.snapshots = {{0, h, after_e1}};
    auto bytes = serialize_session(log);
    CHECK(bytes == read_file(golden_dir() / "session_three_events.json"));
    CHECK(deserialize_session(bytes) == log);
  }

  SUBCASE("finalized session with enrichment") {
    SessionLog log;
    log.header = {"fedcba9876543210fedcba9876543210", "p2", "straightline",
                  1700000000000, 1};
    const std::int64_t t0 = log.header.started_at;
    log.events = {
        action_event(0, t0 + 100, PlayerAction::place_semaphore("e1")),
        action_event(1, t0 + 200, PlayerAction::place_signal("a")),
        action_event(2, t0 + 300, PlayerAction::link_signal("a", "e1")),
        action_event(3, t0 + 400, PlayerAction::submit_solution()),
        system_event(4, t0 + 900, SystemEvent::solution_verified(64, 0)),
    };
    log.snapshots = {{0, canonical_state_hash(after_e1), after_e1},
                     {1, canonical_state_hash(after_a), after_a},
                     {2, canonical_state_hash(after_link), after_link}};
    log.enrichments = {{"eye_tracking", "application/octet-stream",
                        std::string("\x00\x01gaze:12,40;13,41", 18)}};
    log.finalized = true;
    DerivedSection d;
    d.metrics.action_count = 4;
    for (auto k : kAllActionKinds) d.metrics.action_counts_by_kind[k] = 0;
    d.metrics.action_counts_by_kind[ActionKind::PlaceSemaphore] = 1;
    d.metrics.action_counts_by_kind[ActionKind::PlaceSignal] = 1;
    d.metrics.action_counts_by_kind[ActionKind::LinkSignal] = 1;
    d.metrics.action_counts_by_kind[ActionKind::SubmitSolution] = 1;
    d.metrics.duration_ms = 900;
    d.metrics.board_state_trajectory_len = 3;
    d.metrics.final_placements = {"e1"};
    d.trace_signature = hash_from_hex(hashes.at("trace_enriched"));
    d.replay_verified = true;
    log.derived = d;
    auto bytes = serialize_session(log);
    CHECK(bytes == read_file(golden_dir() / "session_enriched.json"));
    CHECK(deserialize_session(bytes) == log);
  }
}

TEST_CASE("deserialize rejects invariant violations") {
  const std::string head =
      R"({"enrichments":[],"finalized":false,"header":{"level_id":"L","player_id":"p","schema_version":1,"session_id":"0123456789abcdef0123456789abcdef","started_at":5},"snapshots":[],"events":)";

  SUBCASE("seq gap") {
    std::string text =
        head + R"([{"seq":0,"t_ms":10,"action":{"kind":"SubmitSolution"}},{"seq":2,"t_ms":11,"action":{"kind":"SubmitSolution"}}]})";
    try {
      deserialize_session(text);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("gap at seq 1") != std::string::npos);
    }
  }

  SUBCASE("decreasing t_ms") {
    std::string text =
        head + R"([{"seq":0,"t_ms":10,"action":{"kind":"SubmitSolution"}},{"seq":1,"t_ms":5,"action":{"kind":"SubmitSolution"}}]})";
    try {
      deserialize_session(text);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "events[seq=1].t_ms");
      CHECK(std::string(e.what()).find("seq 1") != std::string::npos);
    }
  }

  SUBCASE("malformed JSON reports a byte offset") {
    try {
      deserialize_session(R"({"header": {"level_id": )");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() > 0);
    }
  }

  SUBCASE("unknown schema_version") {
    auto text = serialize_session(minimal_log());
    auto pos = text.find("\"schema_version\":1");
    text.replace(pos, 18, "\"schema_version\":2");
    CHECK_THROWS_AS(deserialize_session(text), ValidationError);
  }

  SUBCASE("action shape") {
    std::string text =
        head + R"([{"seq":0,"t_ms":10,"action":{"kind":"PlaceSemaphore"}}]})";
    CHECK_THROWS_WITH_AS(deserialize_session(text),
                         doctest::Contains("requires a target"),
                         ValidationError);
  }

  SUBCASE("event with both bodies") {
    std::string text =
        head + R"([{"seq":0,"t_ms":10,"action":{"kind":"ResetBoard"},"system":{"kind":"TestStarted","detail":{"seed":1}}}]})";
    CHECK_THROWS_AS(deserialize_session(text), ValidationError);
  }
}

TEST_CASE("validate_session findings") {
  SUBCASE("valid minimal log") { CHECK(validate_session(minimal_log()).empty()); }

  SUBCASE("snapshot referencing no event") {
    SessionLog log = minimal_log();
    log.events = {action_event(0, log.header.started_at,
                               PlayerAction::place_signal("a"))};
    game::BoardState s;
    s.level_id = "straightline";
    log.snapshots = {{4, canonical_state_hash(s), s}};
    auto findings = validate_session(log);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].field == "snapshots[0].at_seq");
  }

  SUBCASE("seq gap plus stale state_hash gives exactly two findings") {
    SessionLog log = minimal_log();
    const auto t0 = log.header.started_at;
    log.events = {action_event(0, t0, PlayerAction::place_signal("a")),
                  action_event(2, t0 + 1, PlayerAction::remove_signal("a"))};
    game::BoardState s;
    s.level_id = "straightline";
    log.snapshots = {{2, canonical_state_hash(s) ^ 1, s}};
    auto findings = validate_session(log);
    REQUIRE(findings.size() == 2);
    CHECK(findings[0].message == "gap at seq 1");
    CHECK(findings[1].field == "snapshots[0].state_hash");
    CHECK_THROWS_AS(serialize_session(log), ValidationError);
  }

  SUBCASE("duplicate enrichment names") {
    SessionLog log = minimal_log();
    log.enrichments = {{"eye", "a/b", "1"}, {"eye", "a/b", "2"}};
    CHECK(validate_session(log).size() == 1);
  }

  SUBCASE("header fields") {
    SessionLog log = minimal_log();
    log.header.session_id = "XYZ";
    log.header.started_at = 0;
    log.header.player_id = std::string(65, 'p');
    CHECK(validate_session(log).size() == 3);
  }
}

TEST_CASE("event lines") {
  GameEvent e = action_event(3, 99, PlayerAction::link_signal("n3", "e1"));
  auto line = serialize_event(e);
  CHECK(line == R"({"action":{"kind":"LinkSignal","link":{"semaphore":"e1","signal":"n3"}},"seq":3,"t_ms":99})");
  CHECK(parse_event(line) == e);
}
