// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <thread>

#include "doctest.h"

#include "../support/files.hpp"
#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/core/ids.hpp"
#include "opsai/game/rng.hpp"
#include "opsai/storage/object_server.hpp"
#include "opsai/storage/storage.hpp"

using namespace opsai;
using namespace opsai::storage;
using opsai::testing::TempDir;

namespace {

void object_store_contract(ObjectStore& store) {
  CHECK(store.get("a/b.json") == std::nullopt);
  CHECK_FALSE(store.exists("a/b.json"));
  CHECK(store.put_if_absent("a/b.json", "one"));
  CHECK_FALSE(store.put_if_absent("a/b.json", "two"));
  CHECK(store.get("a/b.json") == "one");
  CHECK(store.exists("a/b.json"));

  std::string binary("\0\xff\n{x", 5);
  CHECK(store.put_if_absent("a/c/d.bin", binary));
  CHECK(store.get("a/c/d.bin") == binary);
  CHECK(store.put_if_absent("a/c/e.bin", ""));
  CHECK(store.get("a/c/e.bin") == "");
  CHECK(store.put_if_absent("b/x", "x"));

  CHECK(store.list("a/") ==
        std::vector<std::string>{"a/b.json", "a/c/d.bin", "a/c/e.bin"});
  CHECK(store.list("a/c/") == std::vector<std::string>{"a/c/d.bin", "a/c/e.bin"});
  CHECK(store.list("a/c/d") == std::vector<std::string>{"a/c/d.bin"});
  CHECK(store.list("zzz/").empty());

  auto before = store.reads();
  store.get("a/b.json");
  store.exists("b/x");
  store.list("a/");
  CHECK(store.reads() == before + 3);

  for (auto bad : {"", "/abs", "a//b", "a/../b", "a/./b", "a b", "a/b/"}) {
    CHECK_THROWS_AS(store.put_if_absent(bad, "x"), ValidationError);
  }
}

void kv_contract(KvStore& kv) {
  CHECK(kv.get("k") == std::nullopt);
  kv.write({{"b/2", "two"}, {"b/1", "one"}, {"a", "A"}, {"c", "C"}});
  CHECK(kv.get("b/1") == "one");
  std::vector<std::string> seen;
  kv.scan("b/", prefix_end("b/"), [&](const std::string& k, const std::string&) {
    seen.push_back(k);
    return true;
  });
  CHECK(seen == std::vector<std::string>{"b/1", "b/2"});
  seen.clear();
  kv.scan("", "", [&](const std::string& k, const std::string&) {
    seen.push_back(k);
    return seen.size() < 3;
  });
  CHECK(seen == std::vector<std::string>{"a", "b/1", "b/2"});
  kv.write({{"b/1", std::nullopt}, {"a", "A2"}});
  CHECK(kv.get("b/1") == std::nullopt);
  CHECK(kv.get("a") == "A2");

  // Large scans cross internal page boundaries.
  std::vector<KvWrite> many;
  for (int i = 0; i < 1000; ++i) {
    char k[16];
    std::snprintf(k, sizeof k, "m/%04d", i);
    many.push_back({k, std::to_string(i)});
  }
  kv.write(many);
  int n = 0;
  bool ordered = true;
  kv.scan("m/", prefix_end("m/"), [&](const std::string&, const std::string& v) {
    ordered = ordered && v == std::to_string(n);
    ++n;
    return true;
  });
  CHECK(n == 1000);
  CHECK(ordered);
}

SessionHeader header(std::uint64_t n) {
  return {session_id_from_words(n, n * 7 + 1), "p" + std::to_string(n % 3), "straightline",
          1700000000000 + static_cast<std::int64_t>(n), kSchemaVersion};
}

std::vector<GameEvent> event_range(std::int64_t from, std::int64_t to) {
  std::vector<GameEvent> out;
  for (auto s = from; s <= to; ++s) {
    out.push_back({s, 1700000000000 + s * 10,
                   PlayerAction::start_test(static_cast<std::uint64_t>(s)), std::nullopt});
  }
  return out;
}

}  // namespace

TEST_CASE("prefix_end") {
  CHECK(prefix_end("ab") == "ac");
  CHECK(prefix_end("a\xff") == "b");
  CHECK(prefix_end("") == "");
}

TEST_CASE("object stores") {
  SUBCASE("memory") {
    MemoryObjectStore store;
    object_store_contract(store);
  }
  SUBCASE("filesystem") {
    TempDir dir;
    {
      FilesystemObjectStore store(dir.path());
      object_store_contract(store);
    }
    FilesystemObjectStore reopened(dir.path());
    CHECK(reopened.get("a/b.json") == "one");
    for (auto& e : std::filesystem::recursive_directory_iterator(dir.path())) {
      CHECK(e.path().filename().string().rfind(".tmp-", 0) != 0);
    }
  }
  SUBCASE("remote") {
    MemoryObjectStore backing;
    ObjectServer server(backing);
    int port = server.bind("127.0.0.1", 0);
    std::thread t([&] { server.run(); });
    RemoteObjectStore store("http://127.0.0.1:" + std::to_string(port));
    object_store_contract(store);
    CHECK(backing.get("a/b.json") == "one");
    server.stop();
    t.join();
  }
  SUBCASE("unwritable root") {
    CHECK_THROWS_AS(FilesystemObjectStore("/proc/opsai-nope"), IoError);
  }
}

TEST_CASE("concurrent put_if_absent has one winner") {
  TempDir dir;
  FilesystemObjectStore store(dir.path());
  for (int round = 0; round < 20; ++round) {
    std::atomic<int> wins{0};
    std::vector<std::thread> threads;
    auto key = "race/" + std::to_string(round);
    for (int i = 0; i < 4; ++i) {
      threads.emplace_back([&, i] {
        if (store.put_if_absent(key, std::to_string(i))) ++wins;
      });
    }
    for (auto& t : threads) t.join();
    CHECK(wins == 1);
  }
}

TEST_CASE("kv stores") {
  SUBCASE("memory") {
    MemoryKv kv;
    kv_contract(kv);
  }
  SUBCASE("sqlite") {
    TempDir dir;
    auto file = dir.path() / "index" / "kv.sqlite";
    {
      SqliteKv kv(file);
      kv_contract(kv);
    }
    SqliteKv reopened(file);
    CHECK(reopened.get("a") == "A2");
    SqliteKv second(file);
    reopened.put("shared", "yes");
    CHECK(second.get("shared") == "yes");
  }
}

TEST_CASE("log store segments") {
  MemoryObjectStore objects;
  LogStore logs(objects);
  auto h = header(1);
  const auto& id = h.session_id;

  CHECK_THROWS_AS(logs.append_segment(id, event_range(0, 1)), NotFoundError);
  logs.create_session(h);
  CHECK(logs.header(id) == h);
  try {
    logs.create_session(h);
    FAIL("expected conflict");
  } catch (const ConflictError& e) {
    CHECK(e.code() == "session_exists");
  }

  CHECK(logs.append_segment(id, event_range(0, 4)) == 0);
  CHECK(objects.exists("sessions/" + id + "/segments/0.ndjson"));

  SUBCASE("gap names the expected seq") {
    try {
      logs.append_segment(id, event_range(7, 8));
      FAIL("expected seq_gap");
    } catch (const ConflictError& e) {
      CHECK(e.code() == "seq_gap");
      CHECK(e.expected_seq() == 5);
      CHECK(std::string(e.what()).find("expected seq 5") != std::string::npos);
    }
    CHECK_THROWS_AS(logs.append_segment(id, event_range(0, 4)), ConflictError);
  }

  SUBCASE("ten batches reconstruct the stream") {
    std::vector<GameEvent> mirror = event_range(0, 4);
    std::int64_t next = 5;
    game::SplitMix64 rng{3};
    for (int b = 1; b < 10; ++b) {
      auto len = static_cast<std::int64_t>(1 + rng.below(7));
      auto batch = event_range(next, next + len - 1);
      CHECK(logs.append_segment(id, batch) == b);
      mirror.insert(mirror.end(), batch.begin(), batch.end());
      next += len;
    }
    CHECK(logs.events(id) == mirror);
    CHECK(logs.next_seq(id) == next);
    // Numeric, not lexicographic, segment order.
    CHECK(logs.read_segments(id).batches.size() == 10);
  }

  SUBCASE("malformed batches") {
    CHECK_THROWS_AS(logs.append_segment(id, {}), ValidationError);
    auto bad = event_range(5, 6);
    bad[1].seq = 9;
    CHECK_THROWS_AS(logs.append_segment(id, bad), ValidationError);
    bad = event_range(5, 5);
    bad[0].body = PlayerAction{ActionKind::PlaceSemaphore, std::nullopt, std::nullopt, std::nullopt};
    CHECK_THROWS_AS(logs.append_segment(id, bad), ValidationError);
    bad = event_range(5, 5);
    bad[0].t_ms = 0;
    CHECK_THROWS_AS(logs.append_segment(id, bad), ValidationError);
  }

  SUBCASE("sealing") {
    CHECK(logs.seal(id) == 1);
    CHECK(logs.seal(id) == 1);
    CHECK(logs.read_segments(id).sealed);
    try {
      logs.append_segment(id, event_range(5, 6));
      FAIL("expected finalized");
    } catch (const ConflictError& e) {
      CHECK(e.code() == "finalized");
    }
  }
}

TEST_CASE("concurrent appends to one session stay contiguous") {
  TempDir dir;
  FilesystemObjectStore objects(dir.path());
  LogStore logs(objects);
  auto h = header(2);
  logs.create_session(h);
  std::atomic<int> accepted{0};
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&] {
      for (int attempt = 0; attempt < 40; ++attempt) {
        try {
          auto next = logs.next_seq(h.session_id);
          logs.append_segment(h.session_id, event_range(next, next + 1));
          ++accepted;
        } catch (const ConflictError&) {
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  auto ev = logs.events(h.session_id);
  CHECK(static_cast<int>(ev.size()) == accepted * 2);
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i].seq == static_cast<std::int64_t>(i));
}

TEST_CASE("log objects are immutable") {
  MemoryObjectStore objects;
  LogStore logs(objects);
  game::SplitMix64 rng{11};
  auto log = opsai::testing::random_session(rng);
  CHECK_THROWS_AS(logs.get_log(log.header.session_id), NotFoundError);
  log.finalized = false;
  CHECK_THROWS_AS(logs.put_log(log), ValidationError);
  log.finalized = true;
  auto key = logs.put_log(log);
  CHECK(key == "sessions/" + log.header.session_id + "/log.json");
  CHECK(logs.get_log(log.header.session_id) == log);
  CHECK(logs.get_log_bytes(log.header.session_id) == serialize_session(log));
  try {
    logs.put_log(log);
    FAIL("expected conflict");
  } catch (const ConflictError& e) {
    CHECK(e.code() == "finalized");
  }
  CHECK(logs.finalized_ids() == std::vector<std::string>{log.header.session_id});
}

namespace {

ReferenceEntry synthetic_entry(game::SplitMix64& rng, std::uint64_t n) {
  ReferenceEntry e;
  e.session_id = session_id_from_words(rng.next(), n);
  e.object_key = "sessions/" + e.session_id + "/log.json";
  e.player_id = "p" + std::to_string(rng.below(8));
  e.level_id = std::vector<std::string>{"straightline", "merge", "a/b%c"}[rng.below(3)];
  // Few distinct times, so ties on started_at are common.
  e.started_at = 1700000000000 + static_cast<std::int64_t>(rng.below(40)) * 1000;
  e.duration_ms = static_cast<std::int64_t>(rng.below(100000));
  e.solved = rng.below(2) == 1;
  e.action_count = static_cast<std::int64_t>(rng.below(20));
  e.test_run_count = static_cast<std::int64_t>(rng.below(5));
  e.trace_signature = rng.next();
  e.action_token_digest = "P1";
  return e;
}

}  // namespace

TEST_CASE("reference index") {
  MemoryKv kv;
  ReferenceIndex index(kv);
  QueryFilter any;
  any.all = true;
  CHECK(index.query(any).empty());

  game::SplitMix64 rng{5};
  std::vector<ReferenceEntry> all;
  for (std::uint64_t i = 0; i < 100; ++i) {
    all.push_back(synthetic_entry(rng, i));
    index.put(all.back());
  }
  CHECK(index.get(all[3].session_id) == all[3]);
  CHECK(index.entries().size() == 100);

  SUBCASE("random filters agree with the oracle") {
    for (int i = 0; i < 300; ++i) {
      QueryFilter f;
      if (rng.below(3) == 0) f.player_id = "p" + std::to_string(rng.below(9));
      if (rng.below(2) == 0) f.level_id = all[rng.below(all.size())].level_id;
      if (rng.below(3) == 0) f.solved = rng.below(2) == 1;
      if (rng.below(3) == 0) {
        f.started_at.min = 1700000000000 + static_cast<std::int64_t>(rng.below(40)) * 1000;
      }
      if (rng.below(3) == 0) {
        f.started_at.max = 1700000000000 + static_cast<std::int64_t>(rng.below(45)) * 1000;
      }
      if (rng.below(4) == 0) f.action_count.min = static_cast<std::int64_t>(rng.below(20));
      if (rng.below(4) == 0) f.action_count.max = static_cast<std::int64_t>(rng.below(20));
      f.limit = 1 + static_cast<std::int64_t>(rng.below(30));
      f.all = !f.has_clause();
      if (f.started_at.min && f.started_at.max && *f.started_at.min > *f.started_at.max) {
        CHECK_THROWS_AS(index.query(f), ValidationError);
        continue;
      }
      if (f.action_count.min && f.action_count.max && *f.action_count.min > *f.action_count.max) {
        continue;
      }
      REQUIRE(index.query(f) == opsai::testing::filter_oracle(all, f));
    }
  }

  SUBCASE("limit keeps the newest") {
    QueryFilter f;
    f.level_id = "merge";
    auto matches = opsai::testing::filter_oracle(all, f);
    REQUIRE(matches.size() >= 20);
    f.limit = 5;
    auto got = index.query(f);
    CHECK(got.size() == 5);
    CHECK(got == std::vector<ReferenceEntry>(matches.begin(), matches.begin() + 5));
  }

  SUBCASE("malformed filters") {
    QueryFilter f;
    CHECK_THROWS_AS(index.query(f), ValidationError);
    f.all = true;
    f.limit = 0;
    CHECK_THROWS_AS(index.query(f), ValidationError);
  }

  SUBCASE("replacing an entry drops stale secondary keys") {
    auto moved = all[0];
    moved.level_id = "elsewhere";
    index.put(moved);
    QueryFilter f;
    f.level_id = all[0].level_id;
    f.limit = 1000;
    for (const auto& e : index.query(f)) CHECK(e.session_id != moved.session_id);
    f.level_id = "elsewhere";
    CHECK(index.query(f) == std::vector<ReferenceEntry>{moved});
  }

  SUBCASE("quarantine") {
    index.quarantine("abc", Json{{"code", "integrity_error"}, {"seq", 3}});
    CHECK(index.quarantine_reason("abc")->at("seq") == 3);
    CHECK(index.quarantine_reason("def") == std::nullopt);
    CHECK(index.quarantined() == std::vector<std::string>{"abc"});
  }
}

TEST_CASE("reference entry json") {
  game::SplitMix64 rng{8};
  auto e = synthetic_entry(rng, 1);
  CHECK(reference_from_json(to_json(e)) == e);
  CHECK(to_json(e)["trace_signature"].is_string());
}

TEST_CASE("open_storage") {
  TempDir dir;
  StorageConfig cfg;
  cfg.root = dir.path();
  auto s = open_storage(cfg);
  CHECK(std::filesystem::exists(dir.path() / "index" / "refs.sqlite"));
  cfg.root.clear();
  CHECK_THROWS_AS(open_storage(cfg), ValidationError);
  cfg.backend = ObjectBackend::memory;
  cfg.index = IndexBackend::memory;
  CHECK_NOTHROW(open_storage(cfg));
  cfg.backend = ObjectBackend::remote;
  CHECK_THROWS_AS(open_storage(cfg), ValidationError);
  CHECK(parse_index_backend("embedded-kv") == IndexBackend::embedded_kv);
  CHECK_THROWS_AS(parse_object_backend("s3"), ValidationError);
}
