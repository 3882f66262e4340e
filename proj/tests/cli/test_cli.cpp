// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the opsai binary end to end.

#include <signal.h>
#include <sys/wait.h>

#include <set>
#include <sstream>

#include "doctest.h"

#include "../support/files.hpp"
#include "../support/process.hpp"
#include "opsai/api/client.hpp"
#include "opsai/core/json_util.hpp"

using namespace opsai;
using opsai::testing::run_command;
using opsai::testing::TempDir;

namespace {

const std::string kOpsai = OPSAI_CLI_PATH;

std::vector<Json> json_lines(const std::string& text) {
  std::vector<Json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(parse_json(line));
  return out;
}

std::vector<std::string> with_levels(std::vector<std::string> argv) {
  argv.insert(argv.begin(), kOpsai);
  argv.push_back("--levels-dir");
  argv.push_back(opsai::testing::levels_dir().string());
  return argv;
}

}  // namespace

TEST_CASE("level validate") {
  auto ok = run_command({kOpsai, "level", "validate",
                         (opsai::testing::levels_dir() / "straightline.json").string()});
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.empty());

  auto bad = run_command({kOpsai, "level", "validate",
                          (opsai::testing::fixtures_dir() / "ambiguous.json").string()});
  CHECK(bad.exit_code == 1);
  auto findings = json_lines(bad.out);
  REQUIRE(findings.size() >= 1);
  CHECK(findings[0]["element"] == "s");

  CHECK(run_command({kOpsai, "level", "validate", "/nonexistent/level.json"}).exit_code == 3);
  CHECK(run_command({kOpsai, "level", "frobnicate"}).exit_code == 1);
}

TEST_CASE("simulate, query, analyze and reindex on a storage root") {
  TempDir root;
  const auto store = root.path().string();

  auto empty = run_command(with_levels({"query", "--all", "--store", store}));
  CHECK(empty.exit_code == 0);
  CHECK(empty.out.empty());

  auto sim = run_command(with_levels({"simulate", "--level", "merge", "--bots", "30",
                                      "--profile", R"({"competence":0.5,"seed":11})",
                                      "--out", store}));
  REQUIRE(sim.exit_code == 0);
  auto entries = json_lines(sim.out);
  REQUIRE(entries.size() == 30);
  std::set<std::string> ids;
  std::set<std::string> players;
  for (const auto& e : entries) {
    CHECK(e["level_id"] == "merge");
    ids.insert(e["session_id"].get<std::string>());
    players.insert(e["player_id"].get<std::string>());
  }
  CHECK(ids.size() == 30);
  CHECK(players.size() == 30);

  auto all = json_lines(run_command(with_levels({"query", "--all", "--store", store})).out);
  CHECK(all.size() == 30);
  for (std::size_t i = 1; i < all.size(); ++i) {
    CHECK(all[i - 1]["started_at"].get<std::int64_t>() >= all[i]["started_at"].get<std::int64_t>());
  }
  auto few = run_command(with_levels(
      {"query", "--level", "merge", "--limit", "5", "--store", store}));
  CHECK(json_lines(few.out) == std::vector<Json>(all.begin(), all.begin() + 5));
  auto solved = json_lines(run_command(with_levels(
      {"query", "--solved", "true", "--all", "--store", store})).out);
  for (const auto& e : solved) CHECK(e["solved"] == true);
  CHECK(run_command(with_levels({"query", "--limit", "zero", "--all", "--store", store}))
            .exit_code == 1);

  const auto id = entries[0]["session_id"].get<std::string>();
  auto analyze = run_command(with_levels({"analyze", id, "--k", "3", "--store", store}));
  REQUIRE(analyze.exit_code == 0);
  auto payload = parse_json(analyze.out);
  CHECK(payload["payload_version"] == 1);
  CHECK(payload["peers"].size() == 3);
  CHECK(run_command(with_levels({"analyze", "0123456789abcdef0123456789abcdef",
                                 "--store", store})).exit_code == 2);

  auto reindex = run_command({kOpsai, "reindex", "--store", store});
  CHECK(reindex.exit_code == 0);
  CHECK(json_lines(reindex.out) == std::vector<Json>{Json{{"scanned", 30}, {"diffs", 0}}});

  SUBCASE("the same seed gives the same sessions") {
    TempDir other;
    auto again = run_command(with_levels({"simulate", "--level", "merge", "--bots", "30",
                                          "--profile", R"({"competence":0.5,"seed":11})",
                                          "--concurrency", "1", "--out",
                                          other.path().string()}));
    CHECK(json_lines(again.out) == entries);
  }

  SUBCASE("bad arguments") {
    CHECK(run_command(with_levels({"simulate", "--level", "nope", "--bots", "1",
                                   "--out", store})).exit_code == 2);
    CHECK(run_command(with_levels({"simulate", "--level", "merge", "--bots", "1",
                                   "--profile", R"({"competence":7})", "--out", store}))
              .exit_code == 1);
  }
}

TEST_CASE("serve") {
  TempDir root;
  opsai::testing::ChildProcess server(with_levels(
      {"serve", "--storage-root", root.path().string(), "--bind", "127.0.0.1:0"}));
  auto hello = parse_json(server.read_line());
  const auto addr = hello["listening"].get<std::string>();
  const auto url = "http://" + addr;
  api::Client client(api::http_transport(url));
  CHECK(client.healthz());

  auto sim = run_command(with_levels({"simulate", "--level", "straightline", "--bots", "4",
                                      "--out", url}));
  CHECK(sim.exit_code == 0);
  CHECK(json_lines(sim.out).size() == 4);
  auto q = run_command({kOpsai, "query", "--all", "--store", url});
  CHECK(json_lines(q.out).size() == 4);

  // The port is taken.
  auto busy = run_command(with_levels(
      {"serve", "--storage-root", root.path().string(), "--bind", addr}));
  CHECK(busy.exit_code == 3);

  server.signal(SIGTERM);
  auto status = server.wait();
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);

  CHECK(run_command(with_levels({"serve", "--storage-root", "/proc/opsai-missing",
                                 "--bind", "127.0.0.1:0"})).exit_code == 1);
}
