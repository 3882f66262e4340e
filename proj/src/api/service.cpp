// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/api/service.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <limits>

#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/core/ids.hpp"
#include "opsai/game/level.hpp"
#include "opsai/preprocess/finalize.hpp"

namespace opsai::api {

namespace jf = json_field;

const std::map<std::string, int>& error_statuses() {
  static const std::map<std::string, int> kStatuses = {
      {"bad_request", 400},     {"not_found", 404},       {"method_not_allowed", 405},
      {"seq_gap", 409},         {"finalized", 409},       {"not_finalized", 409},
      {"session_exists", 409},  {"empty_session", 422},   {"integrity_error", 422},
      {"invalid_placement", 422}, {"internal", 500},
  };
  return kStatuses;
}

namespace {

Response json_response(int status, const Json& j) {
  return {status, canonical_dump(j), "application/json"};
}

Response error_response(const std::string& code, const std::string& detail,
                        Json extra = Json::object()) {
  extra["code"] = code;
  extra["detail"] = detail;
  // Details may echo client bytes that are not valid UTF-8.
  return {error_statuses().at(code),
          Json{{"error", extra}}.dump(-1, ' ', false, Json::error_handler_t::replace),
          "application/json"};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string::npos) slash = path.size();
    if (slash > start) out.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

std::int64_t query_int(const Request& r, const std::string& key) {
  const auto& text = r.query.at(key);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ValidationError(key, key + " must be an integer");
  }
  return v;
}

bool query_bool(const Request& r, const std::string& key) {
  const auto& text = r.query.at(key);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError(key, key + " must be true or false");
}

Json parse_body(const Request& r) {
  if (r.body.empty()) throw ValidationError("body", "request body is empty");
  auto j = parse_json(r.body);
  jf::expect_object(j, "body");
  return j;
}

const game::LevelSpec& level_or_404(const game::LevelCatalog& levels,
                                    const std::string& id) {
  const auto* level = levels.find(id);
  if (level == nullptr) throw NotFoundError("no level '" + id + "'");
  return *level;
}

}  // namespace

std::string url_encode(std::string_view text) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

// Wire forms -----------------------------------------------------------------

Json to_json(const game::RunResult& r) {
  Json events = Json::array();
  for (const auto& e : r.events) events.push_back(opsai::to_json(e));
  return Json{{"outcome", game::to_string(r.outcome)},
              {"ticks", r.ticks},
              {"events", events},
              {"final_state", opsai::to_json(r.final_state)}};
}

Json to_json(const game::VerifyResult& v) {
  Json per_seed = Json::array();
  for (const auto& s : v.per_seed) {
    per_seed.push_back(
        {{"seed", s.seed}, {"outcome", game::to_string(s.outcome)}, {"ticks", s.ticks}});
  }
  return Json{{"seeds_run", v.seeds_run},
              {"seeds_passed", v.seeds_passed},
              {"solved", v.solved()},
              {"per_seed", per_seed}};
}

game::BoardState placements_from_json(const game::LevelSpec& level, const Json& j) {
  jf::expect_object(j, "placements");
  std::vector<std::string> sems;
  std::map<std::string, std::vector<std::string>> signals;
  if (j.contains("semaphores")) {
    const auto& arr = j["semaphores"];
    jf::expect_array(arr, "placements.semaphores");
    for (const auto& e : arr) {
      if (!e.is_string()) {
        throw ValidationError("placements.semaphores", "edge ids must be strings");
      }
      sems.push_back(e.get<std::string>());
    }
  }
  if (j.contains("signals")) {
    const auto& obj = j["signals"];
    jf::expect_object(obj, "placements.signals");
    for (const auto& [node, links] : obj.items()) {
      auto path = "placements.signals." + node;
      jf::expect_array(links, path);
      auto& out = signals[node];
      for (const auto& e : links) {
        if (!e.is_string()) throw ValidationError(path, "edge ids must be strings");
        out.push_back(e.get<std::string>());
      }
    }
  }
  return game::board_from_placements(level, sems, signals);
}

Json placements_to_json(const game::BoardState& board) {
  Json sems = Json::array();
  for (const auto& [edge, state] : board.semaphores) sems.push_back(edge);
  Json signals = Json::object();
  for (const auto& [node, links] : board.signals) {
    signals[node] = Json::array();
    for (const auto& l : links) signals[node].push_back(l);
  }
  return Json{{"semaphores", sems}, {"signals", signals}};
}

game::SimConfig sim_config_from_json(const Json& j, game::SimConfig c) {
  const std::string path = "cfg";
  jf::expect_object(j, path);
  if (auto v = jf::opt_number(j, "stall_probability", path)) c.stall_probability = *v;
  if (auto v = jf::opt_int64(j, "max_ticks", path)) c.max_ticks = *v;
  if (auto v = jf::opt_int64(j, "deadlock_window", path)) c.deadlock_window = *v;
  if (auto v = jf::opt_int64(j, "verify_seeds", path)) c.verify_seeds = *v;
  if (auto v = jf::opt_uint64(j, "base_seed", path)) c.base_seed = *v;
  c.validate();
  return c;
}

// Service --------------------------------------------------------------------

Service::Service(storage::Storage& storage, const game::LevelCatalog& levels,
                 ServiceOptions options)
    : storage_(storage), levels_(levels), options_(std::move(options)) {
  if (!options_.now_ms) {
    options_.now_ms = [] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  }
}

Response Service::handle(const Request& request) {
  try {
    return route(request);
  } catch (const ParseError& e) {
    return error_response("bad_request", e.what(), {{"offset", e.offset()}});
  } catch (const ValidationError& e) {
    return error_response("bad_request", e.what(), {{"field", e.field()}});
  } catch (const NotFoundError& e) {
    return error_response("not_found", e.what());
  } catch (const ActionRejected& e) {
    return error_response("invalid_placement", e.what(), {{"element", e.element()}});
  } catch (const ConflictError& e) {
    Json extra = Json::object();
    if (e.expected_seq()) extra["expected_seq"] = *e.expected_seq();
    auto code = error_statuses().contains(e.code()) ? e.code() : "internal";
    return error_response(code, e.what(), extra);
  } catch (const IntegrityError& e) {
    Json extra = Json::object();
    if (e.seq()) extra["seq"] = *e.seq();
    return error_response("integrity_error", e.what(), extra);
  } catch (const Error& e) {
    auto code = error_statuses().contains(e.code()) ? e.code() : "internal";
    return error_response(code, e.what());
  } catch (const std::exception& e) {
    return error_response("internal", e.what());
  }
}

Response Service::route(const Request& r) {
  auto parts = split_path(r.path);
  const auto& m = r.method;
  auto allow = [&](const char* method) {
    if (m != method) {
      throw Error("method_not_allowed", m + " is not allowed on " + r.path);
    }
  };

  if (parts.size() < 2 || parts[0] != "v1") {
    throw NotFoundError("no route for " + r.path);
  }
  const auto& top = parts[1];
  if (top == "healthz" && parts.size() == 2) {
    allow("GET");
    return json_response(200, Json{{"ok", true}});
  }
  if (top == "levels" && parts.size() == 3) {
    allow("GET");
    return get_level(parts[2]);
  }
  if (top == "simulate" && parts.size() == 2) {
    allow("POST");
    return simulate(r);
  }
  if (top == "verify" && parts.size() == 2) {
    allow("POST");
    return verify(r);
  }
  if (top == "sessions") {
    if (parts.size() == 2) {
      if (m == "GET") return query_sessions(r);
      allow("POST");
      return create_session(r);
    }
    if (parts.size() == 3) {
      allow("GET");
      return get_session(parts[2]);
    }
    if (parts.size() == 4) {
      const auto& id = parts[2];
      if (parts[3] == "events") {
        allow("POST");
        return append_events(id, r);
      }
      if (parts[3] == "finalize") {
        allow("POST");
        return finalize(id);
      }
      if (parts[3] == "analytics") {
        allow("GET");
        return analytics(id, r);
      }
    }
  }
  throw NotFoundError("no route for " + r.path);
}

Response Service::get_level(const std::string& id) {
  return json_response(200, game::level_to_json(level_or_404(levels_, id)));
}

Response Service::create_session(const Request& r) {
  auto body = parse_body(r);
  SessionHeader h;
  h.player_id = jf::string(body, "player_id", "body");
  h.level_id = jf::string(body, "level_id", "body");
  if (auto id = jf::opt_string(body, "session_id", "body")) {
    if (!is_session_id(*id)) {
      throw ValidationError("body.session_id", "session_id must be 32 lowercase hex characters");
    }
    h.session_id = *id;
  } else {
    h.session_id = random_session_id();
  }
  h.started_at = jf::opt_int64(body, "started_at", "body").value_or(options_.now_ms());
  level_or_404(levels_, h.level_id);
  storage_.logs().create_session(h);
  return json_response(201, Json{{"session_id", h.session_id}});
}

Response Service::append_events(const std::string& id, const Request& r) {
  std::vector<GameEvent> batch;
  std::size_t start = 0, line_no = 0;
  while (start < r.body.size()) {
    auto nl = r.body.find('\n', start);
    if (nl == std::string::npos) nl = r.body.size();
    std::string_view line(r.body.data() + start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      try {
        batch.push_back(parse_event(line));
      } catch (const ParseError& e) {
        throw ValidationError("line " + std::to_string(line_no + 1),
                              "line " + std::to_string(line_no + 1) + ": " + e.what());
      }
    }
    start = nl + 1;
    ++line_no;
  }
  if (batch.empty()) throw ValidationError("body", "no events in batch");
  storage_.logs().append_segment(id, batch);
  return json_response(200, Json{{"accepted_through_seq", batch.back().seq}});
}

Response Service::finalize(const std::string& id) {
  preprocess::Finalizer finalizer(storage_, levels_);
  return json_response(200, storage::to_json(finalizer.finalize(id)));
}

Response Service::query_sessions(const Request& r) {
  storage::QueryFilter f;
  for (const auto& [key, value] : r.query) {
    if (key == "player") {
      f.player_id = value;
    } else if (key == "level") {
      f.level_id = value;
    } else if (key == "solved") {
      f.solved = query_bool(r, key);
    } else if (key == "limit") {
      f.limit = query_int(r, key);
    } else if (key == "all") {
      f.all = query_bool(r, key);
    } else if (key == "started_from") {
      f.started_at.min = query_int(r, key);
    } else if (key == "started_to") {
      f.started_at.max = query_int(r, key);
    } else if (key == "min_actions") {
      f.action_count.min = query_int(r, key);
    } else if (key == "max_actions") {
      f.action_count.max = query_int(r, key);
    } else {
      throw ValidationError(key, "unknown query parameter '" + key + "'");
    }
  }
  Json out = Json::array();
  for (const auto& e : storage_.index().query(f)) out.push_back(storage::to_json(e));
  return json_response(200, out);
}

Response Service::get_session(const std::string& id) {
  if (auto bytes = storage_.logs().get_log_bytes(id)) {
    return {200, *bytes, "application/json"};
  }
  // Live view: header and the events appended so far.
  SessionLog live;
  live.header = storage_.logs().header(id);
  live.events = storage_.logs().events(id);
  return json_response(200, opsai::to_json(live));
}

Response Service::analytics(const std::string& id, const Request& r) {
  std::optional<std::size_t> k;
  if (r.query.contains("k")) {
    auto v = query_int(r, "k");
    if (v < 1) throw ValidationError("k", "k must be >= 1");
    k = static_cast<std::size_t>(v);
  }
  analytics::AnalyticsService svc(storage_, options_.analytics);
  return json_response(200, analytics::to_json(svc.build_payload(id, k, options_.now_ms())));
}

namespace {

struct SimRequest {
  const game::LevelSpec* level;
  game::BoardState board;
  game::SimConfig cfg;
};

SimRequest read_sim_request(const Json& body, const game::LevelCatalog& levels,
                            const game::SimConfig& server) {
  SimRequest out;
  out.level = &level_or_404(levels, jf::string(body, "level_id", "body"));
  out.cfg = game::SimConfig::for_level(*out.level, server);
  if (body.contains("cfg")) out.cfg = sim_config_from_json(body["cfg"], out.cfg);
  out.board = body.contains("placements")
                  ? placements_from_json(*out.level, body["placements"])
                  : game::initial_state(*out.level);
  return out;
}

}  // namespace

Response Service::simulate(const Request& r) {
  auto body = parse_body(r);
  auto req = read_sim_request(body, levels_, options_.sim);
  auto seed = jf::uint64(body, "seed", "body");
  return json_response(200, to_json(game::run_test(*req.level, req.board, seed, req.cfg)));
}

Response Service::verify(const Request& r) {
  auto body = parse_body(r);
  auto req = read_sim_request(body, levels_, options_.sim);
  return json_response(200, to_json(game::verify_solution(*req.level, req.board, req.cfg)));
}

}  // namespace opsai::api
