// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/api/client.hpp"

#include "opsai/core/codec.hpp"

namespace opsai::api {

Response Client::call(const Request& request) {
  auto res = transport_->send(request);
  if (res.status >= 200 && res.status < 300) return res;
  Json err = Json::object();
  std::string code = "internal";
  std::string detail = "HTTP " + std::to_string(res.status);
  try {
    auto j = parse_json(res.body);
    if (j.is_object() && j.contains("error") && j["error"].is_object()) {
      err = j["error"];
      code = err.value("code", code);
      detail = err.value("detail", detail);
    }
  } catch (const ParseError&) {
  }
  throw ApiError(res.status, code, detail, err);
}

namespace {

Request get(std::string path, std::map<std::string, std::string> query = {}) {
  return {"GET", std::move(path), std::move(query), ""};
}

Request post(std::string path, std::string body) {
  return {"POST", std::move(path), {}, std::move(body)};
}

std::string session_path(const std::string& id) { return "/v1/sessions/" + url_encode(id); }

}  // namespace

bool Client::healthz() {
  return parse_json(call(get("/v1/healthz")).body).value("ok", false);
}

std::string Client::create_session(const std::string& player_id, const std::string& level_id,
                                   const std::optional<std::string>& session_id,
                                   std::optional<std::int64_t> started_at) {
  Json body{{"player_id", player_id}, {"level_id", level_id}};
  if (session_id) body["session_id"] = *session_id;
  if (started_at) body["started_at"] = *started_at;
  auto res = call(post("/v1/sessions", canonical_dump(body)));
  return parse_json(res.body).at("session_id").get<std::string>();
}

std::int64_t Client::append_events(const std::string& id,
                                   const std::vector<GameEvent>& events) {
  std::string body;
  for (const auto& e : events) {
    body += serialize_event(e);
    body += '\n';
  }
  auto res = call(post(session_path(id) + "/events", body));
  return parse_json(res.body).at("accepted_through_seq").get<std::int64_t>();
}

storage::ReferenceEntry Client::finalize(const std::string& id) {
  return storage::reference_from_json(
      parse_json(call(post(session_path(id) + "/finalize", "")).body));
}

std::vector<storage::ReferenceEntry> Client::query(
    const std::map<std::string, std::string>& params) {
  auto j = parse_json(call(get("/v1/sessions", params)).body);
  std::vector<storage::ReferenceEntry> out;
  for (const auto& e : j) out.push_back(storage::reference_from_json(e));
  return out;
}

std::string Client::session_bytes(const std::string& id) {
  return call(get(session_path(id))).body;
}

Json Client::analytics(const std::string& id, std::optional<std::size_t> k) {
  std::map<std::string, std::string> q;
  if (k) q["k"] = std::to_string(*k);
  return parse_json(call(get(session_path(id) + "/analytics", q)).body);
}

Json Client::level(const std::string& id) {
  return parse_json(call(get("/v1/levels/" + url_encode(id))).body);
}

Json Client::simulate(const Json& body) {
  return parse_json(call(post("/v1/simulate", canonical_dump(body))).body);
}

Json Client::verify(const Json& body) {
  return parse_json(call(post("/v1/verify", canonical_dump(body))).body);
}

}  // namespace opsai::api
