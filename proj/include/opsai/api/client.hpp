// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opsai/api/service.hpp"
#include "opsai/core/error.hpp"
#include "opsai/storage/reference.hpp"

namespace opsai::api {

/// Non-2xx response from the service.
class ApiError : public Error {
 public:
  ApiError(int status, std::string code, const std::string& detail, Json body)
      : Error(std::move(code), detail), status_(status), body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  /// The `error` object of the response.
  const Json& body() const noexcept { return body_; }

 private:
  int status_;
  Json body_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws IoError when the service cannot be reached.
  virtual Response send(const Request& request) = 0;
};

/// Talks to `http://host:port`.
std::unique_ptr<Transport> http_transport(const std::string& base_url);
/// Calls a Service in this process.
std::unique_ptr<Transport> local_transport(Service& service);

/// Typed calls over any transport.
class Client {
 public:
  explicit Client(std::unique_ptr<Transport> transport)
      : transport_(std::move(transport)) {}

  bool healthz();
  std::string create_session(const std::string& player_id, const std::string& level_id,
                             const std::optional<std::string>& session_id = std::nullopt,
                             std::optional<std::int64_t> started_at = std::nullopt);
  /// Returns accepted_through_seq.
  std::int64_t append_events(const std::string& session_id,
                             const std::vector<GameEvent>& events);
  storage::ReferenceEntry finalize(const std::string& session_id);
  std::vector<storage::ReferenceEntry> query(
      const std::map<std::string, std::string>& params);
  /// Raw body of GET /v1/sessions/{id}.
  std::string session_bytes(const std::string& session_id);
  Json analytics(const std::string& session_id, std::optional<std::size_t> k = std::nullopt);
  Json level(const std::string& level_id);
  Json simulate(const Json& body);
  Json verify(const Json& body);

  /// Sends a raw request and throws ApiError for non-2xx statuses.
  Response call(const Request& request);

 private:
  std::unique_ptr<Transport> transport_;
};

}  // namespace opsai::api
