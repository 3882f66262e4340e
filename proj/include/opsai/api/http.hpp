// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "opsai/api/service.hpp"

namespace opsai::api {

/// HTTP/1.1 binding of a Service, with CORS for browser clients.
class HttpServer {
 public:
  HttpServer(Service& service, std::string cors_origin = "*");
  ~HttpServer();

  /// Binds `host:port` (port 0 picks a free port) and returns the port.
  /// Throws IoError when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace opsai::api
