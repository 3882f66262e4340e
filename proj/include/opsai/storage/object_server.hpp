// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "opsai/storage/object_store.hpp"

namespace opsai::storage {

/// Exposes an ObjectStore over HTTP for RemoteObjectStore clients.
class ObjectServer {
 public:
  explicit ObjectServer(ObjectStore& backing);
  ~ObjectServer();

  /// Binds `host:port` (port 0 picks a free port) and returns the bound
  /// port. Throws IoError when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace opsai::storage
