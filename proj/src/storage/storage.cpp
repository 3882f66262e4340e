// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/storage/storage.hpp"

#include "opsai/core/error.hpp"

namespace opsai::storage {

std::string_view to_string(ObjectBackend b) noexcept {
  switch (b) {
    case ObjectBackend::filesystem: return "filesystem";
    case ObjectBackend::memory: return "memory";
    case ObjectBackend::remote: return "remote";
  }
  return "?";
}

std::string_view to_string(IndexBackend b) noexcept {
  return b == IndexBackend::embedded_kv ? "embedded-kv" : "memory";
}

ObjectBackend parse_object_backend(std::string_view text) {
  if (text == "filesystem") return ObjectBackend::filesystem;
  if (text == "memory") return ObjectBackend::memory;
  if (text == "remote") return ObjectBackend::remote;
  throw ValidationError("backend", "unknown storage backend '" + std::string(text) + "'");
}

IndexBackend parse_index_backend(std::string_view text) {
  if (text == "embedded-kv") return IndexBackend::embedded_kv;
  if (text == "memory") return IndexBackend::memory;
  throw ValidationError("index", "unknown index backend '" + std::string(text) + "'");
}

std::unique_ptr<Storage> open_storage(const StorageConfig& config) {
  bool needs_root = config.backend == ObjectBackend::filesystem ||
                    config.index == IndexBackend::embedded_kv;
  if (needs_root && config.root.empty()) {
    throw ValidationError("root", "storage root is required");
  }

  std::unique_ptr<ObjectStore> objects;
  switch (config.backend) {
    case ObjectBackend::filesystem:
      objects = std::make_unique<FilesystemObjectStore>(config.root);
      break;
    case ObjectBackend::memory:
      objects = std::make_unique<MemoryObjectStore>();
      break;
    case ObjectBackend::remote:
      if (config.endpoint.empty()) {
        throw ValidationError("endpoint", "remote backend needs an endpoint");
      }
      objects = std::make_unique<RemoteObjectStore>(config.endpoint);
      break;
  }

  std::unique_ptr<KvStore> kv;
  if (config.index == IndexBackend::embedded_kv) {
    kv = std::make_unique<SqliteKv>(config.root / "index" / "refs.sqlite");
  } else {
    kv = std::make_unique<MemoryKv>();
  }
  return std::make_unique<Storage>(std::move(objects), std::move(kv));
}

}  // namespace opsai::storage
