// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "opsai/storage/kv.hpp"
#include "opsai/storage/log_store.hpp"
#include "opsai/storage/object_store.hpp"
#include "opsai/storage/reference_index.hpp"

namespace opsai::storage {

enum class ObjectBackend { filesystem, memory, remote };
enum class IndexBackend { embedded_kv, memory };

std::string_view to_string(ObjectBackend b) noexcept;
std::string_view to_string(IndexBackend b) noexcept;
ObjectBackend parse_object_backend(std::string_view text);
IndexBackend parse_index_backend(std::string_view text);

struct StorageConfig {
  ObjectBackend backend = ObjectBackend::filesystem;
  /// Filesystem root. Also holds the embedded index under `index/`.
  std::filesystem::path root;
  /// `http://host:port` of an object server when backend is remote.
  std::string endpoint;
  IndexBackend index = IndexBackend::embedded_kv;
};

/// Both tiers wired together.
class Storage {
 public:
  Storage(std::unique_ptr<ObjectStore> objects, std::unique_ptr<KvStore> kv)
      : objects_(std::move(objects)),
        kv_(std::move(kv)),
        logs_(*objects_),
        index_(*kv_) {}

  ObjectStore& objects() { return *objects_; }
  KvStore& kv() { return *kv_; }
  LogStore& logs() { return logs_; }
  ReferenceIndex& index() { return index_; }

 private:
  std::unique_ptr<ObjectStore> objects_;
  std::unique_ptr<KvStore> kv_;
  LogStore logs_;
  ReferenceIndex index_;
};

/// Opens the configured backends. Throws IoError when a path is not
/// writable, ValidationError when the config is incomplete.
std::unique_ptr<Storage> open_storage(const StorageConfig& config);

}  // namespace opsai::storage
