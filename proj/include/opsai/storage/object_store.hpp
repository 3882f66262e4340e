// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace opsai::storage {

/// Flat namespace of immutable objects addressed by slash-separated keys.
/// Objects are written once; a second write to the same key is refused.
///
/// Every read-side call bumps `reads()`, so callers can prove a code path
/// never touched the bulk tier.
class ObjectStore {
 public:
  virtual ~ObjectStore() = default;

  /// Stores `bytes` under `key` unless the key exists. Returns false when it
  /// does. The object is durable once this returns true.
  bool put_if_absent(const std::string& key, std::string_view bytes);
  std::optional<std::string> get(const std::string& key);
  bool exists(const std::string& key);
  /// Keys beginning with `prefix`, in ascending byte order.
  std::vector<std::string> list(const std::string& prefix);

  std::uint64_t reads() const noexcept { return reads_.load(); }
  std::uint64_t writes() const noexcept { return writes_.load(); }

 protected:
  virtual bool do_put_if_absent(const std::string& key,
                                std::string_view bytes) = 0;
  virtual std::optional<std::string> do_get(const std::string& key) = 0;
  virtual bool do_exists(const std::string& key) = 0;
  virtual std::vector<std::string> do_list(const std::string& prefix) = 0;

 private:
  std::atomic<std::uint64_t> reads_{0};
  std::atomic<std::uint64_t> writes_{0};
};

/// Throws ValidationError unless `key` is a relative path of non-empty
/// components drawn from [A-Za-z0-9._-], none of which is `.` or `..`.
void check_object_key(const std::string& key);

class MemoryObjectStore final : public ObjectStore {
 protected:
  bool do_put_if_absent(const std::string& key, std::string_view bytes) override;
  std::optional<std::string> do_get(const std::string& key) override;
  bool do_exists(const std::string& key) override;
  std::vector<std::string> do_list(const std::string& prefix) override;

 private:
  std::mutex mu_;
  std::map<std::string, std::string> objects_;
};

/// One file per object under `root`. Writes go to a temporary file that is
/// fsynced and then hard-linked into place, so a crash leaves either the
/// complete object or nothing.
class FilesystemObjectStore final : public ObjectStore {
 public:
  explicit FilesystemObjectStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

 protected:
  bool do_put_if_absent(const std::string& key, std::string_view bytes) override;
  std::optional<std::string> do_get(const std::string& key) override;
  bool do_exists(const std::string& key) override;
  std::vector<std::string> do_list(const std::string& prefix) override;

 private:
  std::filesystem::path root_;
};

/// Client for an object server speaking the protocol of
/// `serve_object_store`: `PUT /objects/{key}` with `If-None-Match: *`,
/// `GET`/`HEAD /objects/{key}`, `GET /objects?prefix=`.
class RemoteObjectStore final : public ObjectStore {
 public:
  /// `endpoint` is `http://host:port`.
  explicit RemoteObjectStore(std::string endpoint);
  ~RemoteObjectStore() override;

 protected:
  bool do_put_if_absent(const std::string& key, std::string_view bytes) override;
  std::optional<std::string> do_get(const std::string& key) override;
  bool do_exists(const std::string& key) override;
  std::vector<std::string> do_list(const std::string& prefix) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace opsai::storage
