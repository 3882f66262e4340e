// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/storage/object_store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <random>

#include "opsai/core/error.hpp"

namespace opsai::storage {

namespace fs = std::filesystem;

bool ObjectStore::put_if_absent(const std::string& key, std::string_view bytes) {
  check_object_key(key);
  ++writes_;
  return do_put_if_absent(key, bytes);
}

std::optional<std::string> ObjectStore::get(const std::string& key) {
  check_object_key(key);
  ++reads_;
  return do_get(key);
}

bool ObjectStore::exists(const std::string& key) {
  check_object_key(key);
  ++reads_;
  return do_exists(key);
}

std::vector<std::string> ObjectStore::list(const std::string& prefix) {
  ++reads_;
  return do_list(prefix);
}

void check_object_key(const std::string& key) {
  auto bad = [&](const std::string& why) {
    throw ValidationError("key", "invalid object key '" + key + "': " + why);
  };
  if (key.empty()) bad("empty");
  std::size_t start = 0;
  while (start <= key.size()) {
    auto end = key.find('/', start);
    if (end == std::string::npos) end = key.size();
    std::string_view part(key.data() + start, end - start);
    if (part.empty()) bad("empty component");
    if (part == "." || part == "..") bad("relative component");
    for (char c : part) {
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
      if (!ok) bad("character not allowed");
    }
    start = end + 1;
  }
}

// Memory ---------------------------------------------------------------------

bool MemoryObjectStore::do_put_if_absent(const std::string& key,
                                         std::string_view bytes) {
  std::lock_guard lock(mu_);
  return objects_.emplace(key, std::string(bytes)).second;
}

std::optional<std::string> MemoryObjectStore::do_get(const std::string& key) {
  std::lock_guard lock(mu_);
  auto it = objects_.find(key);
  if (it == objects_.end()) return std::nullopt;
  return it->second;
}

bool MemoryObjectStore::do_exists(const std::string& key) {
  std::lock_guard lock(mu_);
  return objects_.contains(key);
}

std::vector<std::string> MemoryObjectStore::do_list(const std::string& prefix) {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (auto it = objects_.lower_bound(prefix);
       it != objects_.end() && it->first.starts_with(prefix); ++it) {
    out.push_back(it->first);
  }
  return out;
}

// Filesystem -----------------------------------------------------------------

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw IoError(what + ": " + std::strerror(errno));
}

void fsync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) throw_errno("open " + dir.string());
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw_errno("fsync " + dir.string());
  }
  ::close(fd);
}

// mkdir -p that fsyncs the parent of every directory it creates.
void ensure_dir(const fs::path& dir) {
  if (fs::is_directory(dir)) return;
  ensure_dir(dir.parent_path());
  if (::mkdir(dir.c_str(), 0755) != 0 && errno != EEXIST) {
    throw_errno("mkdir " + dir.string());
  }
  fsync_dir(dir.parent_path());
}

void write_all(int fd, std::string_view bytes, const fs::path& p) {
  while (!bytes.empty()) {
    auto n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("write " + p.string());
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string temp_name() {
  thread_local std::mt19937_64 gen{std::random_device{}()};
  char buf[32];
  std::snprintf(buf, sizeof buf, ".tmp-%016llx",
                static_cast<unsigned long long>(gen()));
  return buf;
}

}  // namespace

FilesystemObjectStore::FilesystemObjectStore(fs::path root)
    : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) {
    throw IoError("storage root " + root_.string() + " is not a directory");
  }
  if (::access(root_.c_str(), W_OK) != 0) {
    throw IoError("storage root " + root_.string() + " is not writable");
  }
}

bool FilesystemObjectStore::do_put_if_absent(const std::string& key,
                                             std::string_view bytes) {
  fs::path target = root_ / key;
  fs::path dir = target.parent_path();
  ensure_dir(dir);
  if (fs::exists(target)) return false;

  fs::path tmp = dir / temp_name();
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
  if (fd < 0) throw_errno("create " + tmp.string());
  try {
    write_all(fd, bytes, tmp);
    if (::fsync(fd) != 0) throw_errno("fsync " + tmp.string());
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);

  int rc = ::link(tmp.c_str(), target.c_str());
  int link_errno = errno;
  ::unlink(tmp.c_str());
  if (rc != 0) {
    if (link_errno == EEXIST) return false;
    errno = link_errno;
    throw_errno("link " + target.string());
  }
  fsync_dir(dir);
  return true;
}

std::optional<std::string> FilesystemObjectStore::do_get(const std::string& key) {
  fs::path p = root_ / key;
  int fd = ::open(p.c_str(), O_RDONLY);
  if (fd < 0) {
    if (errno == ENOENT || errno == ENOTDIR) return std::nullopt;
    throw_errno("open " + p.string());
  }
  std::string out;
  char buf[1 << 16];
  for (;;) {
    auto n = ::read(fd, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw_errno("read " + p.string());
    }
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fd);
  return out;
}

bool FilesystemObjectStore::do_exists(const std::string& key) {
  std::error_code ec;
  return fs::is_regular_file(root_ / key, ec);
}

std::vector<std::string> FilesystemObjectStore::do_list(const std::string& prefix) {
  // Walk only the deepest directory fully named by the prefix.
  auto slash = prefix.rfind('/');
  std::string dir_part = slash == std::string::npos ? "" : prefix.substr(0, slash);
  fs::path start = dir_part.empty() ? root_ : root_ / dir_part;
  std::vector<std::string> out;
  std::error_code ec;
  if (!fs::is_directory(start, ec)) return out;
  for (auto it = fs::recursive_directory_iterator(start, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file(ec)) continue;
    auto name = it->path().filename().string();
    if (name.starts_with(".tmp-")) continue;
    auto key = it->path().lexically_relative(root_).generic_string();
    if (key.starts_with(prefix)) out.push_back(std::move(key));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace opsai::storage
