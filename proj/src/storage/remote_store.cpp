// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include <httplib.h>

#include "opsai/core/error.hpp"
#include "opsai/core/json_util.hpp"
#include "opsai/storage/object_server.hpp"
#include "opsai/storage/object_store.hpp"

namespace opsai::storage {

namespace {

constexpr const char* kObjectPath = "/objects/";

std::string describe(const httplib::Result& res) {
  return res ? "HTTP " + std::to_string(res->status)
             : httplib::to_string(res.error());
}

}  // namespace

// Client ---------------------------------------------------------------------

struct RemoteObjectStore::Impl {
  std::string endpoint;

  // One client per call keeps the store usable from many threads.
  httplib::Client client() const {
    httplib::Client c(endpoint);
    c.set_connection_timeout(5);
    c.set_read_timeout(30);
    c.set_write_timeout(30);
    return c;
  }
};

RemoteObjectStore::RemoteObjectStore(std::string endpoint)
    : impl_(std::make_unique<Impl>()) {
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  impl_->endpoint = std::move(endpoint);
}

RemoteObjectStore::~RemoteObjectStore() = default;

bool RemoteObjectStore::do_put_if_absent(const std::string& key,
                                         std::string_view bytes) {
  auto c = impl_->client();
  httplib::Headers headers{{"If-None-Match", "*"}};
  auto res = c.Put(kObjectPath + key, headers, bytes.data(), bytes.size(),
                   "application/octet-stream");
  if (res && res->status == 201) return true;
  if (res && res->status == 412) return false;
  throw IoError("object put " + key + " failed: " + describe(res));
}

std::optional<std::string> RemoteObjectStore::do_get(const std::string& key) {
  auto c = impl_->client();
  auto res = c.Get(kObjectPath + key);
  if (res && res->status == 200) return res->body;
  if (res && res->status == 404) return std::nullopt;
  throw IoError("object get " + key + " failed: " + describe(res));
}

bool RemoteObjectStore::do_exists(const std::string& key) {
  auto c = impl_->client();
  auto res = c.Head(kObjectPath + key);
  if (res && res->status == 200) return true;
  if (res && res->status == 404) return false;
  throw IoError("object head " + key + " failed: " + describe(res));
}

std::vector<std::string> RemoteObjectStore::do_list(const std::string& prefix) {
  auto c = impl_->client();
  httplib::Params params{{"prefix", prefix}};
  auto res = c.Get("/objects", params, httplib::Headers{});
  if (!res || res->status != 200) {
    throw IoError("object list failed: " + describe(res));
  }
  auto j = parse_json(res->body);
  std::vector<std::string> out;
  json_field::expect_array(j, "keys");
  for (const auto& k : j) {
    if (!k.is_string()) throw IoError("object list returned a non-string key");
    out.push_back(k.get<std::string>());
  }
  return out;
}

// Server ---------------------------------------------------------------------

struct ObjectServer::Impl {
  ObjectStore& store;
  httplib::Server server;

  explicit Impl(ObjectStore& s) : store(s) {}

  static bool key_ok(const std::string& key) {
    try {
      check_object_key(key);
      return true;
    } catch (const ValidationError&) {
      return false;
    }
  }
};

ObjectServer::ObjectServer(ObjectStore& backing)
    : impl_(std::make_unique<Impl>(backing)) {
  auto& srv = impl_->server;
  auto* impl = impl_.get();

  srv.Put(R"(/objects/(.+))", [impl](const httplib::Request& req,
                                     httplib::Response& res) {
    const std::string key = req.matches[1];
    if (!Impl::key_ok(key)) {
      res.status = 400;
      return;
    }
    if (req.get_header_value("If-None-Match") != "*") {
      res.status = 428;
      return;
    }
    res.status = impl->store.put_if_absent(key, req.body) ? 201 : 412;
  });

  srv.Get(R"(/objects/(.+))", [impl](const httplib::Request& req,
                                     httplib::Response& res) {
    const std::string key = req.matches[1];
    if (!Impl::key_ok(key)) {
      res.status = 400;
      return;
    }
    auto bytes = impl->store.get(key);
    if (!bytes) {
      res.status = 404;
      return;
    }
    res.set_content(*bytes, "application/octet-stream");
  });

  srv.Get("/objects", [impl](const httplib::Request& req, httplib::Response& res) {
    Json keys = Json::array();
    for (auto& k : impl->store.list(req.get_param_value("prefix"))) {
      keys.push_back(std::move(k));
    }
    res.set_content(canonical_dump(keys), "application/json");
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                               std::exception_ptr) { res.status = 500; });
}

ObjectServer::~ObjectServer() { stop(); }

int ObjectServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  // httplib also sets SO_REUSEPORT, which would let a second server share
  // the port silently.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  int bound = port == 0 ? srv.bind_to_any_port(host)
                        : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void ObjectServer::run() { impl_->server.listen_after_bind(); }

void ObjectServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace opsai::storage
