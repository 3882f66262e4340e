// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include <httplib.h>

#include "opsai/api/client.hpp"
#include "opsai/api/http.hpp"

namespace opsai::api {

// Server ---------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  std::string origin;
  httplib::Server server;

  Impl(Service& s, std::string o) : service(s), origin(std::move(o)) {}

  void cors(httplib::Response& res) const {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  }

  void dispatch(const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    r.body = req.body;
    auto out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
    cors(res);
  }
};

HttpServer::HttpServer(Service& service, std::string cors_origin)
    : impl_(std::make_unique<Impl>(service, std::move(cors_origin))) {
  auto* impl = impl_.get();
  auto handler = [impl](const httplib::Request& req, httplib::Response& res) {
    impl->dispatch(req, res);
  };
  auto& srv = impl_->server;
  srv.Get(".*", handler);
  srv.Post(".*", handler);
  srv.Put(".*", handler);
  srv.Delete(".*", handler);
  srv.Patch(".*", handler);
  srv.Options(".*", [impl](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    impl->cors(res);
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  // httplib also sets SO_REUSEPORT, which would let a second server share
  // the port silently.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  int bound = port == 0 ? srv.bind_to_any_port(host)
                        : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

// Client transports ------------------------------------------------------------

namespace {

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::string base) : base_(std::move(base)) {
    while (!base_.empty() && base_.back() == '/') base_.pop_back();
  }

  Response send(const Request& r) override {
    httplib::Client c(base_);
    c.set_connection_timeout(5);
    c.set_read_timeout(120);
    c.set_write_timeout(60);
    auto target = r.path;
    if (!r.query.empty()) {
      httplib::Params params(r.query.begin(), r.query.end());
      target = httplib::append_query_params(target, params);
    }
    httplib::Result res;
    if (r.method == "GET") {
      res = c.Get(target);
    } else if (r.method == "POST") {
      res = c.Post(target, r.body, "application/json");
    } else {
      throw IoError("unsupported method " + r.method);
    }
    if (!res) {
      throw IoError("cannot reach " + base_ + ": " + httplib::to_string(res.error()));
    }
    return {res->status, res->body, res->get_header_value("Content-Type")};
  }

 private:
  std::string base_;
};

class LocalTransport final : public Transport {
 public:
  explicit LocalTransport(Service& s) : service_(s) {}
  Response send(const Request& r) override { return service_.handle(r); }

 private:
  Service& service_;
};

}  // namespace

std::unique_ptr<Transport> http_transport(const std::string& base_url) {
  return std::make_unique<HttpTransport>(base_url);
}

std::unique_ptr<Transport> local_transport(Service& service) {
  return std::make_unique<LocalTransport>(service);
}

}  // namespace opsai::api
