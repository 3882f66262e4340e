// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

// opsai: operator tool for the telemetry service.

#include <signal.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "opsai/api/client.hpp"
#include "opsai/api/config.hpp"
#include "opsai/api/http.hpp"
#include "opsai/api/service.hpp"
#include "opsai/cli/simulate.hpp"
#include "opsai/core/error.hpp"
#include "opsai/game/level.hpp"
#include "opsai/preprocess/finalize.hpp"
#include "opsai/storage/object_server.hpp"

using namespace opsai;

namespace {

enum Exit { kOk = 0, kValidation = 1, kNotFound = 2, kIo = 3 };

void emit(const Json& j) {
  std::cout << canonical_dump(j) << '\n';
}

void diag(const std::string& code, const std::string& message) {
  std::cerr << canonical_dump(Json{{"error", {{"code", code}, {"detail", message}}}}) << '\n';
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Settings shared by every subcommand that touches the service.
struct Settings {
  std::string config_file;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON config file");
    auto flag = [&](const char* name, const char* key, const char* help) {
      app->add_option_function<std::string>(
          name, [this, key](const std::string& v) { overrides[key] = v; }, help);
    };
    flag("--levels-dir", "levels_dir", "directory of level files");
    flag("--storage-backend", "storage_backend", "filesystem | memory | remote");
    flag("--storage-endpoint", "storage_endpoint", "object server URL for the remote backend");
    flag("--index-backend", "index_backend", "embedded-kv | memory");
    flag("--stall-p", "stall_p", "default stall probability");
    flag("--verify-seeds", "verify_seeds", "default verification seed count");
  }

  api::ServiceConfig resolve() const {
    std::optional<std::filesystem::path> file;
    if (!config_file.empty()) file = config_file;
    return api::resolve_config(file, overrides, api::process_env());
  }
};

api::ServiceOptions service_options(const api::ServiceConfig& cfg) {
  api::ServiceOptions o;
  o.sim.stall_probability = cfg.stall_p;
  o.sim.verify_seeds = cfg.verify_seeds;
  o.analytics.peer_k = cfg.peer_k;
  o.analytics.support_theta = cfg.support_theta;
  return o;
}

// A service endpoint given as a URL, or a storage root served in-process.
struct Target {
  std::unique_ptr<storage::Storage> storage;
  std::unique_ptr<game::LevelCatalog> levels;
  std::unique_ptr<api::Service> service;
  std::unique_ptr<api::Client> client;
};

bool is_url(const std::string& s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

Target open_target(std::string spec, api::ServiceConfig cfg) {
  Target t;
  if (spec.empty()) spec = cfg.storage.root.string();
  if (spec.empty()) {
    throw ValidationError("store", "no store given; pass --store or set OPSAI_STORAGE_ROOT");
  }
  if (is_url(spec)) {
    t.client = std::make_unique<api::Client>(api::http_transport(spec));
    return t;
  }
  cfg.storage.root = spec;
  t.storage = storage::open_storage(cfg.storage);
  t.levels = std::make_unique<game::LevelCatalog>(cfg.levels_dir);
  t.service = std::make_unique<api::Service>(*t.storage, *t.levels, service_options(cfg));
  t.client = std::make_unique<api::Client>(api::local_transport(*t.service));
  return t;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const api::ApiError& e) {
    diag(e.code(), e.what());
    if (e.code() == "not_found") return kNotFound;
    return e.status() >= 500 ? kIo : kValidation;
  } catch (const NotFoundError& e) {
    diag(e.code(), e.what());
    return kNotFound;
  } catch (const IoError& e) {
    diag(e.code(), e.what());
    return kIo;
  } catch (const Error& e) {
    diag(e.code(), e.what());
    return kValidation;
  } catch (const std::exception& e) {
    diag("internal", e.what());
    return kIo;
  }
}

// serve ----------------------------------------------------------------------

int run_serve(const Settings& settings) {
  api::ServiceConfig cfg;
  std::unique_ptr<storage::Storage> store;
  std::unique_ptr<game::LevelCatalog> levels;
  try {
    cfg = settings.resolve();
    if (cfg.storage.root.empty() && cfg.storage.backend == storage::ObjectBackend::filesystem) {
      throw ValidationError("storage_root", "storage_root is required");
    }
    store = storage::open_storage(cfg.storage);
    levels = std::make_unique<game::LevelCatalog>(cfg.levels_dir);
  } catch (const Error& e) {
    diag(e.code(), e.what());
    return kValidation;
  }

  api::Service service(*store, *levels, service_options(cfg));
  api::HttpServer server(service, cfg.cors_origin);
  auto [host, port] = api::split_host_port(cfg.bind_addr);
  int bound = 0;
  try {
    bound = server.bind(host, port);
  } catch (const IoError& e) {
    diag(e.code(), e.what());
    return kIo;
  }

  // Stop cleanly on SIGINT/SIGTERM. Acknowledged appends are already on disk.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::thread([&server, set] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  }).detach();

  emit(Json{{"listening", host + ":" + std::to_string(bound)}});
  std::cout.flush();
  server.run();
  return kOk;
}

int run_object_store(const std::string& root, const std::string& bind) {
  storage::FilesystemObjectStore store(root);
  storage::ObjectServer server(store);
  auto [host, port] = api::split_host_port(bind);
  int bound = server.bind(host, port);
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::thread([&server, set] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  }).detach();
  emit(Json{{"listening", host + ":" + std::to_string(bound)}});
  std::cout.flush();
  server.run();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opsai: gameplay telemetry service and tools"};
  app.require_subcommand(1);
  Settings settings;

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  settings.attach(serve);
  serve->add_option_function<std::string>(
      "--storage-root", [&](const std::string& v) { settings.overrides["storage_root"] = v; },
      "storage root directory");
  serve->add_option_function<std::string>(
      "--bind", [&](const std::string& v) { settings.overrides["bind_addr"] = v; },
      "host:port to listen on");

  auto* level = app.add_subcommand("level", "level tools");
  level->require_subcommand(1);
  auto* validate = level->add_subcommand("validate", "check a level file");
  std::string level_file;
  validate->add_option("file", level_file)->required();

  auto* simulate = app.add_subcommand("simulate", "generate bot sessions");
  settings.attach(simulate);
  cli::SimulateOptions sim;
  std::string profile_arg, out;
  simulate->add_option("--level", sim.level_id)->required();
  simulate->add_option("--bots", sim.bots)->required()->check(CLI::PositiveNumber);
  simulate->add_option("--profile", profile_arg, "profile JSON or a path to one");
  simulate->add_option("--out", out, "service URL or storage root")->required();
  simulate->add_option("--concurrency", sim.concurrency)->check(CLI::PositiveNumber);
  simulate->add_option("--batch", sim.max_batch)->check(CLI::PositiveNumber);

  auto* query = app.add_subcommand("query", "list reference entries");
  settings.attach(query);
  std::string store;
  std::map<std::string, std::string> qparams;
  query->add_option("--store", store, "service URL or storage root");
  auto qflag = [&](const char* name, const char* key) {
    query->add_option_function<std::string>(
        name, [&, key](const std::string& v) { qparams[key] = v; });
  };
  qflag("--level", "level");
  qflag("--player", "player");
  qflag("--solved", "solved");
  qflag("--limit", "limit");
  qflag("--started-from", "started_from");
  qflag("--started-to", "started_to");
  qflag("--min-actions", "min_actions");
  qflag("--max-actions", "max_actions");
  bool all = false;
  query->add_flag("--all", all, "list every session");

  auto* analyze = app.add_subcommand("analyze", "print a session's analytics payload");
  settings.attach(analyze);
  std::string session_id;
  std::optional<std::size_t> k;
  analyze->add_option("session_id", session_id)->required();
  analyze->add_option("--k", k)->check(CLI::PositiveNumber);
  analyze->add_option("--store", store, "service URL or storage root");

  auto* reindex = app.add_subcommand("reindex", "rebuild reference entries from stored logs");
  settings.attach(reindex);
  bool dry_run = false;
  reindex->add_option("--store", store, "storage root");
  reindex->add_flag("--dry-run", dry_run, "report differences without writing");

  auto* objects = app.add_subcommand("object-store", "object server for the remote backend");
  objects->require_subcommand(1);
  auto* objects_serve = objects->add_subcommand("serve", "serve a directory of objects");
  std::string objects_root, objects_bind = "127.0.0.1:9090";
  objects_serve->add_option("--root", objects_root)->required();
  objects_serve->add_option("--bind", objects_bind);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  if (serve->parsed()) return run_serve(settings);

  if (validate->parsed()) {
    return guarded([&] {
      auto findings = game::validate_level_text(read_text(level_file));
      for (const auto& f : findings) emit(Json{{"element", f.element}, {"message", f.message}});
      return findings.empty() ? kOk : kValidation;
    });
  }

  if (simulate->parsed()) {
    return guarded([&] {
      auto cfg = settings.resolve();
      if (!profile_arg.empty()) {
        auto text = profile_arg.front() == '{' ? profile_arg : read_text(profile_arg);
        sim.profile = cli::bot_profile_from_json(parse_json(text));
      }
      sim.sim.stall_probability = cfg.stall_p;
      sim.sim.verify_seeds = cfg.verify_seeds;
      auto target = open_target(out, cfg);
      game::LevelCatalog levels(cfg.levels_dir);
      if (levels.find(sim.level_id) == nullptr) {
        throw NotFoundError("no level '" + sim.level_id + "'");
      }
      for (const auto& e : cli::simulate_bots(*target.client, levels, sim)) {
        emit(storage::to_json(e));
      }
      return kOk;
    });
  }

  if (query->parsed()) {
    return guarded([&] {
      auto target = open_target(store, settings.resolve());
      if (all) qparams["all"] = "true";
      for (const auto& e : target.client->query(qparams)) emit(storage::to_json(e));
      return kOk;
    });
  }

  if (analyze->parsed()) {
    return guarded([&] {
      auto target = open_target(store, settings.resolve());
      emit(target.client->analytics(session_id, k));
      return kOk;
    });
  }

  if (reindex->parsed()) {
    return guarded([&] {
      auto cfg = settings.resolve();
      if (is_url(store)) throw ValidationError("store", "reindex needs a storage root");
      if (!store.empty()) cfg.storage.root = store;
      auto storage = storage::open_storage(cfg.storage);
      auto report = preprocess::reindex(*storage, !dry_run);
      for (const auto& d : report.diffs) {
        emit(Json{{"session_id", d.session_id}, {"fields", d.fields}});
      }
      emit(Json{{"scanned", report.scanned}, {"diffs", report.diffs.size()}});
      return kOk;
    });
  }

  if (objects_serve->parsed()) {
    return guarded([&] { return run_object_store(objects_root, objects_bind); });
  }
  return kValidation;
}
