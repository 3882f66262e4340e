// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/cli/simulate.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "opsai/game/rng.hpp"

namespace opsai::cli {

BotProfile bot_profile(const BotProfile& base, std::size_t index) {
  BotProfile p = base;
  p.seed = game::splitmix64(base.seed + index);
  return p;
}

std::vector<storage::ReferenceEntry> simulate_bots(api::Client& client,
                                                   const game::LevelCatalog& levels,
                                                   const SimulateOptions& options) {
  options.profile.validate();
  const auto& level = levels.get(options.level_id);
  const auto* solution = levels.solution(options.level_id);
  const auto cfg = game::SimConfig::for_level(level, options.sim);

  std::vector<storage::ReferenceEntry> out(options.bots);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      auto i = next.fetch_add(1);
      if (i >= options.bots) return;
      try {
        auto s = play_bot_session(level, solution, bot_profile(options.profile, i),
                                  "bot-" + std::to_string(i), cfg);
        client.create_session(s.header.player_id, s.header.level_id,
                              s.header.session_id, s.header.started_at);
        for (const auto& batch : batches(s.events, options.max_batch)) {
          client.append_events(s.header.session_id, batch);
        }
        out[i] = client.finalize(s.header.session_id);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = options.bots;
        return;
      }
    }
  };

  auto threads_n = std::max<std::size_t>(1, std::min(options.concurrency, options.bots));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < threads_n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace opsai::cli
