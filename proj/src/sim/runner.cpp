#include "mmhop/sim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

namespace mmhop {

MetricsLog run_one(const ScenarioConfig& cfg, Policy policy, double subflow_gbps, std::uint64_t seed,
                   std::vector<ScaRecord>* dump) {
  const bool single = policy == Policy::kSingleHop;
  Scenario sc = single ? build_single_hop(cfg, subflow_gbps) : build_multihop(cfg, seed, subflow_gbps);
  BlockageParams blk = cfg.blockage;
  blk.enabled = single;
  const Network net(sc.topology, cfg.radio, blk);
  Scheduler sched(net, sc.flows, cfg.scheduler_config(policy), seed);

  MetricsLog log;
  log.policy = to_string(policy);
  log.arrival_gbps = subflow_gbps;
  log.slot_seconds = cfg.slot_seconds();
  log.subflows_per_flow = cfg.flows.selected_paths;
  for (const auto& fl : sc.flows)
    for (const auto& p : fl.candidate_paths)
      for (std::size_t k = 0; k + 1 < p.hops.size(); ++k) log.hop_of[{fl.id, p.hops[k]}] = static_cast<int>(k);

  SeedTotals tot;
  tot.seed = seed;
  tot.slots = cfg.run.slots;
  tot.arrived_bits.assign(sc.flows.size(), 0.0);
  tot.delivered_bits.assign(sc.flows.size(), 0.0);
  log.rows.reserve(static_cast<std::size_t>(cfg.run.slots) * sc.flows.size() * 3);

  for (long t = 0; t < cfg.run.slots; ++t) {
    SlotDecision d = sched.step();
    for (const auto& s : d.samples)
      log.rows.push_back({d.slot, seed, s.flow, s.node, s.queue_bits, s.delay_slots, s.rate_bps});
    for (std::size_t f = 0; f < sc.flows.size(); ++f) {
      tot.arrived_bits[f] += d.arrived_bits[f];
      tot.delivered_bits[f] += d.delivered_bits[f];
    }
    for (std::size_t f = 0; f < d.strategies.size(); ++f)
      log.strategies.push_back({d.slot, seed, static_cast<int>(f), d.strategies[f]});
    if (!d.event.empty()) {
      log.events.push_back({d.slot, seed, d.event});
      spdlog::debug("seed {} slot {}: {}", seed, d.slot, d.event);
    }
    if (dump && d.sca_problem && d.sca_solution) {
      ScaRecord rec;
      rec.slot = d.slot;
      rec.seed = seed;
      rec.policy = log.policy;
      rec.problem = *d.sca_problem;
      rec.objective = d.sca_solution->objective;
      rec.x_nats = d.sca_solution->x_nats;
      rec.power_w = d.sca_solution->power_w;
      rec.iterations = d.sca_solution->iterations;
      dump->push_back(std::move(rec));
    }
  }
  log.totals.push_back(std::move(tot));
  return log;
}

MetricsLog run_seeds(const ScenarioConfig& cfg, Policy policy, double subflow_gbps,
                     const std::vector<std::uint64_t>& seeds, std::vector<ScaRecord>* dump) {
  const std::size_t n = seeds.size();
  std::vector<MetricsLog> logs(n);
  std::vector<std::vector<ScaRecord>> dumps(n);
  std::vector<std::exception_ptr> errors(n);
  std::size_t workers = cfg.run.threads > 0 ? static_cast<std::size_t>(cfg.run.threads)
                                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        logs[i] = run_one(cfg, policy, subflow_gbps, seeds[i], dump ? &dumps[i] : nullptr);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  MetricsLog out;
  out.policy = to_string(policy);
  out.arrival_gbps = subflow_gbps;
  out.slot_seconds = cfg.slot_seconds();
  out.subflows_per_flow = cfg.flows.selected_paths;
  for (std::size_t i = 0; i < n; ++i) {
    out.merge(logs[i]);
    if (dump) dump->insert(dump->end(), dumps[i].begin(), dumps[i].end());
  }
  return out;
}

}  // namespace mmhop
