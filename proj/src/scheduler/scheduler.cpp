#include "mmhop/scheduler/scheduler.hpp"

#include <algorithm>
#include <cmath>

#include "mmhop/common/error.hpp"
#include "mmhop/common/units.hpp"
#include "mmhop/rate/aux_rate.hpp"

namespace mmhop {

std::string to_string(Policy p) {
  switch (p) {
    case Policy::kProposed: return "proposed";
    case Policy::kBaseline1: return "baseline1";
    case Policy::kBaseline2: return "baseline2";
    case Policy::kBaseline3: return "baseline3";
    case Policy::kSingleHop: return "single-hop";
  }
  return "unknown";
}

Policy parse_policy(const std::string& name) {
  for (Policy p : {Policy::kProposed, Policy::kBaseline1, Policy::kBaseline2, Policy::kBaseline3,
                   Policy::kSingleHop})
    if (to_string(p) == name) return p;
  throw ValidationError("unknown policy '" + name +
                        "' (expected proposed, baseline1, baseline2, baseline3, single-hop)");
}

bool uses_learning(Policy p) { return p == Policy::kProposed || p == Policy::kBaseline1; }
bool enforces_slack(Policy p) { return p == Policy::kProposed || p == Policy::kBaseline2; }

void SchedulerConfig::validate() const {
  if (!(nu >= 0.0)) throw ValidationError("scheduler.nu: must be >= 0");
  if (epoch_slots < 1) throw ValidationError("learning.epoch_slots: must be >= 1");
  if (selected_paths < 1) throw ValidationError("flows.selected_paths: must be >= 1");
  if (!(kappa > 0.0)) throw ValidationError("learning.kappa: must be > 0");
  schedule.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("latency.epsilon: must lie in (0, 1)");
  if (!(beta_slots > 0.0)) throw ValidationError("latency.beta_ms: must be > 0");
  if (!(slot_seconds > 0.0)) throw ValidationError("run.slot_ms: must be > 0");
  if (!(packet_bits > 0.0)) throw ValidationError("flows.packet_bits: must be > 0");
}

Scheduler::Scheduler(const Network& net, std::vector<Flow> flows, SchedulerConfig cfg,
                     std::uint64_t seed)
    : net_(net),
      flows_(std::move(flows)),
      cfg_(std::move(cfg)),
      seed_(seed),
      slack_(cfg_.epsilon, cfg_.beta_slots),
      mbs_slack_(cfg_.epsilon, cfg_.beta_slots) {
  cfg_.validate();
  if (flows_.empty()) throw ValidationError("flows: at least one flow required");
  sub_per_flow_ = cfg_.selected_paths;
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    const auto& fl = flows_[f];
    if (fl.id != static_cast<int>(f)) throw ValidationError("flows: ids must be 0..F-1 in order");
    fl.validate(net_.topology());
    sub_per_flow_ = std::min(sub_per_flow_, static_cast<int>(fl.candidate_paths.size()));
    arrivals_.mean_bits.push_back(fl.mean_arrival_bits);
    learner_.flows.push_back(
        FlowLearner::uniform(static_cast<int>(fl.candidate_paths.size()), cfg_.kappa));
    for (const auto& p : fl.candidate_paths)
      for (std::size_t k = 1; k + 1 < p.hops.size(); ++k) next_[{fl.id, p.hops[k]}] = p.hops[k + 1];
    q_.set(fl.id, 0, 0.0);
  }
  arrivals_.packet_bits = cfg_.packet_bits;
  arrivals_.seed = seed_;
  arrivals_.validate();
  learner_.schedule = cfg_.schedule;
  learner_.regret_cap = cfg_.regret_cap;
  selected_.assign(flows_.size(), {});
  epoch_utility_.assign(flows_.size(), {});
  for (std::size_t f = 0; f < flows_.size(); ++f)
    for (int k = 0; k < sub_per_flow_; ++k) mbs_q_.set(subflow_id(static_cast<int>(f), k), 0, 0.0);
  bs_order_ = reverse_topological_bs(net_.topology());
}

double Scheduler::subflow_mean_bits(int flow) const {
  return flows_[static_cast<std::size_t>(flow)].mean_arrival_bits / sub_per_flow_;
}

int Scheduler::next_hop(int flow, int node) const {
  auto it = next_.find({flow, node});
  return it == next_.end() ? -1 : it->second;
}

void Scheduler::select_paths(long epoch) {
  const StepRates rates{cfg_.schedule.xi(epoch), cfg_.schedule.gamma(epoch), cfg_.schedule.iota(epoch)};
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    auto& fl = learner_.flows[f];
    std::vector<double> pi;
    if (uses_learning(cfg_.policy)) {
      // One update per path used in the last epoch, each with its own payoff.
      if (epoch > 0 && epoch_len_used_ > 0)
        for (std::size_t k = 0; k < selected_[f].size(); ++k) {
          const int m = selected_[f][k];
          const double observed = epoch_utility_[f][k] / static_cast<double>(epoch_len_used_);
          learn_step(fl, std::span<const int>(&m, 1), observed, rates, learner_.regret_cap);
        }
      pi = fl.pi;
    } else {
      pi.assign(fl.pi.size(), 1.0 / static_cast<double>(fl.pi.size()));
    }
    selected_[f] = sample_paths(pi, sub_per_flow_, seed_, static_cast<std::uint64_t>(epoch),
                                static_cast<int>(f));
    epoch_utility_[f].assign(selected_[f].size(), 0.0);
  }
  epoch_len_used_ = 0;
}

std::vector<Scheduler::Tx> Scheduler::transmissions() const {
  const auto& topo = net_.topology();
  std::vector<Tx> out;
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    const int fid = static_cast<int>(f);
    for (std::size_t k = 0; k < selected_[f].size(); ++k) {
      const auto& h = flows_[f].candidate_paths[static_cast<std::size_t>(selected_[f][k])].hops;
      out.push_back({fid, 0, h[1], topo.edge_index(0, h[1]), subflow_id(fid, static_cast<int>(k))});
    }
  }
  // Relays on selected paths plus any relay still holding backlog.
  std::map<std::pair<int, int>, bool> relays;
  for (std::size_t f = 0; f < flows_.size(); ++f)
    for (int m : selected_[f]) {
      const auto& h = flows_[f].candidate_paths[static_cast<std::size_t>(m)].hops;
      for (std::size_t k = 1; k + 1 < h.size(); ++k) relays[{static_cast<int>(f), h[k]}] = true;
    }
  for (const auto& [key, bits] : q_.entries())
    if (key.second != 0 && bits > 0.0) relays[key] = true;
  for (const auto& [key, on] : relays) {
    const int nxt = next_hop(key.first, key.second);
    out.push_back({key.first, key.second, nxt, topo.edge_index(key.second, nxt), -1});
  }
  return out;
}

SlotDecision Scheduler::step() {
  const long t = slot_;
  const long tp = t + 1;
  const auto& topo = net_.topology();
  const units::SlotScale scale{net_.bandwidth_hz(), cfg_.slot_seconds};
  const bool enforce = enforces_slack(cfg_.policy);
  SlotDecision dec;
  dec.slot = t;

  if (t % cfg_.epoch_slots == 0) {
    select_paths(t / cfg_.epoch_slots);
    for (const auto& fl : learner_.flows)
      dec.strategies.push_back(uses_learning(cfg_.policy)
                                   ? fl.pi
                                   : std::vector<double>(fl.pi.size(), 1.0 / static_cast<double>(fl.pi.size())));
  }
  dec.active_paths = selected_;
  net_.sample_gains(seed_, t, gains_);

  // SP2 and the SP3 inputs.
  SlotInputs in;
  in.budgets_w = net_.budgets_w();
  in.scale = scale;
  in.enforce_slack = enforce;
  in.cap_margin_nats = cfg_.cap_margin_nats;
  std::vector<int> key;  // warm-start signature: paths, then chain lengths
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    const int fid = static_cast<int>(f);
    const auto& fl = flows_[f];
    for (std::size_t k = 0; k < selected_[f].size(); ++k) {
      const int m = selected_[f][k];
      const auto& h = fl.candidate_paths[static_cast<std::size_t>(m)].hops;
      SubflowInput si;
      si.subflow = subflow_id(fid, static_cast<int>(k));
      si.flow = fid;
      si.path = m;
      si.hops = h;
      for (std::size_t e = 0; e + 1 < h.size(); ++e)
        si.edge_gains.push_back(gains_[static_cast<std::size_t>(topo.edge_index(h[e], h[e + 1]))]);
      si.weight = y_.get(si.subflow);
      const double mean = subflow_mean_bits(fid);
      si.mbs_slack_bits = cfg_.realized_slack ? mbs_slack_.realized_slack(si.subflow, 0, mean)
                                              : mbs_slack_.slack(si.subflow, 0, mean, tp);
      for (std::size_t e = 1; e + 1 < h.size(); ++e)
        si.relay_slack_bits.push_back(cfg_.realized_slack ? slack_.realized_slack(fid, h[e], mean)
                                                          : slack_.slack(fid, h[e], mean, tp));
      si.cap_bits = fl.rate_cap_bits;
      dec.phi_bits.push_back(aux_optimum(si.weight, cfg_.nu, si.cap_bits));
      in.subflows.push_back(std::move(si));
      key.push_back(m);
    }
  }

  // SP3.
  std::optional<ScaProblem> prob;
  std::optional<ScaIterate> sol;
  // When the capped latency targets still exceed the budgets, the MBS
  // targets are scaled down first and the relay targets only if that is not
  // enough; each scale is the largest feasible one found by bisection.
  const SlotInputs full = in;
  auto scaled = [&](double mbs_theta, double relay_theta) {
    SlotInputs out = full;
    for (auto& si : out.subflows) {
      si.mbs_slack_bits = std::min(si.mbs_slack_bits, mbs_theta * std::max(si.mbs_slack_bits, 0.0));
      for (double& r : si.relay_slack_bits) r = std::min(r, relay_theta * std::max(r, 0.0));
    }
    return out;
  };
  auto feasible = [&](const SlotInputs& trial) {
    try {
      const ScaProblem pr = build_subproblem(trial);
      interior_point(pr, ScaLayout::of(pr));
      return true;
    } catch (const InfeasibleInstance&) {
      return false;
    }
  };
  auto largest = [&](auto&& make) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 12; ++i) {
      const double mid = 0.5 * (lo + hi);
      (feasible(make(mid)) ? lo : hi) = mid;
    }
    return lo;
  };
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      BuildReport rep;
      prob = build_subproblem(in, &rep);
      dec.capped = rep.capped;
      std::vector<int> k2 = key;
      for (const auto& s : prob->subflows) k2.push_back(static_cast<int>(s.relays.size()));
      std::optional<Eigen::VectorXd> warm;
      if (cfg_.warm_start && warm_ && k2 == warm_key_) warm = warm_;
      sol = sca_solve(*prob, cfg_.sca, warm);
      dec.sca_iterations = sol->iterations;
      warm_ = sol->z;
      warm_key_ = std::move(k2);
      break;
    } catch (const InfeasibleInstance&) {
      prob.reset();
      if (!enforce || attempt == 1) {
        dec.fallback = true;
        dec.event = "sca_infeasible";
        break;
      }
      if (feasible(scaled(0.0, 1.0))) {
        in = scaled(largest([&](double th) { return scaled(th, 1.0); }), 1.0);
        dec.event = "slack_relaxed: mbs";
      } else {
        in = scaled(0.0, largest([&](double th) { return scaled(0.0, th); }));
        dec.event = "slack_relaxed: relay";
      }
    } catch (const SolverError& e) {
      prob.reset();
      dec.fallback = true;
      dec.event = std::string("solver_error: ") + e.what();
      break;
    }
  }
  if (dec.fallback) warm_.reset();
  if (dec.capped > 0 && dec.event.empty()) dec.event = "slack_capped";

  // Powers: program output first, then each BS tops up with its leftover.
  const auto txs = transmissions();
  PowerVector pv(net_.budgets_w());
  std::map<std::pair<int, int>, double> chain_d;  // (flow, relay) -> D in nats
  if (sol) {
    for (std::size_t si = 0; si < prob->subflows.size(); ++si) {
      const auto& s = prob->subflows[si];
      for (std::size_t k = 0; k < sol->power_w[si].size(); ++k)
        pv.set(s.hops[k], s.hops[k + 1], s.flow, sol->power_w[si][k]);
      for (const auto& r : s.relays) chain_d[{s.flow, r.node}] = r.d_nats;
      dec.x_bits.push_back(scale.nats_to_bits(sol->x_nats[si]));
    }
  }
  auto q_at = [&](int flow, int node) { return topo.is_bs(node) ? q_.get(flow, node) : 0.0; };
  auto q_tx = [&](const Tx& tx) { return tx.from == 0 ? mbs_q_.get(tx.subflow, 0) : q_.get(tx.flow, tx.from); };
  for (int node : bs_order_) {
    std::vector<std::size_t> here;
    for (std::size_t k = 0; k < txs.size(); ++k)
      if (txs[k].from == node) here.push_back(k);
    if (here.empty()) continue;
    const double budget = net_.budgets_w()[static_cast<std::size_t>(node)];
    if (dec.fallback) {
      // Backlog-proportional split of the whole budget.
      double total = 0.0;
      for (auto k : here) total += q_tx(txs[k]);
      for (auto k : here) {
        const double share = total > 0.0 ? q_tx(txs[k]) / total
                                         : 1.0 / static_cast<double>(here.size());
        pv.set(node, txs[k].to, txs[k].flow, pv.get(node, txs[k].to, txs[k].flow) + share * budget);
      }
      continue;
    }
    double used = 0.0;
    std::vector<FillItem> items;
    for (auto k : here) {
      const auto& tx = txs[k];
      const double pa = pv.get(node, tx.to, tx.flow);
      used += pa;
      const double g = gains_[static_cast<std::size_t>(tx.edge)];
      FillItem it;
      it.gain = g / (1.0 + g * pa);
      it.weight = std::max(q_tx(tx) - q_at(tx.flow, tx.to), 0.0);
      const double drain = std::expm1(scale.bits_to_nats(q_tx(tx))) / g;
      it.cap_w = std::max(drain - pa, 0.0);
      if (enforce) {
        auto d = chain_d.find({tx.flow, tx.to});
        if (d != chain_d.end()) {
          const int nn = next_hop(tx.flow, tx.to);
          const double g_out = gains_[static_cast<std::size_t>(topo.edge_index(tx.to, nn))];
          const double r_out = std::log1p(pv.get(tx.to, nn, tx.flow) * g_out);
          const double lim = std::expm1(std::max(r_out - d->second, 0.0)) / g;
          it.cap_w = std::min(it.cap_w, std::max(lim - pa, 0.0));
        }
      }
      items.push_back(it);
    }
    const auto extra = water_fill(items, std::max(budget - used, 0.0));
    for (std::size_t j = 0; j < here.size(); ++j) {
      const auto& tx = txs[here[j]];
      if (extra[j] > 0.0) pv.set(node, tx.to, tx.flow, pv.get(node, tx.to, tx.flow) + extra[j]);
    }
  }

  // Realised service from the start-of-slot backlogs.
  std::vector<double> cap(txs.size(), 0.0);
  for (std::size_t k = 0; k < txs.size(); ++k) {
    const auto& tx = txs[k];
    cap[k] = scale.nats_to_bits(std::log1p(pv.get(tx.from, tx.to, tx.flow) *
                                           gains_[static_cast<std::size_t>(tx.edge)]));
  }
  std::vector<double> served(txs.size(), 0.0);
  std::vector<double> mbs_served(flows_.size(), 0.0);
  for (std::size_t k = 0; k < txs.size(); ++k) {
    served[k] = std::min(q_tx(txs[k]), cap[k]);
    if (txs[k].from == 0) mbs_served[static_cast<std::size_t>(txs[k].flow)] += served[k];
  }

  if (dec.fallback) {
    for (std::size_t k = 0; k < txs.size(); ++k)
      if (txs[k].subflow >= 0)
        dec.x_bits.push_back(std::min(cap[k], flows_[static_cast<std::size_t>(txs[k].flow)].rate_cap_bits));
  }

  // SP1 feedback: each selected path's own utility, fed by its subflow queue.
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    const int fid = static_cast<int>(f);
    EdgeRates rates;
    for (std::size_t k = 0; k < txs.size(); ++k)
      if (txs[k].flow == fid) rates[{txs[k].from, txs[k].to}] = cap[k];
    const double norm = subflow_mean_bits(fid);
    QueueMatrix view = q_;
    for (std::size_t k = 0; k < selected_[f].size(); ++k) {
      std::vector<double> pi(flows_[f].candidate_paths.size(), 0.0);
      pi[static_cast<std::size_t>(selected_[f][k])] = 1.0;
      view.set(fid, 0, mbs_q_.get(subflow_id(fid, static_cast<int>(k)), 0));
      const double u = flow_utility(view, rates, flows_[f], pi);
      epoch_utility_[f][k] += norm > 0.0 ? u / (norm * norm) : u;
    }
  }
  ++epoch_len_used_;

  // Queue, latency-slack and virtual-queue updates.
  std::map<std::pair<int, int>, double> received;
  std::map<std::pair<int, int>, double> relay_served;
  std::map<std::pair<int, int>, std::pair<double, double>> offered;  // (in, out) link rates
  dec.delivered_bits.assign(flows_.size(), 0.0);
  for (std::size_t k = 0; k < txs.size(); ++k) {
    const auto& tx = txs[k];
    if (topo.is_bs(tx.to)) {
      received[{tx.flow, tx.to}] += served[k];
      offered[{tx.flow, tx.to}].first += cap[k];
    } else {
      dec.delivered_bits[static_cast<std::size_t>(tx.flow)] += served[k];
    }
    if (tx.from != 0) {
      relay_served[{tx.flow, tx.from}] += served[k];
      offered[{tx.flow, tx.from}].second += cap[k];
    }
  }
  dec.arrived_bits = arrivals_.sample_all(static_cast<std::uint64_t>(t));
  for (std::size_t k = 0; k < txs.size(); ++k) {
    if (txs[k].from != 0) continue;
    const int s = txs[k].subflow;
    const double share = dec.arrived_bits[static_cast<std::size_t>(txs[k].flow)] / sub_per_flow_;
    mbs_q_.set(s, 0, step_mbs_queue(mbs_q_.get(s, 0), served[k], share));
    mbs_slack_.record(s, 0, cfg_.realized_slack ? served[k] : cap[k], share);
  }
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    double total = 0.0;
    for (int k = 0; k < sub_per_flow_; ++k) total += mbs_q_.get(subflow_id(static_cast<int>(f), k), 0);
    q_.set(static_cast<int>(f), 0, total);
  }
  std::map<std::pair<int, int>, bool> touched;
  for (const auto& [k, v] : received) touched[k] = true;
  for (const auto& [k, v] : relay_served) touched[k] = true;
  for (const auto& [k, on] : touched) {
    const double s = relay_served.count(k) ? relay_served[k] : 0.0;
    const double r = received.count(k) ? received[k] : 0.0;
    q_.set(k.first, k.second, step_scbs_queue(q_.get(k.first, k.second), s, r));
    if (cfg_.realized_slack) slack_.record(k.first, k.second, s, r);
    else slack_.record(k.first, k.second, offered[k].second, offered[k].first);
  }
  for (std::size_t s = 0; s < dec.phi_bits.size(); ++s) {
    const int id = in.subflows[s].subflow;
    y_.set(id, step_virtual_queue(y_.get(id), dec.phi_bits[s], s < dec.x_bits.size() ? dec.x_bits[s] : 0.0));
  }

  // Metrics: the MBS and every relay that is selected or still holds backlog.
  std::map<std::pair<int, int>, bool> report;
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    report[{static_cast<int>(f), 0}] = true;
    for (int m : selected_[f]) {
      const auto& h = flows_[f].candidate_paths[static_cast<std::size_t>(m)].hops;
      for (std::size_t k = 1; k + 1 < h.size(); ++k) report[{static_cast<int>(f), h[k]}] = true;
    }
  }
  for (const auto& [k, bits] : q_.entries())
    if (bits > 0.0) report[k] = true;
  for (const auto& [k, on] : report) {
    NodeSample ns;
    ns.flow = k.first;
    ns.node = k.second;
    ns.queue_bits = q_.get(k.first, k.second);
    const double mean = k.second == 0 ? flows_[static_cast<std::size_t>(k.first)].mean_arrival_bits
                                      : subflow_mean_bits(k.first);
    ns.delay_slots = mean > 0.0 ? little_delay(ns.queue_bits, mean) : 0.0;
    const double out = k.second == 0 ? mbs_served[static_cast<std::size_t>(k.first)]
                                     : (relay_served.count(k) ? relay_served[k] : 0.0);
    ns.rate_bps = out / cfg_.slot_seconds;
    dec.samples.push_back(ns);
  }
  // Drop idle relay entries so the matrix only holds live backlogs.
  std::vector<std::pair<int, int>> idle;
  for (const auto& [k, bits] : q_.entries())
    if (k.second != 0 && bits == 0.0 && !report.count(k)) idle.push_back(k);
  for (const auto& k : idle) q_.erase(k.first, k.second);

  dec.powers = std::move(pv);
  if (cfg_.keep_sca_records && sol) {
    dec.sca_problem = std::move(prob);
    dec.sca_solution = std::move(sol);
  }
  ++slot_;
  return dec;
}

}  // namespace mmhop
