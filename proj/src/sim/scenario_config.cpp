#include "mmhop/sim/scenario_config.hpp"

#include <fstream>
#include <random>
#include <set>

#include "mmhop/common/error.hpp"
#include "mmhop/common/rng.hpp"

namespace mmhop {

using nlohmann::json;

namespace {

// Reads one section, remembering which keys were consumed so leftovers can be
// reported as typos.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) throw ValidationError(name_ + ": expected an object");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    used_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(name_ + "." + key + ": wrong type");
    }
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items())
      if (!used_.count(k)) throw ValidationError(name_ + "." + k + ": unknown key");
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field + ": " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(topology.num_scbs >= 0, "topology.num_scbs", "must be >= 0");
  require(topology.relays_per_path >= 1, "topology.relays_per_path", "must be >= 1");
  require(topology.num_scbs % topology.relays_per_path == 0, "topology.num_scbs",
          "must be a multiple of relays_per_path");
  require(topology.distance_min_m >= 1.0, "topology.distance_min_m", "must be >= 1");
  require(topology.distance_max_m >= topology.distance_min_m, "topology.distance_max_m",
          "must be >= distance_min_m");
  require(topology.single_hop_distance_m >= 1.0, "topology.single_hop_distance_m", "must be >= 1");
  require(flows.count >= 1, "flows.count", "must be >= 1");
  require(flows.candidate_paths >= 1, "flows.candidate_paths", "must be >= 1");
  require(flows.selected_paths >= 1 && flows.selected_paths <= flows.candidate_paths,
          "flows.selected_paths", "must lie in [1, candidate_paths]");
  require(!flows.arrival_gbps.empty(), "flows.arrival_gbps", "must be nonempty");
  for (double g : flows.arrival_gbps) require(g >= 0.0, "flows.arrival_gbps", "entries must be >= 0");
  require(flows.rate_cap_gbps > 0.0, "flows.rate_cap_gbps", "must be > 0");
  require(flows.packet_bits > 0.0, "flows.packet_bits", "must be > 0");
  radio.validate();
  require(blockage.los_scale_m > 0.0, "blockage.los_scale_m", "must be > 0");
  require(blockage.penalty_db >= 0.0, "blockage.penalty_db", "must be >= 0");
  require(beta_ms > 0.0, "latency.beta_ms", "must be > 0");
  require(epsilon > 0.0 && epsilon < 1.0, "latency.epsilon", "must lie in (0, 1)");
  require(kappa > 0.0, "learning.kappa", "must be > 0");
  schedule.validate();
  require(epoch_slots >= 1, "learning.epoch_slots", "must be >= 1");
  require(regret_cap > 0.0, "learning.regret_cap", "must be > 0");
  require(nu >= 0.0, "scheduler.nu", "must be >= 0");
  require(cap_margin_nats >= 0.0, "scheduler.cap_margin_nats", "must be >= 0");
  require(run.slots >= 1, "run.slots", "must be >= 1");
  require(!run.seeds.empty(), "run.seeds", "must be nonempty");
  require(run.slot_ms > 0.0, "run.slot_ms", "must be > 0");
  require(run.threads >= 0, "run.threads", "must be >= 0");
  for (double t : run.ccdf_thresholds_ms) require(t >= 0.0, "run.ccdf_thresholds_ms", "entries must be >= 0");
}

double ScenarioConfig::flow_mean_bits(double subflow_gbps) const {
  return subflow_gbps * 1e9 * slot_seconds() * flows.selected_paths;
}

SchedulerConfig ScenarioConfig::scheduler_config(Policy p) const {
  SchedulerConfig c;
  c.policy = p;
  c.nu = nu;
  c.epoch_slots = epoch_slots;
  c.selected_paths = p == Policy::kSingleHop ? 1 : flows.selected_paths;
  c.kappa = kappa;
  c.schedule = schedule;
  c.regret_cap = regret_cap;
  c.epsilon = epsilon;
  c.beta_slots = beta_slots();
  c.slot_seconds = slot_seconds();
  c.packet_bits = flows.packet_bits;
  c.cap_margin_nats = cap_margin_nats;
  c.warm_start = warm_start;
  c.keep_sca_records = run.dump_sca;
  // Per-slot solves need far less than the library defaults.
  c.sca.barrier.compute_kkt = false;
  c.sca.barrier.gap_tol = 1e-5;
  c.sca.barrier.mu = 50.0;
  c.sca.barrier.newton_tol = 1e-6;
  c.sca.tol = 1e-4;
  return c;
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  static const std::set<std::string> sections{"topology", "flows",   "radio",     "blockage",
                                              "latency",  "learning", "scheduler", "run"};
  for (const auto& [k, v] : j.items())
    if (!sections.count(k)) throw ValidationError(k + ": unknown section");

  ScenarioConfig c;
  Section topo(j, "topology");
  topo.read("num_scbs", c.topology.num_scbs);
  topo.read("relays_per_path", c.topology.relays_per_path);
  topo.read("distance_min_m", c.topology.distance_min_m);
  topo.read("distance_max_m", c.topology.distance_max_m);
  topo.read("single_hop_distance_m", c.topology.single_hop_distance_m);
  topo.finish();

  Section fl(j, "flows");
  fl.read("count", c.flows.count);
  fl.read("candidate_paths", c.flows.candidate_paths);
  fl.read("selected_paths", c.flows.selected_paths);
  fl.read("arrival_gbps", c.flows.arrival_gbps);
  fl.read("rate_cap_gbps", c.flows.rate_cap_gbps);
  fl.read("packet_bits", c.flows.packet_bits);
  fl.finish();

  Section ra(j, "radio");
  auto& r = c.radio;
  ra.read("mbs_power_dbm", r.mbs_power_dbm);
  ra.read("scbs_power_dbm", r.scbs_power_dbm);
  ra.read("mbs_antenna_dbi", r.mbs_antenna_dbi);
  ra.read("scbs_antenna_dbi", r.scbs_antenna_dbi);
  ra.read("ue_antenna_dbi", r.ue_antenna_dbi);
  ra.read("antennas", r.antennas);
  ra.read("bandwidth_hz", r.bandwidth_hz);
  ra.read("carrier_ghz", r.carrier_ghz);
  ra.read("sidelobe_gain", r.sidelobe_gain);
  ra.read("beamwidth_rad", r.beamwidth_rad);
  ra.read("misalignment_rad", r.misalignment_rad);
  double imax_db = -1.0;
  bool has_imax = j.contains("radio") && j.at("radio").contains("max_interference_db");
  ra.read("max_interference_db", imax_db);
  if (has_imax) r.max_interference = units::db_to_linear(imax_db);
  ra.read("csi_error", r.csi_error);
  ra.read("noise_figure_db", r.noise_figure_db);
  ra.finish();

  Section bl(j, "blockage");
  bl.read("los_scale_m", c.blockage.los_scale_m);
  bl.read("penalty_db", c.blockage.penalty_db);
  bl.finish();
  c.blockage.enabled = true;

  Section la(j, "latency");
  la.read("beta_ms", c.beta_ms);
  la.read("epsilon", c.epsilon);
  la.finish();

  Section le(j, "learning");
  le.read("kappa", c.kappa);
  le.read("xi_exponent", c.schedule.xi_exponent);
  le.read("gamma_exponent", c.schedule.gamma_exponent);
  le.read("iota_exponent", c.schedule.iota_exponent);
  le.read("epoch_slots", c.epoch_slots);
  le.read("regret_cap", c.regret_cap);
  le.finish();

  Section sc(j, "scheduler");
  sc.read("nu", c.nu);
  std::string policy = to_string(c.policy);
  sc.read("policy", policy);
  c.policy = parse_policy(policy);
  sc.read("warm_start", c.warm_start);
  sc.read("cap_margin_nats", c.cap_margin_nats);
  sc.finish();

  Section ru(j, "run");
  ru.read("slots", c.run.slots);
  ru.read("seeds", c.run.seeds);
  ru.read("slot_ms", c.run.slot_ms);
  ru.read("ccdf_thresholds_ms", c.run.ccdf_thresholds_ms);
  ru.read("threads", c.run.threads);
  ru.read("dump_sca", c.run.dump_sca);
  ru.finish();

  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ScenarioConfig& c) {
  const auto& r = c.radio;
  json j;
  j["topology"] = {{"num_scbs", c.topology.num_scbs},
                   {"relays_per_path", c.topology.relays_per_path},
                   {"distance_min_m", c.topology.distance_min_m},
                   {"distance_max_m", c.topology.distance_max_m},
                   {"single_hop_distance_m", c.topology.single_hop_distance_m}};
  j["flows"] = {{"count", c.flows.count},
                {"candidate_paths", c.flows.candidate_paths},
                {"selected_paths", c.flows.selected_paths},
                {"arrival_gbps", c.flows.arrival_gbps},
                {"rate_cap_gbps", c.flows.rate_cap_gbps},
                {"packet_bits", c.flows.packet_bits}};
  j["radio"] = {{"mbs_power_dbm", r.mbs_power_dbm},
                {"scbs_power_dbm", r.scbs_power_dbm},
                {"mbs_antenna_dbi", r.mbs_antenna_dbi},
                {"scbs_antenna_dbi", r.scbs_antenna_dbi},
                {"ue_antenna_dbi", r.ue_antenna_dbi},
                {"antennas", r.antennas},
                {"bandwidth_hz", r.bandwidth_hz},
                {"carrier_ghz", r.carrier_ghz},
                {"sidelobe_gain", r.sidelobe_gain},
                {"beamwidth_rad", r.beamwidth_rad},
                {"misalignment_rad", r.misalignment_rad},
                {"csi_error", r.csi_error},
                {"noise_figure_db", r.noise_figure_db}};
  if (r.max_interference > 0.0) j["radio"]["max_interference_db"] = units::linear_to_db(r.max_interference);
  j["blockage"] = {{"los_scale_m", c.blockage.los_scale_m}, {"penalty_db", c.blockage.penalty_db}};
  j["latency"] = {{"beta_ms", c.beta_ms}, {"epsilon", c.epsilon}};
  j["learning"] = {{"kappa", c.kappa},
                   {"xi_exponent", c.schedule.xi_exponent},
                   {"gamma_exponent", c.schedule.gamma_exponent},
                   {"iota_exponent", c.schedule.iota_exponent},
                   {"epoch_slots", c.epoch_slots},
                   {"regret_cap", c.regret_cap}};
  j["scheduler"] = {{"nu", c.nu},
                    {"policy", to_string(c.policy)},
                    {"warm_start", c.warm_start},
                    {"cap_margin_nats", c.cap_margin_nats}};
  j["run"] = {{"slots", c.run.slots},
              {"seeds", c.run.seeds},
              {"slot_ms", c.run.slot_ms},
              {"ccdf_thresholds_ms", c.run.ccdf_thresholds_ms},
              {"threads", c.run.threads},
              {"dump_sca", c.run.dump_sca}};
  return j;
}

namespace {

std::vector<Flow> make_flows(const ScenarioConfig& cfg, const Topology& topo, int max_paths,
                             double subflow_gbps) {
  std::vector<Flow> flows;
  const int first_ue = topo.num_bs();
  const double cap_bits = cfg.flows.rate_cap_gbps * 1e9 * cfg.slot_seconds();
  for (int f = 0; f < cfg.flows.count; ++f) {
    Flow fl;
    fl.id = f;
    fl.destination = first_ue + f;
    fl.candidate_paths = enumerate_disjoint_paths(topo, 0, fl.destination, max_paths);
    fl.mean_arrival_bits = cfg.flow_mean_bits(subflow_gbps);
    fl.rate_cap_bits = cap_bits;
    fl.validate(topo);
    flows.push_back(std::move(fl));
  }
  return flows;
}

}  // namespace

Scenario build_multihop(const ScenarioConfig& cfg, std::uint64_t seed, double subflow_gbps) {
  const int relays = cfg.topology.relays_per_path;
  const int chains = cfg.topology.num_scbs / relays;
  if (chains < cfg.flows.candidate_paths)
    throw ValidationError("topology.num_scbs: too few relays for flows.candidate_paths disjoint paths");
  const int first_ue = cfg.topology.num_scbs + 1;
  std::vector<std::pair<int, int>> pairs;
  for (int c = 0; c < chains; ++c) {
    const int head = 1 + c * relays;
    pairs.emplace_back(0, head);
    for (int k = 1; k < relays; ++k) pairs.emplace_back(head + k - 1, head + k);
    for (int u = 0; u < cfg.flows.count; ++u) pairs.emplace_back(head + relays - 1, first_ue + u);
  }
  std::vector<Edge> edges;
  std::uniform_real_distribution<double> dist(cfg.topology.distance_min_m, cfg.topology.distance_max_m);
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    auto rng = make_stream(seed, Stream::kTopology, {e});
    edges.push_back({pairs[e].first, pairs[e].second, dist(rng)});
  }
  Topology topo(cfg.topology.num_scbs, cfg.flows.count, std::move(edges));
  auto flows = make_flows(cfg, topo, cfg.flows.candidate_paths, subflow_gbps);
  return {std::move(topo), std::move(flows)};
}

Scenario build_single_hop(const ScenarioConfig& cfg, double subflow_gbps) {
  std::vector<Edge> edges;
  for (int u = 0; u < cfg.flows.count; ++u) edges.push_back({0, 1 + u, cfg.topology.single_hop_distance_m});
  Topology topo(0, cfg.flows.count, std::move(edges));
  auto flows = make_flows(cfg, topo, 1, subflow_gbps);
  return {std::move(topo), std::move(flows)};
}

}  // namespace mmhop
