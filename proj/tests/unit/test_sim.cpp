#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mmhop/common/error.hpp"
#include "mmhop/sim/export.hpp"
#include "mmhop/sim/metrics.hpp"
#include "mmhop/sim/runner.hpp"
#include "mmhop/sim/scenario_config.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mmhop;
using nlohmann::json;

namespace {

const std::string kConfig = std::string(MMHOP_SOURCE_DIR) + "/configs/backhaul_8scbs.json";

json base_json() {
  std::ifstream in(kConfig);
  return json::parse(in);
}

ScenarioConfig small_config(long slots = 30) {
  auto cfg = load_config(kConfig);
  cfg.run.slots = slots;
  cfg.run.seeds = {1};
  return cfg;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mmhop_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(MMHOP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("scenario config parsing") {
  const auto cfg = load_config(kConfig);
  CHECK(cfg.topology.num_scbs == 8);
  CHECK(cfg.flows.selected_paths == 2);
  CHECK(cfg.beta_slots() == doctest::Approx(100.0));
  CHECK(cfg.slot_seconds() == doctest::Approx(1e-4));

  SUBCASE("round trip through JSON") {
    const auto again = parse_config(to_json(cfg));
    CHECK(to_json(again).dump() == to_json(cfg).dump());
  }
  SUBCASE("unknown keys and sections are rejected") {
    auto j = base_json();
    j["flows"]["colour"] = 1;
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("flows.colour"), ValidationError);
    j = base_json();
    j["extras"] = json::object();
    CHECK_THROWS_AS(parse_config(j), ValidationError);
  }
  SUBCASE("field-level validation") {
    auto j = base_json();
    j["latency"]["epsilon"] = 1.5;
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("latency.epsilon"), ValidationError);
    j = base_json();
    j["flows"]["selected_paths"] = 5;
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("flows.selected_paths"), ValidationError);
    j = base_json();
    j["flows"]["arrival_gbps"] = json::array({1.0, -2.0});
    CHECK_THROWS_AS(parse_config(j), ValidationError);
    j = base_json();
    j["topology"]["num_scbs"] = "eight";
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("wrong type"), ValidationError);
    j = base_json();
    j["scheduler"]["policy"] = "greedy";
    CHECK_THROWS_AS(parse_config(j), ValidationError);
  }
  SUBCASE("zero-load flows are allowed") {
    auto j = base_json();
    j["flows"]["arrival_gbps"] = json::array({0.0});
    CHECK_NOTHROW(parse_config(j));
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("built scenarios") {
  const auto cfg = small_config();
  const auto a = build_multihop(cfg, 3, 4.5), b = build_multihop(cfg, 3, 4.5), c = build_multihop(cfg, 4, 4.5);
  REQUIRE(a.flows.size() == 2);
  for (const auto& f : a.flows) {
    CHECK(f.candidate_paths.size() == 4);
    for (const auto& p : f.candidate_paths) CHECK(p.num_hops() == 3);
    CHECK_NOTHROW(f.validate(a.topology));
    CHECK(f.mean_arrival_bits == doctest::Approx(cfg.flow_mean_bits(4.5)));
  }
  REQUIRE(a.topology.edges().size() == b.topology.edges().size());
  bool differ = false;
  for (std::size_t k = 0; k < a.topology.edges().size(); ++k) {
    CHECK(a.topology.edges()[k].distance_m == b.topology.edges()[k].distance_m);
    differ = differ || a.topology.edges()[k].distance_m != c.topology.edges()[k].distance_m;
  }
  CHECK(differ);
  for (const auto& e : a.topology.edges()) {
    CHECK(e.distance_m >= cfg.topology.distance_min_m);
    CHECK(e.distance_m <= cfg.topology.distance_max_m);
  }
  const auto s = build_single_hop(cfg, 4.5);
  for (const auto& f : s.flows)
    for (const auto& p : f.candidate_paths) CHECK(p.num_hops() == 1);
}

TEST_CASE("ccdf") {
  const auto v = oracle::frozen();
  CHECK(ccdf({1, 2, 3, 4}, {2.5})[0] == v["ccdf_1234_2.5"].get<double>());
  CHECK(ccdf({1, 2, 3, 4}, {4.0})[0] == 0.0);  // strictly above
  CHECK(ccdf({1, 2, 3, 4}, {0.0})[0] == 1.0);
  CHECK_THROWS_AS(ccdf({}, {1.0}), ValidationError);

  std::mt19937_64 rng(12);
  std::exponential_distribution<double> e(0.3);
  std::vector<double> x(3000);
  for (double& xi : x) xi = e(rng);
  std::vector<double> th;
  for (double t = 0.0; t < 30.0; t += 0.5) th.push_back(t);
  const auto c = ccdf(x, th);
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(c[k] >= 0.0);
    CHECK(c[k] <= 1.0);
    if (k > 0) CHECK(c[k] <= c[k - 1]);
  }
}

TEST_CASE("summaries") {
  MetricsLog log;
  log.policy = "proposed";
  log.arrival_gbps = 1.0;
  log.slot_seconds = 1e-4;
  log.subflows_per_flow = 1;
  log.hop_of = {{{0, 0}, 0}, {{0, 5}, 1}};
  for (long t = 0; t < 10; ++t) {
    log.rows.push_back({t, 1, 0, 0, 100.0, 20.0, 1e9});   // 2 ms at the MBS
    log.rows.push_back({t, 1, 0, 5, 100.0, 130.0, 1e9});  // 13 ms at the relay
  }
  log.totals.push_back({1, 10, {1e6}, {5e5}});
  log.events.push_back({3, 1, "slack_capped"});
  log.events.push_back({4, 1, "slack_relaxed: mbs"});
  const auto s = summarize(log, {1.0, 10.0}, 10.0);
  CHECK(s.mean_one_hop_delay_ms == doctest::Approx(7.5));
  CHECK(s.end_to_end_delay_ms == doctest::Approx(2.0 + 13.0));
  CHECK(s.violation_frequency == doctest::Approx(0.5));
  CHECK(s.violation_frequency == s.ccdf_values[1]);
  CHECK(s.ccdf_values[0] == 1.0);
  CHECK(s.throughput_gbps_per_subflow == doctest::Approx(5e5 / (10 * 1e-4) / 1e9));
  CHECK(s.cap_events == 1);
  CHECK(s.fallback_events == 1);
  CHECK(s.samples == 20);

  const auto back = summary_from_json(to_json(s));
  CHECK(to_json(back).dump() == to_json(s).dump());
  CHECK_THROWS_AS(summarize(MetricsLog{}, {1.0}, 10.0), ValidationError);
}

TEST_CASE("short runs") {
  const auto cfg = small_config(10);
  const auto log = run_one(cfg, Policy::kProposed, 4.5, 1);
  std::set<long> slots;
  for (const auto& r : log.rows) slots.insert(r.slot);
  CHECK(slots.size() == 10);
  // MBS plus both relays of both selected paths, for both flows
  CHECK(log.rows.size() >= 10u * 10u);
  REQUIRE(log.totals.size() == 1);
  for (std::size_t f = 0; f < 2; ++f) CHECK(log.totals[0].delivered_bits[f] <= log.totals[0].arrived_bits[f]);

  const auto dir = scratch("rows");
  export_run(dir.string(), cfg, {log}, {summarize(log, cfg.run.ccdf_thresholds_ms, cfg.beta_ms)});
  std::ifstream in(dir / "samples.csv");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == log.rows.size() + 1);
  for (const char* f : {"samples.csv", "summary.json", "manifest.json", "strategies.csv", "events.csv"})
    CHECK(fs::exists(dir / f));
  fs::remove_all(dir);
}

TEST_CASE("zero load") {
  const auto cfg = small_config(40);
  for (auto p : {Policy::kProposed, Policy::kBaseline3}) {
    const auto log = run_one(cfg, p, 0.0, 2);
    const auto s = summarize(log, cfg.run.ccdf_thresholds_ms, cfg.beta_ms);
    CHECK(s.mean_one_hop_delay_ms == 0.0);
    CHECK(s.throughput_gbps_per_subflow == 0.0);
    CHECK(s.violation_frequency == 0.0);
  }
}

TEST_CASE("export round trip is exact") {
  auto cfg = small_config(25);
  cfg.run.seeds = {1, 2};
  std::vector<MetricsLog> logs{run_seeds(cfg, Policy::kProposed, 4.5, cfg.run.seeds),
                               run_seeds(cfg, Policy::kSingleHop, 4.5, cfg.run.seeds)};
  std::vector<Summary> sums;
  for (const auto& l : logs) sums.push_back(summarize(l, cfg.run.ccdf_thresholds_ms, cfg.beta_ms));
  const auto dir = scratch("roundtrip");
  export_run(dir.string(), cfg, logs, sums);
  const auto run = load_run(dir.string());
  REQUIRE(run.logs.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    REQUIRE(run.logs[k].rows.size() == logs[k].rows.size());
    for (std::size_t i = 0; i < logs[k].rows.size(); ++i) {
      const auto &a = logs[k].rows[i], &b = run.logs[k].rows[i];
      CHECK(a.slot == b.slot);
      CHECK(a.seed == b.seed);
      CHECK(a.queue_bits == b.queue_bits);
      CHECK(a.delay_slots == b.delay_slots);
      CHECK(a.rate_bps == b.rate_bps);
    }
    // the summary recomputed from disk is the exported one, bit for bit
    const auto again = summarize(run.logs[k], run.config.run.ccdf_thresholds_ms, run.config.beta_ms);
    CHECK(to_json(again).dump() == to_json(sums[k]).dump());
  }
  const auto on_disk = json::parse(slurp(dir / "summary.json"));
  CHECK(on_disk.dump().find("proposed") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("header-only CSV") {
  const auto dir = scratch("empty");
  const auto path = (dir / "samples.csv").string();
  write_samples_csv({}, path);
  CHECK(slurp(path) == std::string(kCsvHeader) + "\n");
  std::vector<MetricsLog> logs(1);
  read_samples_csv(path, logs);
  CHECK(logs[0].rows.empty());

  std::ofstream(dir / "bad.csv") << "slot,seed\n1,2\n";
  CHECK_THROWS_AS(read_samples_csv((dir / "bad.csv").string(), logs), IoError);
  CHECK_THROWS_AS(load_run((dir / "missing").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("runs are deterministic") {
  auto cfg = small_config(30);
  cfg.run.seeds = {3, 4};
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  for (const auto& d : {d1, d2}) {
    std::vector<MetricsLog> logs{run_seeds(cfg, Policy::kProposed, 4.5, cfg.run.seeds)};
    export_run(d.string(), cfg, logs, {summarize(logs[0], cfg.run.ccdf_thresholds_ms, cfg.beta_ms)});
  }
  for (const char* f : {"samples.csv", "summary.json", "strategies.csv", "events.csv"})
    CHECK(slurp(d1 / f) == slurp(d2 / f));

  SUBCASE("thread count does not matter") {
    auto one = cfg;
    one.run.threads = 1;
    auto two = cfg;
    two.run.threads = 2;
    const auto a = run_seeds(one, Policy::kBaseline1, 4.5, cfg.run.seeds);
    const auto b = run_seeds(two, Policy::kBaseline1, 4.5, cfg.run.seeds);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].delay_slots == b.rows[i].delay_slots);
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  auto j = base_json();
  j["run"]["slots"] = 15;
  j["run"]["seeds"] = json::array({1});
  std::ofstream(dir / "ok.json") << j.dump();
  j["latency"]["epsilon"] = 3;
  std::ofstream(dir / "bad.json") << j.dump();
  std::ofstream(dir / "broken.json") << "{ not json";
  std::ofstream(dir / "dump.jsonl") << "{ nope\n";

  const std::string d = dir.string();
  CHECK(cli("run --config " + d + "/ok.json --policy proposed,single-hop --out " + d + "/out") == 0);
  CHECK(fs::exists(dir / "out" / "samples.csv"));
  CHECK(cli("summarize --in " + d + "/out") == 0);
  CHECK(cli("run --config " + d + "/ok.json --seeds 1,x --out " + d + "/o2") == 2);
  CHECK(cli("run --config " + d + "/ok.json --policy greedy --out " + d + "/o3") == 2);
  CHECK(cli("run --config " + d + "/bad.json") == 2);
  CHECK(cli("run --config " + d + "/broken.json") == 2);
  CHECK(cli("run --config " + d + "/absent.json") == 4);
  CHECK(cli("summarize --in " + d + "/nowhere") == 4);
  CHECK(cli("oracle-replay --dump " + d + "/dump.jsonl") == 4);
  CHECK(cli("") == 2);
  CHECK(cli("frobnicate") == 2);
  fs::remove_all(dir);
}
