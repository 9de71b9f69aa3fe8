// mmhop: run scenarios, re-summarize exported runs, replay SCA dumps.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mmhop/common/error.hpp"
#include "mmhop/rate/grid_oracle.hpp"
#include "mmhop/sim/export.hpp"
#include "mmhop/sim/runner.hpp"

namespace fs = std::filesystem;
using namespace mmhop;

namespace {

std::vector<Policy> parse_policies(const std::string& arg) {
  const std::string all = "proposed,baseline1,baseline2,baseline3,single-hop";
  std::stringstream ss(arg == "all" ? all : arg);
  std::vector<Policy> out;
  for (std::string name; std::getline(ss, name, ',');)
    if (!name.empty()) out.push_back(parse_policy(name));
  if (out.empty()) throw ValidationError("--policy: no policy given");
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& arg) {
  std::stringstream ss(arg);
  std::vector<std::uint64_t> out;
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ValidationError("--seeds: '" + tok + "' is not a nonnegative integer");
    }
  }
  if (out.empty()) throw ValidationError("--seeds: no seeds given");
  return out;
}

void print_summary(const Summary& s) {
  std::cout << s.policy << " lambda=" << s.arrival_gbps << "Gbps delay=" << s.mean_one_hop_delay_ms
            << "ms e2e=" << s.end_to_end_delay_ms << "ms tput=" << s.throughput_gbps_per_subflow
            << "Gbps P(d>beta)=" << s.violation_frequency << " fallbacks=" << s.fallback_events << '\n';
}

int cmd_run(const std::string& config, const std::string& policy, const std::string& seeds,
            const std::string& out_dir) {
  ScenarioConfig cfg = load_config(config);
  std::vector<Policy> policies = policy.empty() ? std::vector<Policy>{cfg.policy} : parse_policies(policy);
  if (!seeds.empty()) cfg.run.seeds = parse_seeds(seeds);
  const bool sweep = cfg.flows.arrival_gbps.size() > 1;
  for (double gbps : cfg.flows.arrival_gbps) {
    std::vector<MetricsLog> logs;
    std::vector<Summary> sums;
    std::vector<ScaRecord> dump;
    for (Policy p : policies) {
      spdlog::info("running {} at {} Gbps over {} seeds", to_string(p), gbps, cfg.run.seeds.size());
      logs.push_back(run_seeds(cfg, p, gbps, cfg.run.seeds, cfg.run.dump_sca ? &dump : nullptr));
      sums.push_back(summarize(logs.back(), cfg.run.ccdf_thresholds_ms, cfg.beta_ms));
      print_summary(sums.back());
    }
    std::string dir = out_dir;
    if (sweep) {
      std::ostringstream name;
      name << "lambda_" << gbps;
      dir = (fs::path(out_dir) / name.str()).string();
    }
    export_run(dir, cfg, logs, sums);
    if (cfg.run.dump_sca) write_dump((fs::path(dir) / "sca_dump.jsonl").string(), dump);
  }
  return 0;
}

int cmd_summarize(const std::string& in_dir) {
  std::vector<fs::path> dirs;
  if (fs::exists(fs::path(in_dir) / "manifest.json")) {
    dirs.push_back(in_dir);
  } else if (fs::is_directory(in_dir)) {
    for (const auto& e : fs::directory_iterator(in_dir))
      if (e.is_directory() && fs::exists(e.path() / "manifest.json")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
  }
  if (dirs.empty()) throw IoError("no manifest.json under '" + in_dir + "'");
  nlohmann::json all = nlohmann::json::array();
  for (const auto& d : dirs) {
    LoadedRun run = load_run(d.string());
    for (const auto& log : run.logs)
      all.push_back(to_json(summarize(log, run.config.run.ccdf_thresholds_ms, run.config.beta_ms)));
  }
  std::cout << all.dump(2) << '\n';
  return 0;
}

int cmd_replay(const std::string& dump_path, double tol) {
  const auto records = read_dump(dump_path);
  int checked = 0, skipped = 0, bad = 0;
  for (const auto& rec : records) {
    const auto oracle = grid_oracle_objective(rec.problem);
    if (!oracle) {
      ++skipped;
      continue;
    }
    ++checked;
    const double gap = std::abs(rec.objective - *oracle) / std::max(std::abs(*oracle), 1e-12);
    const bool ok = gap <= tol || rec.objective <= *oracle;
    if (!ok) ++bad;
    std::cout << "seed=" << rec.seed << " slot=" << rec.slot << " sca=" << rec.objective
              << " oracle=" << *oracle << " rel_gap=" << gap << (ok ? " ok" : " MISMATCH") << '\n';
  }
  std::cout << "checked " << checked << ", skipped " << skipped << " (too many power variables), mismatches "
            << bad << '\n';
  return bad == 0 ? 0 : static_cast<int>(ErrorCategory::kSolver);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("mmhop");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("MMHOP_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Multi-hop mmWave scheduling simulator"};
  app.require_subcommand(1);

  std::string config, policy, seeds, out_dir = "out", in_dir, dump;
  double tol = 1e-3;
  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("--config", config, "Scenario JSON")->required();
  run->add_option("--policy", policy, "Policy name, comma list, or 'all'");
  run->add_option("--seeds", seeds, "Comma-separated seeds");
  run->add_option("--out", out_dir, "Output directory");
  auto* sum = app.add_subcommand("summarize", "Recompute summaries of an exported run");
  sum->add_option("--in", in_dir, "Run directory")->required();
  auto* rep = app.add_subcommand("oracle-replay", "Re-check dumped SCA instances against the grid oracle");
  rep->add_option("--dump", dump, "Dump file (JSON lines)")->required();
  rep->add_option("--tol", tol, "Relative objective tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCategory::kValidation);
  }
  try {
    if (*run) return cmd_run(config, policy, seeds, out_dir);
    if (*sum) return cmd_summarize(in_dir);
    if (*rep) return cmd_replay(dump, tol);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
