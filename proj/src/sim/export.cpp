#include "mmhop/sim/export.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmhop/common/error.hpp"

namespace mmhop {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void put(std::string& out, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

template <typename I>
void put_int(std::string& out, I v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw IoError("write failed for '" + path + "'");
}

template <typename T>
T parse_field(std::string_view s, const std::string& where) {
  T v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw IoError(where + ": bad number '" + std::string(s) + "'");
  return v;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace

void write_samples_csv(const std::vector<MetricsLog>& logs, const std::string& path) {
  auto out = open_out(path);
  std::string buf(kCsvHeader);
  buf += '\n';
  for (const auto& log : logs) {
    for (const auto& r : log.rows) {
      put_int(buf, r.slot);
      buf += ',';
      put_int(buf, r.seed);
      buf += ',';
      buf += log.policy;
      buf += ',';
      put_int(buf, r.flow);
      buf += ',';
      put_int(buf, r.node);
      buf += ',';
      put(buf, r.queue_bits);
      buf += ',';
      put(buf, r.delay_slots);
      buf += ',';
      put(buf, r.rate_bps);
      buf += '\n';
      if (buf.size() > (1u << 20)) {
        out << buf;
        buf.clear();
      }
    }
  }
  out << buf;
  close_out(out, path);
}

void read_samples_csv(const std::string& path, std::vector<MetricsLog>& logs) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError(path + ": missing or wrong header");
  long n = 1;
  std::string_view f[8];
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(n);
    std::size_t start = 0;
    int k = 0;
    for (std::size_t i = 0; i <= line.size() && k < 8; ++i) {
      if (i == line.size() || line[i] == ',') {
        f[k++] = std::string_view(line).substr(start, i - start);
        start = i + 1;
      }
    }
    if (k != 8 || start <= line.size()) throw IoError(where + ": expected 8 fields");
    MetricsLog* log = nullptr;
    for (auto& l : logs)
      if (l.policy == f[2]) log = &l;
    if (!log) throw IoError(where + ": policy '" + std::string(f[2]) + "' not in manifest");
    log->rows.push_back({parse_field<long>(f[0], where), parse_field<std::uint64_t>(f[1], where),
                         parse_field<int>(f[3], where), parse_field<int>(f[4], where),
                         parse_field<double>(f[5], where), parse_field<double>(f[6], where),
                         parse_field<double>(f[7], where)});
  }
}

json to_json(const Summary& s) {
  return {{"policy", s.policy},
          {"arrival_gbps", s.arrival_gbps},
          {"seeds", s.seeds},
          {"slots", s.slots},
          {"samples", s.samples},
          {"mean_one_hop_delay_ms", s.mean_one_hop_delay_ms},
          {"end_to_end_delay_ms", s.end_to_end_delay_ms},
          {"throughput_gbps_per_subflow", s.throughput_gbps_per_subflow},
          {"beta_ms", s.beta_ms},
          {"violation_frequency", s.violation_frequency},
          {"ccdf_thresholds_ms", s.ccdf_thresholds_ms},
          {"ccdf", s.ccdf_values},
          {"fallback_events", s.fallback_events},
          {"cap_events", s.cap_events}};
}

Summary summary_from_json(const json& j) {
  try {
    Summary s;
    s.policy = j.at("policy").get<std::string>();
    s.arrival_gbps = j.at("arrival_gbps").get<double>();
    s.seeds = j.at("seeds").get<std::size_t>();
    s.slots = j.at("slots").get<long>();
    s.samples = j.at("samples").get<std::size_t>();
    s.mean_one_hop_delay_ms = j.at("mean_one_hop_delay_ms").get<double>();
    s.end_to_end_delay_ms = j.at("end_to_end_delay_ms").get<double>();
    s.throughput_gbps_per_subflow = j.at("throughput_gbps_per_subflow").get<double>();
    s.beta_ms = j.at("beta_ms").get<double>();
    s.violation_frequency = j.at("violation_frequency").get<double>();
    s.ccdf_thresholds_ms = j.at("ccdf_thresholds_ms").get<std::vector<double>>();
    s.ccdf_values = j.at("ccdf").get<std::vector<double>>();
    s.fallback_events = j.at("fallback_events").get<std::size_t>();
    s.cap_events = j.at("cap_events").get<std::size_t>();
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("summary: ") + e.what());
  }
}

void export_run(const std::string& dir, const ScenarioConfig& cfg, const std::vector<MetricsLog>& logs,
                const std::vector<Summary>& summaries) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  const fs::path d(dir);

  write_samples_csv(logs, (d / "samples.csv").string());

  json sj = json::array();
  for (const auto& s : summaries) sj.push_back(to_json(s));
  {
    const auto p = (d / "summary.json").string();
    auto out = open_out(p);
    out << sj.dump(2) << '\n';
    close_out(out, p);
  }

  json runs = json::array();
  for (const auto& log : logs) {
    json totals = json::array();
    for (const auto& t : log.totals)
      totals.push_back({{"seed", t.seed},
                        {"slots", t.slots},
                        {"arrived_bits", t.arrived_bits},
                        {"delivered_bits", t.delivered_bits}});
    json hops = json::array();
    for (const auto& [k, h] : log.hop_of) hops.push_back({k.first, k.second, h});
    runs.push_back({{"policy", log.policy},
                    {"arrival_gbps", log.arrival_gbps},
                    {"slot_seconds", log.slot_seconds},
                    {"subflows_per_flow", log.subflows_per_flow},
                    {"totals", totals},
                    {"hop_of", hops}});
  }
  json manifest = {{"format", "mmhop-run/1"}, {"config", to_json(cfg)}, {"runs", runs}};
  {
    const auto p = (d / "manifest.json").string();
    auto out = open_out(p);
    out << manifest.dump(2) << '\n';
    close_out(out, p);
  }

  {
    const auto p = (d / "strategies.csv").string();
    auto out = open_out(p);
    std::string buf = "slot,seed,policy,flow,path,probability\n";
    for (const auto& log : logs)
      for (const auto& s : log.strategies)
        for (std::size_t m = 0; m < s.pi.size(); ++m) {
          put_int(buf, s.slot);
          buf += ',';
          put_int(buf, s.seed);
          buf += ',' + log.policy + ',';
          put_int(buf, s.flow);
          buf += ',';
          put_int(buf, m);
          buf += ',';
          put(buf, s.pi[m]);
          buf += '\n';
        }
    out << buf;
    close_out(out, p);
  }
  {
    const auto p = (d / "events.csv").string();
    auto out = open_out(p);
    std::string buf = "slot,seed,policy,event\n";
    for (const auto& log : logs)
      for (const auto& e : log.events) {
        put_int(buf, e.slot);
        buf += ',';
        put_int(buf, e.seed);
        buf += ',' + log.policy + ",\"";
        for (char c : e.text) buf += c == '"' ? std::string("\"\"") : std::string(1, c);
        buf += "\"\n";
      }
    out << buf;
    close_out(out, p);
  }
}

LoadedRun load_run(const std::string& dir) {
  const fs::path d(dir);
  const json manifest = read_json((d / "manifest.json").string());
  LoadedRun run;
  try {
    run.config = parse_config(manifest.at("config"));
    for (const auto& r : manifest.at("runs")) {
      MetricsLog log;
      log.policy = r.at("policy").get<std::string>();
      log.arrival_gbps = r.at("arrival_gbps").get<double>();
      log.slot_seconds = r.at("slot_seconds").get<double>();
      log.subflows_per_flow = r.at("subflows_per_flow").get<int>();
      for (const auto& t : r.at("totals"))
        log.totals.push_back({t.at("seed").get<std::uint64_t>(), t.at("slots").get<long>(),
                              t.at("arrived_bits").get<std::vector<double>>(),
                              t.at("delivered_bits").get<std::vector<double>>()});
      for (const auto& h : r.at("hop_of"))
        log.hop_of[{h.at(0).get<int>(), h.at(1).get<int>()}] = h.at(2).get<int>();
      run.logs.push_back(std::move(log));
    }
  } catch (const json::exception& e) {
    throw IoError((d / "manifest.json").string() + ": " + e.what());
  }
  read_samples_csv((d / "samples.csv").string(), run.logs);

  // Events only feed the fallback/cap counters.
  std::ifstream ev((d / "events.csv").string());
  if (ev) {
    std::string line;
    std::getline(ev, line);
    while (std::getline(ev, line)) {
      std::stringstream ss(line);
      std::string slot, seed, policy;
      std::getline(ss, slot, ',');
      std::getline(ss, seed, ',');
      std::getline(ss, policy, ',');
      std::string text;
      std::getline(ss, text);
      if (text.size() >= 2) text = text.substr(1, text.size() - 2);
      for (auto& log : run.logs)
        if (log.policy == policy)
          log.events.push_back({parse_field<long>(slot, "events.csv"),
                                parse_field<std::uint64_t>(seed, "events.csv"), text});
    }
  }
  return run;
}

void write_dump(const std::string& path, const std::vector<ScaRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) out << to_json_line(r) << '\n';
  close_out(out, path);
}

}  // namespace mmhop
