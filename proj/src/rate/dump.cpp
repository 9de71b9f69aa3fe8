#include "mmhop/rate/dump.hpp"

#include <fstream>

#include <json.hpp>

#include "mmhop/common/error.hpp"

namespace mmhop {

using nlohmann::json;

std::string to_json_line(const ScaRecord& rec) {
  json subs = json::array();
  for (const auto& s : rec.problem.subflows) {
    json relays = json::array();
    for (const auto& r : s.relays)
      relays.push_back({{"node", r.node}, {"gain_in", r.gain_in}, {"gain_out", r.gain_out},
                        {"d_nats", r.d_nats}, {"capped", r.capped}});
    subs.push_back({{"subflow", s.subflow}, {"flow", s.flow}, {"path", s.path}, {"hops", s.hops},
                    {"weight", s.weight}, {"gain0", s.gain0}, {"lb_nats", s.lb_nats},
                    {"cap_nats", s.cap_nats}, {"relays", relays}});
  }
  json j = {{"slot", rec.slot},
            {"seed", rec.seed},
            {"policy", rec.policy},
            {"problem", {{"budgets_w", rec.problem.budgets_w}, {"subflows", subs}}},
            {"solution",
             {{"objective", rec.objective}, {"x_nats", rec.x_nats}, {"power_w", rec.power_w},
              {"iterations", rec.iterations}}}};
  return j.dump();
}

ScaRecord parse_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    ScaRecord rec;
    rec.slot = j.at("slot").get<long>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.policy = j.at("policy").get<std::string>();
    const auto& pj = j.at("problem");
    rec.problem.budgets_w = pj.at("budgets_w").get<std::vector<double>>();
    for (const auto& sj : pj.at("subflows")) {
      SubflowBlock s;
      s.subflow = sj.at("subflow").get<int>();
      s.flow = sj.at("flow").get<int>();
      s.path = sj.at("path").get<int>();
      s.hops = sj.at("hops").get<std::vector<int>>();
      s.weight = sj.at("weight").get<double>();
      s.gain0 = sj.at("gain0").get<double>();
      s.lb_nats = sj.at("lb_nats").get<double>();
      s.cap_nats = sj.at("cap_nats").get<double>();
      for (const auto& rj : sj.at("relays")) {
        RelayHop r;
        r.node = rj.at("node").get<int>();
        r.gain_in = rj.at("gain_in").get<double>();
        r.gain_out = rj.at("gain_out").get<double>();
        r.d_nats = rj.at("d_nats").get<double>();
        r.capped = rj.at("capped").get<bool>();
        s.relays.push_back(r);
      }
      rec.problem.subflows.push_back(std::move(s));
    }
    const auto& sol = j.at("solution");
    rec.objective = sol.at("objective").get<double>();
    rec.x_nats = sol.at("x_nats").get<std::vector<double>>();
    rec.power_w = sol.at("power_w").get<std::vector<std::vector<double>>>();
    rec.iterations = sol.at("iterations").get<int>();
    return rec;
  } catch (const json::exception& e) {
    throw IoError(std::string("dump: malformed record: ") + e.what());
  }
}

std::vector<ScaRecord> read_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("dump: cannot open " + path);
  std::vector<ScaRecord> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_json_line(line));
    } catch (const IoError& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace mmhop
