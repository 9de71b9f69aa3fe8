#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "mmhop/model/channel.hpp"
#include "mmhop/model/topology.hpp"

namespace mmhop {

struct RadioParams {
  double mbs_power_dbm = 43.0;
  double scbs_power_dbm = 30.0;
  double mbs_antenna_dbi = 0.0;
  double scbs_antenna_dbi = 5.0;
  double ue_antenna_dbi = 0.0;
  int antennas = 8;
  double bandwidth_hz = 1e9;
  double carrier_ghz = 28.0;
  double sidelobe_gain = 0.1;
  double beamwidth_rad = 0.5235987755982988;
  double misalignment_rad = 0.0;
  double max_interference = 0.0;  // I^max, linear, relative to noise
  double csi_error = 0.1;
  double noise_figure_db = 10.0;

  void validate() const;
};

// Per-slot i.i.d. LOS/NLOS state on each edge; blocked slots lose penalty_db.
struct BlockageParams {
  bool enabled = false;
  double los_scale_m = 200.0;
  double penalty_db = 20.0;

  double los_probability(double distance_m) const;
};

class Network {
 public:
  Network(Topology topo, const RadioParams& radio, const BlockageParams& blockage = {});

  const Topology& topology() const { return topo_; }
  const std::vector<LinkChannel>& links() const { return links_; }
  const std::vector<double>& budgets_w() const { return budgets_; }
  double bandwidth_hz() const { return bandwidth_hz_; }

  // Effective gain per watt (noise-normalised, interference margin applied)
  // of every edge in slot `slot`. Deterministic in (seed, slot, edge).
  void sample_gains(std::uint64_t seed, long slot, std::vector<double>& gains) const;

 private:
  Topology topo_;
  std::vector<LinkChannel> links_;
  std::vector<double> budgets_;
  std::vector<double> blocked_factor_;
  BlockageParams blockage_;
  double bandwidth_hz_ = 1e9;
};

// Weighted water-filling: maximise sum w_k ln(1 + g_k p_k) subject to
// sum p_k <= total and 0 <= p_k <= cap_k. Zero-weight items get nothing.
struct FillItem {
  double weight = 0.0;
  double gain = 0.0;
  double cap_w = std::numeric_limits<double>::infinity();
};
std::vector<double> water_fill(const std::vector<FillItem>& items, double total_w);

// BS ids ordered so every BS comes after all BSs it transmits to.
std::vector<int> reverse_topological_bs(const Topology& topo);

}  // namespace mmhop
