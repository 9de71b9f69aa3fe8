#include "mmhop/scheduler/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mmhop/common/error.hpp"
#include "mmhop/common/rng.hpp"
#include "mmhop/common/units.hpp"

namespace mmhop {

void RadioParams::validate() const {
  if (antennas < 1) throw ValidationError("radio.antennas: must be >= 1");
  if (!(bandwidth_hz > 0.0)) throw ValidationError("radio.bandwidth_hz: must be > 0");
  if (carrier_ghz != 28.0)
    throw ValidationError("radio.carrier_ghz: only the 28 GHz LOS model is available");
  if (!(sidelobe_gain > 0.0 && sidelobe_gain < 1.0))
    throw ValidationError("radio.sidelobe_gain: must lie in (0, 1)");
  if (!(beamwidth_rad > 0.0 && beamwidth_rad < 2.0 * 3.141592653589793))
    throw ValidationError("radio.beamwidth_deg: must lie in (0, 360)");
  if (!(max_interference >= 0.0)) throw ValidationError("radio.max_interference: must be >= 0");
  if (!(csi_error >= 0.0 && csi_error <= 1.0)) throw ValidationError("radio.csi_error: must lie in [0, 1]");
  if (!std::isfinite(mbs_power_dbm) || !std::isfinite(scbs_power_dbm))
    throw ValidationError("radio: powers must be finite");
}

double BlockageParams::los_probability(double distance_m) const {
  return std::exp(-distance_m / los_scale_m);
}

Network::Network(Topology topo, const RadioParams& radio, const BlockageParams& blockage)
    : topo_(std::move(topo)), blockage_(blockage), bandwidth_hz_(radio.bandwidth_hz) {
  radio.validate();
  if (blockage.enabled && !(blockage.los_scale_m > 0.0))
    throw ValidationError("blockage: LOS scale must be > 0");
  budgets_.assign(static_cast<std::size_t>(topo_.num_bs()), units::dbm_to_watts(radio.scbs_power_dbm));
  budgets_[0] = units::dbm_to_watts(radio.mbs_power_dbm);

  const double noise = units::noise_power_watts(radio.bandwidth_hz, radio.noise_figure_db);
  auto element_dbi = [&](int node) {
    if (node == 0) return radio.mbs_antenna_dbi;
    return topo_.is_bs(node) ? radio.scbs_antenna_dbi : radio.ue_antenna_dbi;
  };
  for (const auto& e : topo_.edges()) {
    LinkChannel l;
    l.distance_m = e.distance_m;
    l.tx_beamwidth_rad = l.rx_beamwidth_rad = radio.beamwidth_rad;
    l.tx_misalignment_rad = l.rx_misalignment_rad = radio.misalignment_rad;
    l.sidelobe_gain = radio.sidelobe_gain;
    l.element_gain = units::db_to_linear(element_dbi(e.from) + element_dbi(e.to));
    l.max_interference = radio.max_interference;
    l.noise_power_w = noise;
    l.bandwidth_hz = radio.bandwidth_hz;
    l.antennas = radio.antennas;
    l.csi_error = radio.csi_error;
    l.validate();
    links_.push_back(l);
  }
  blocked_factor_.assign(links_.size(), units::db_to_linear(-blockage.penalty_db));
}

void Network::sample_gains(std::uint64_t seed, long slot, std::vector<double>& gains) const {
  gains.resize(links_.size());
  const auto t = static_cast<std::uint64_t>(slot);
  for (std::size_t k = 0; k < links_.size(); ++k) {
    const auto& l = links_[k];
    auto fading = make_stream(seed, Stream::kFading, {t, k});
    double g = l.effective_gain(sample_array_gain(l.antennas, l.csi_error, fading));
    if (blockage_.enabled) {
      auto blk = make_stream(seed, Stream::kBlockage, {t, k});
      std::uniform_real_distribution<double> u(0.0, 1.0);
      if (u(blk) >= blockage_.los_probability(l.distance_m)) g *= blocked_factor_[k];
    }
    gains[k] = g;
  }
}

std::vector<double> water_fill(const std::vector<FillItem>& items, double total_w) {
  std::vector<double> p(items.size(), 0.0);
  if (!(total_w > 0.0)) return p;
  auto alloc = [&](double level) {
    double s = 0.0;
    for (std::size_t k = 0; k < items.size(); ++k) {
      const auto& it = items[k];
      if (it.weight <= 0.0 || it.gain <= 0.0 || it.cap_w <= 0.0) {
        p[k] = 0.0;
        continue;
      }
      p[k] = std::clamp(it.weight * level - 1.0 / it.gain, 0.0, it.cap_w);
      s += p[k];
    }
    return s;
  };
  // Level large enough to reach every cap: if that fits, done.
  double hi = 1.0;
  bool any = false;
  for (const auto& it : items) {
    if (it.weight <= 0.0 || it.gain <= 0.0 || it.cap_w <= 0.0) continue;
    any = true;
    const double need = std::isfinite(it.cap_w) ? it.cap_w + 1.0 / it.gain : total_w + 1.0 / it.gain;
    hi = std::max(hi, need / it.weight);
  }
  if (!any) return p;
  if (alloc(hi) <= total_w) return p;
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (alloc(mid) > total_w) hi = mid; else lo = mid;
  }
  alloc(lo);
  return p;
}

std::vector<int> reverse_topological_bs(const Topology& topo) {
  const int nb = topo.num_bs();
  std::vector<int> out_deg(static_cast<std::size_t>(nb), 0);
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(nb));
  for (const auto& e : topo.edges()) {
    if (!topo.is_bs(e.to)) continue;
    ++out_deg[e.from];
    pred[e.to].push_back(e.from);
  }
  std::vector<int> order;
  std::vector<int> ready;
  for (int i = 0; i < nb; ++i)
    if (out_deg[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const int i = ready.back();
    ready.pop_back();
    order.push_back(i);
    for (int pnode : pred[i])
      if (--out_deg[pnode] == 0) ready.push_back(pnode);
  }
  if (static_cast<int>(order.size()) != nb) throw ValidationError("topology: BS graph has a cycle");
  return order;
}

}  // namespace mmhop
