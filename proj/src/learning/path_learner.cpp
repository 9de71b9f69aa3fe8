#include "mmhop/learning/path_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mmhop/common/error.hpp"

namespace mmhop {

void LearningSchedule::validate() const {
  if (!(xi_exponent > 0.0 && xi_exponent < gamma_exponent && gamma_exponent < iota_exponent))
    throw ValidationError("learning: exponents must satisfy 0 < xi < gamma < iota");
}

double LearningSchedule::xi(long t) const { return std::pow(static_cast<double>(t) + 1.0, -xi_exponent); }
double LearningSchedule::gamma(long t) const { return std::pow(static_cast<double>(t) + 1.0, -gamma_exponent); }
double LearningSchedule::iota(long t) const { return std::pow(static_cast<double>(t) + 1.0, -iota_exponent); }

std::vector<double> regret_strategy(std::span<const double> regrets) {
  if (regrets.empty()) throw ValidationError("regret_strategy: no paths");
  std::vector<double> pi(regrets.size());
  double total = 0.0;
  for (std::size_t m = 0; m < regrets.size(); ++m) {
    pi[m] = std::max(regrets[m], 0.0);
    total += pi[m];
  }
  if (total <= 0.0) {
    std::fill(pi.begin(), pi.end(), 1.0 / static_cast<double>(pi.size()));
    return pi;
  }
  for (double& v : pi) v /= total;
  return pi;
}

std::vector<double> bg_strategy(std::span<const double> regrets, double kappa,
                                double regret_cap) {
  if (!(kappa > 0.0)) throw ValidationError("bg_strategy: temperature must be > 0");
  if (regrets.empty()) throw ValidationError("bg_strategy: no paths");
  std::vector<double> z(regrets.size());
  for (std::size_t m = 0; m < z.size(); ++m)
    z[m] = std::max(std::clamp(regrets[m], -regret_cap, regret_cap), 0.0) / kappa;
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
  return z;
}

FlowLearner FlowLearner::uniform(int num_paths, double kappa) {
  if (num_paths < 1) throw ValidationError("learner: need at least one path");
  if (!(kappa > 0.0)) throw ValidationError("learner: temperature must be > 0");
  const auto n = static_cast<std::size_t>(num_paths);
  return FlowLearner{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                     std::vector<double>(n, 1.0 / static_cast<double>(n)), kappa};
}

void learn_step(FlowLearner& fl, std::span<const int> chosen, double observed,
                const StepRates& rates, double regret_cap) {
  if (!std::isfinite(observed)) throw ValidationError("learn_step: observed utility is not finite");
  const std::size_t n = fl.pi.size();
  for (int m : chosen)
    if (m < 0 || static_cast<std::size_t>(m) >= n) throw ValidationError("learn_step: chosen path out of range");

  for (int m : chosen) fl.u_hat[m] += rates.xi * (observed - fl.u_hat[m]);
  for (std::size_t m = 0; m < n; ++m) {
    fl.r_hat[m] += rates.gamma * (fl.u_hat[m] - observed - fl.r_hat[m]);
    fl.r_hat[m] = std::clamp(fl.r_hat[m], -regret_cap, regret_cap);
  }
  const auto target = bg_strategy(fl.r_hat, fl.kappa, regret_cap);
  double total = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    fl.pi[m] += rates.iota * (target[m] - fl.pi[m]);
    fl.pi[m] = std::max(fl.pi[m], 0.0);
    total += fl.pi[m];
  }
  // Convex combination of two distributions; renormalise away rounding only.
  for (double& v : fl.pi) v /= total;
}

LearnerState learn_step(LearnerState state, int flow, int chosen, double observed, long t) {
  auto& fl = state.flows.at(static_cast<std::size_t>(flow));
  const StepRates r{state.schedule.xi(t), state.schedule.gamma(t), state.schedule.iota(t)};
  const int pick[] = {chosen};
  learn_step(fl, pick, observed, r, state.regret_cap);
  return state;
}

std::vector<int> sample_paths(std::span<const double> pi, int count, SplitMix64& rng) {
  const int n = static_cast<int>(pi.size());
  if (count < 0 || count > n) throw ValidationError("sample_paths: count exceeds available paths");
  std::vector<char> taken(pi.size(), 0);
  std::vector<int> out;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    double mass = 0.0;
    for (int m = 0; m < n; ++m)
      if (!taken[m]) mass += std::max(pi[m], 0.0);
    const double u = unif(rng);
    int pick = -1;
    if (mass > 0.0) {
      double acc = 0.0;
      for (int m = 0; m < n; ++m) {
        if (taken[m] || pi[m] <= 0.0) continue;
        acc += pi[m] / mass;
        pick = m;
        if (u < acc) break;
      }
    } else {
      const int left = n - k;
      int r = std::min(static_cast<int>(u * left), left - 1);
      for (int m = 0; m < n; ++m) {
        if (taken[m]) continue;
        if (r-- == 0) {
          pick = m;
          break;
        }
      }
    }
    taken[pick] = 1;
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> sample_paths(std::span<const double> pi, int count, std::uint64_t seed,
                              std::uint64_t t, int flow) {
  auto rng = make_stream(seed, Stream::kPathSampling, {t, static_cast<std::uint64_t>(flow)});
  return sample_paths(pi, count, rng);
}

double flow_utility(const QueueMatrix& queues, const EdgeRates& rates, const Flow& flow,
                    std::span<const double> pi) {
  if (pi.size() != flow.candidate_paths.size())
    throw ValidationError("flow_utility: strategy size does not match path set");
  auto rate = [&](int a, int b) {
    auto it = rates.find({a, b});
    return it == rates.end() ? 0.0 : it->second;
  };
  double u = 0.0;
  for (std::size_t m = 0; m < pi.size(); ++m) {
    if (pi[m] == 0.0) continue;
    const auto& h = flow.candidate_paths[m].hops;
    u += queues.get(flow.id, 0) * pi[m] * rate(h[0], h[1]);
    for (std::size_t k = 1; k + 1 < h.size(); ++k) {
      const double net_in = rate(h[k - 1], h[k]) - rate(h[k], h[k + 1]);
      u -= queues.get(flow.id, h[k]) * pi[m] * net_in;
    }
  }
  return u;
}

}  // namespace mmhop
