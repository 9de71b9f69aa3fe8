#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mmhop/common/rng.hpp"
#include "mmhop/model/topology.hpp"
#include "mmhop/queueing/queues.hpp"

namespace mmhop {

// Step sizes 1/(t+1)^e. Utility estimates must move fastest, so the exponents
// are strictly increasing.
struct LearningSchedule {
  double xi_exponent = 0.5;
  double gamma_exponent = 0.55;
  double iota_exponent = 0.6;

  void validate() const;
  double xi(long t) const;
  double gamma(long t) const;
  double iota(long t) const;
};

struct StepRates {
  double xi = 1.0;
  double gamma = 1.0;
  double iota = 1.0;
};

// pi^m proportional to [r^m]^+; uniform when no regret is positive.
std::vector<double> regret_strategy(std::span<const double> regrets);

// Softmax of [r]^+ / kappa, i.e. the maximiser of sum pi r - kappa pi ln pi
// over the simplex. Regrets are clipped to +-regret_cap first.
std::vector<double> bg_strategy(std::span<const double> regrets, double kappa,
                                double regret_cap = 1e6);

struct FlowLearner {
  std::vector<double> u_hat;
  std::vector<double> r_hat;
  std::vector<double> pi;
  double kappa = 5.0;

  static FlowLearner uniform(int num_paths, double kappa);
};

// One round of the coupled utility / regret / strategy update. `chosen` holds
// the path indices whose indicator is one this round.
void learn_step(FlowLearner& fl, std::span<const int> chosen, double observed,
                const StepRates& rates, double regret_cap = 1e6);

struct LearnerState {
  std::vector<FlowLearner> flows;
  LearningSchedule schedule;
  double regret_cap = 1e6;
};

// Functional form over the whole state; round index t selects the step sizes.
LearnerState learn_step(LearnerState state, int flow, int chosen, double observed, long t);

// Draws `count` distinct indices by repeated sampling from pi renormalised
// over the remaining paths (uniform over them once their mass is zero).
std::vector<int> sample_paths(std::span<const double> pi, int count, SplitMix64& rng);
std::vector<int> sample_paths(std::span<const double> pi, int count, std::uint64_t seed,
                              std::uint64_t t, int flow = 0);

// Realised per-edge rates of one flow, keyed by (from, to).
using EdgeRates = std::map<std::pair<int, int>, double>;

// u_f = Q_f^0 sum_m pi^m R(0, first hop) - sum_relays Q_f^i sum_m pi^m (R_in - R_out).
double flow_utility(const QueueMatrix& queues, const EdgeRates& rates, const Flow& flow,
                    std::span<const double> pi);

}  // namespace mmhop
