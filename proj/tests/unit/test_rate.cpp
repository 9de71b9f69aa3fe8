#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mmhop/common/error.hpp"
#include "mmhop/rate/aux_rate.hpp"
#include "mmhop/rate/dump.hpp"
#include "mmhop/rate/grid_oracle.hpp"
#include "mmhop/rate/sca.hpp"
#include "oracles.hpp"
#include "random_instances.hpp"

using namespace mmhop;

namespace {

// Concave nu ln a - y a on [0, a_max] by golden-section search.
double aux_by_search(double y, double nu, double a_max) {
  auto f = [&](double a) { return nu * std::log(a) - y * a; };
  double lo = 1e-300, hi = a_max;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 300; ++i) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2)) lo = m1;
    else hi = m2;
  }
  return 0.5 * (lo + hi);
}

SubflowInput direct(int id, int ue, double gain, double weight) {
  SubflowInput s;
  s.subflow = s.flow = id;
  s.hops = {0, ue};
  s.edge_gains = {gain};
  s.weight = weight;
  s.cap_bits = 1e12;
  return s;
}

}  // namespace

TEST_CASE("auxiliary rate") {
  const auto v = oracle::frozen();
  CHECK(aux_optimum(20.0, 100.0, 10.0) == v["aux_100_20_10"].get<double>());
  CHECK(aux_optimum(0.0, 100.0, 7.0) == 7.0);
  CHECK(aux_optimum(1.0, 100.0, 7.0) == 7.0);
  CHECK(aux_optimum(1e9, 0.0, 7.0) == 0.0);
  CHECK_THROWS_AS(aux_optimum(-1.0, 1.0, 1.0), ValidationError);

  SUBCASE("nu / Y on random unclamped pairs, and the golden-section optimum everywhere") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lg(-3.0, 9.0);
    for (int i = 0; i < 1000; ++i) {
      const double nu = std::pow(10.0, lg(rng)), y = std::pow(10.0, lg(rng));
      const double a_max = 2.0 * nu / y;
      CHECK(aux_optimum(y, nu, a_max) == doctest::Approx(nu / y).epsilon(1e-12));
      const double tight = 0.3 * nu / y;
      CHECK(aux_optimum(y, nu, tight) == tight);
      CHECK(aux_optimum(y, nu, a_max) == doctest::Approx(aux_by_search(y, nu, a_max)).epsilon(1e-6));
    }
  }
}

TEST_CASE("constraint count of the rate program") {
  const auto v = oracle::frozen();
  SlotInputs in;
  in.budgets_w = {10.0, 1.0, 1.0};
  for (int s = 0; s < 2; ++s) {
    SubflowInput f;
    f.subflow = f.flow = s;
    f.hops = {0, 1 + s, 3 + s};
    f.edge_gains = {50.0, 80.0};
    f.weight = 1e6;
    f.mbs_slack_bits = 1e4;
    f.relay_slack_bits = {1e4};
    f.cap_bits = 1e6;
    in.subflows.push_back(f);
  }
  const auto p = build_subproblem(in);
  CHECK(p.num_constraints() == v["constraint_count_2flow_2hop"].get<int>());
  CHECK(p.num_relay_hops() == 2);
  CHECK(p.active_bs() == std::vector<int>{0, 1, 2});

  SUBCASE("without slack enforcement the relay constraints go") {
    in.enforce_slack = false;
    const auto q = build_subproblem(in);
    CHECK(q.num_relay_hops() == 0);
    for (const auto& s : q.subflows) CHECK(s.lb_nats == 0.0);
  }
  SUBCASE("over-budget slack is capped and reported") {
    in.subflows[0].relay_slack_bits = {1e9};
    BuildReport rep;
    const auto q = build_subproblem(in, &rep);
    CHECK(rep.capped == 1);
    CHECK(q.subflows[0].relays[0].capped);
  }
  SUBCASE("malformed inputs") {
    in.subflows[0].edge_gains.pop_back();
    CHECK_THROWS_AS(build_subproblem(in), ValidationError);
  }
}

TEST_CASE("single link uses the whole budget") {
  SlotInputs in;
  in.budgets_w = {4.0};
  in.subflows.push_back(direct(0, 1, 2.5, 3e6));
  const auto p = build_subproblem(in);
  const auto it = sca_solve(p);
  CHECK(it.x_nats[0] == doctest::Approx(std::log1p(4.0 * 2.5)).epsilon(1e-6));
  CHECK(it.power_w[0][0] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(it.objective == doctest::Approx(-3e6 * std::log1p(10.0)).epsilon(1e-6));
}

TEST_CASE("symmetric subflows split the budget evenly") {
  SlotInputs in;
  in.budgets_w = {6.0, 1.0, 1.0};
  in.subflows.push_back(direct(0, 3, 4.0, 2e6));
  in.subflows.push_back(direct(1, 4, 4.0, 2e6));
  const auto it = sca_solve(build_subproblem(in));
  CHECK(it.power_w[0][0] == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(it.power_w[1][0] == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(it.x_nats[0] == doctest::Approx(std::log1p(12.0)).epsilon(1e-6));
}

TEST_CASE("relay chain against the one-chain grid") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int solved = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const double g0 = 1.0 + 200.0 * u(rng), g1 = 1.0 + 200.0 * u(rng);
    const double d = 2.0 * u(rng) - 1.0, w = 1e6 * (0.5 + u(rng));
    SlotInputs in;
    in.budgets_w = {1.0, 1.0};
    SubflowInput f;
    f.hops = {0, 1, 2};
    f.edge_gains = {g0, g1};
    f.weight = w;
    f.mbs_slack_bits = 0.0;
    f.relay_slack_bits = {in.scale.nats_to_bits(d)};
    f.cap_bits = 1e12;
    in.subflows.push_back(f);
    const auto p = build_subproblem(in);
    if (p.subflows[0].relays.empty()) continue;
    const double dd = p.subflows[0].relays[0].d_nats;
    const double want = oracle::chain_grid(w, g0, g1, 0.0, p.subflows[0].cap_nats, dd, 401);
    // Closed form: the relay runs flat out and the MBS edge sits on the constraint.
    const double x_star = std::min(std::log1p(g0), std::log1p(g1) - dd);
    if (x_star <= 0.0 || !std::isfinite(want)) continue;
    const auto it = sca_solve(p);
    CHECK(it.objective == doctest::Approx(-w * x_star).epsilon(1e-6));
    CHECK(it.objective <= want + 1e-6 * std::abs(want));
    CHECK(it.objective == doctest::Approx(want).epsilon(1e-3));
    const auto grid = grid_oracle_objective(p);
    REQUIRE(grid.has_value());
    CHECK(*grid == doctest::Approx(-w * x_star).epsilon(1e-5));
    ++solved;
  }
  CHECK(solved >= 20);
}

TEST_CASE("SCA on random small instances") {
  std::mt19937_64 rng(2718);
  int solved = 0, attempts = 0;
  while (solved < 100 && attempts < 1000) {
    ++attempts;
    // Clamped slack sits exactly on the edge of feasibility; no grid point
    // can land there.
    BuildReport rep;
    const auto p = build_subproblem(oracle::random_slot(rng), &rep);
    if (rep.capped > 0) continue;
    ScaIterate it;
    try {
      it = sca_solve(p);
    } catch (const InfeasibleInstance&) {
      continue;
    }
    ++solved;
    const auto grid = grid_oracle_objective(p);
    REQUIRE(grid.has_value());
    CHECK(it.objective == doctest::Approx(*grid).epsilon(1e-3));
    for (std::size_t k = 1; k < it.history.size(); ++k)
      CHECK(it.history[k] <= it.history[k - 1] + 1e-6 * (1.0 + std::abs(it.history[k - 1])));
    const auto lay = ScaLayout::of(p);
    CHECK(original_violation(p, lay, it.z) <= 1e-6);
    CHECK(it.stationarity < 1e-6);
    CHECK(it.complementarity < 1e-6);
    for (std::size_t s = 0; s < it.power_w.size(); ++s)
      for (double w : it.power_w[s]) CHECK(w >= 0.0);
  }
  CHECK(solved == 100);
}

TEST_CASE("warm start reaches the same point") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto p = build_subproblem(oracle::random_slot(rng));
    try {
      const auto cold = sca_solve(p);
      const auto warm = sca_solve(p, {}, cold.z);
      CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-5));
    } catch (const InfeasibleInstance&) {
    }
  }
}

TEST_CASE("barrier solver on a small LP") {
  // min -z0 - z1 s.t. z0 + 2 z1 <= 4, 3 z0 + z1 <= 6, z >= 0; optimum (1.6, 1.2).
  ConvexProgram prog;
  prog.num_vars = 2;
  prog.cost = Eigen::Vector2d(-1.0, -1.0);
  prog.constraints = {Constraint::linear({{0, 1.0}, {1, 2.0}}, 4.0), Constraint::linear({{0, 3.0}, {1, 1.0}}, 6.0),
                      Constraint::lower(0, 0.0, true), Constraint::lower(1, 0.0, true)};
  const auto r = solve_convex(prog, Eigen::Vector2d(0.1, 0.1));
  CHECK(r.z[0] == doctest::Approx(1.6).epsilon(1e-6));
  CHECK(r.z[1] == doctest::Approx(1.2).epsilon(1e-6));
  const auto [stat, comp] = kkt_residuals(prog, r.z, r.duals);
  CHECK(stat < 1e-6);
  CHECK(comp < 1e-6);
  CHECK(prog.num_structural() == 2);
  CHECK_THROWS(solve_convex(prog, Eigen::Vector2d(5.0, 5.0)));
}

TEST_CASE("rate program dump round trip") {
  std::mt19937_64 rng(5);
  const auto p = build_subproblem(oracle::random_slot(rng));
  ScaRecord rec;
  rec.slot = 17;
  rec.seed = 3;
  rec.policy = "proposed";
  rec.problem = p;
  try {
    const auto it = sca_solve(p);
    rec.objective = it.objective;
    rec.x_nats = it.x_nats;
    rec.power_w = it.power_w;
    rec.iterations = it.iterations;
  } catch (const InfeasibleInstance&) {
  }
  const auto line = to_json_line(rec);
  const auto back = parse_json_line(line);
  CHECK(to_json_line(back) == line);
  CHECK(back.slot == 17);
  CHECK(back.policy == "proposed");
  CHECK(back.x_nats == rec.x_nats);
  CHECK(back.problem.subflows.size() == p.subflows.size());
  CHECK_THROWS_AS(parse_json_line("{not json"), IoError);

  const auto path = std::filesystem::temp_directory_path() / "mmhop_dump_test.jsonl";
  {
    std::ofstream out(path);
    out << line << "\n" << line << "\n";
  }
  CHECK(read_dump(path.string()).size() == 2);
  std::filesystem::remove(path);
}
