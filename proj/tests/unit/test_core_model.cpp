#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmhop/common/error.hpp"
#include "mmhop/common/rng.hpp"
#include "mmhop/common/units.hpp"
#include "mmhop/model/antenna.hpp"
#include "mmhop/model/channel.hpp"
#include "mmhop/model/topology.hpp"
#include "oracles.hpp"

using namespace mmhop;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("antenna pattern") {
  const auto v = oracle::frozen();
  CHECK(antenna_gain(kPi, kPi / 6, 0.1) == doctest::Approx(0.1));
  CHECK(antenna_gain(0.0, 1.3, 1.0) == doctest::Approx(1.0));
  CHECK(antenna_gain(0.0, kPi / 6, 0.1) == doctest::Approx(v["antenna_pi6_0_0.1"].get<double>()).epsilon(1e-12));
  CHECK_THROWS_AS(antenna_gain(0.0, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(antenna_gain(0.0, 2 * kPi, 0.1), ValidationError);

  SUBCASE("never below the side lobe, exactly the side lobe outside the main lobe") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> w(-kPi, kPi), th(0.01, 2 * kPi - 0.01), eta(0.001, 1.0);
    for (int i = 0; i < 2000; ++i) {
      const double omega = w(rng), theta = th(rng), e = eta(rng);
      const double g = antenna_gain(omega, theta, e);
      CHECK(g >= e - 1e-15);
      if (std::abs(omega) > theta / 2) CHECK(g == e);
    }
  }
}

TEST_CASE("LOS path loss") {
  const auto v = oracle::frozen();
  CHECK(pathloss_los_db(1.0) == doctest::Approx(61.4));
  CHECK(pathloss_los_db(100.0) == doctest::Approx(v["pathloss_100m_db"].get<double>()));
  CHECK_THROWS_AS(pathloss_los_db(0.5), ValidationError);
  double prev = pathloss_los_db(1.0);
  for (double d = 1.5; d < 500.0; d *= 1.3) {
    CHECK(pathloss_los_db(d) >= prev);
    prev = pathloss_los_db(d);
  }
}

TEST_CASE("Shannon link rate") {
  CHECK(link_rate_bps(1.0, 1.0, 1e9) == doctest::Approx(1e9));
  CHECK(link_rate_bps(3.0, 1.0, 1e9) == doctest::Approx(2e9));
  CHECK(link_rate_bps(0.0, 5.0, 1e9) == 0.0);
  CHECK(link_rate_bps(2.0, 1.0, 1e9) > link_rate_bps(1.0, 1.0, 1e9));

  SUBCASE("concave in power") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> p(0.0, 20.0), g(0.01, 50.0);
    for (int i = 0; i < 1000; ++i) {
      const double a = p(rng), b = p(rng), gg = g(rng);
      const double mid = link_rate_bps(0.5 * (a + b), gg, 1e9);
      CHECK(mid >= 0.5 * (link_rate_bps(a, gg, 1e9) + link_rate_bps(b, gg, 1e9)) - 1e-3);
    }
  }
}

TEST_CASE("array gain and ergodic rate") {
  // E|h^H v|^2 = N with perfect CSI and 1 with an independent estimate.
  CHECK(mean_array_gain_mc(8, 0.0, 100000, 3) == doctest::Approx(8.0).epsilon(0.05));
  CHECK(mean_array_gain_mc(8, 1.0, 100000, 3) == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(mean_array_gain_mc(8, 0.0, 0, 3), ValidationError);

  LinkChannel link;
  link.distance_m = 60.0;
  link.noise_power_w = units::noise_power_watts(1e9, 10.0);
  CHECK(ergodic_rate_mc(link, 0.0, {}, 1000, 5) == 0.0);
  CHECK_THROWS_AS(ergodic_rate_mc(link, 1.0, {}, 0, 5), ValidationError);

  SUBCASE("beamforming gain ordering in the CSI accuracy") {
    for (int n : {2, 4, 8, 16}) {
      LinkChannel good = link, bad = link;
      good.antennas = bad.antennas = n;
      good.csi_error = 0.0;
      bad.csi_error = 1.0;
      CHECK(ergodic_rate_mc(good, 0.5, {}, 20000, 9) > ergodic_rate_mc(bad, 0.5, {}, 20000, 9));
    }
  }

  SUBCASE("interference lowers the rate") {
    const Interferer i{1.0, link.large_scale_gain()};
    CHECK(ergodic_rate_mc(link, 1.0, std::span(&i, 1), 20000, 4) < ergodic_rate_mc(link, 1.0, {}, 20000, 4));
  }

  SUBCASE("deterministic per seed") {
    CHECK(ergodic_rate_mc(link, 1.0, {}, 5000, 42) == ergodic_rate_mc(link, 1.0, {}, 5000, 42));
  }

  SUBCASE("effective gain folds in the interference margin") {
    LinkChannel l = link;
    l.max_interference = 3.0;
    CHECK(l.effective_gain(2.0) == doctest::Approx(l.normalized_gain(2.0) / 4.0));
  }

  SUBCASE("link validation") {
    LinkChannel l = link;
    l.csi_error = 1.5;
    CHECK_THROWS_AS(l.validate(), ValidationError);
    l = link;
    l.sidelobe_gain = 0.0;
    CHECK_THROWS_AS(l.validate(), ValidationError);
  }
}

TEST_CASE("topology invariants") {
  CHECK_NOTHROW(Topology(1, 1, {{0, 1, 50}, {1, 2, 50}}));
  CHECK_THROWS_AS(Topology(1, 1, {{1, 2, 50}}), ValidationError);             // MBS has no out-edge
  CHECK_THROWS_AS(Topology(1, 1, {{0, 1, 50}, {2, 1, 50}}), ValidationError); // UE transmits
  CHECK_THROWS_AS(Topology(1, 1, {{0, 1, 50}}), ValidationError);             // UE unreachable
  CHECK_THROWS_AS(Topology(1, 1, {{0, 2, 50}, {0, 2, 60}}), ValidationError); // duplicate edge

  const Topology t(1, 1, {{0, 1, 50}, {1, 2, 50}});
  CHECK_NOTHROW(validate_path(t, Path{{0, 1, 2}}, 2));
  CHECK_THROWS_AS(validate_path(t, Path{{1, 2}}, 2), ValidationError);
  CHECK_THROWS_AS(validate_path(t, Path{{0, 2}}, 2), ValidationError);
}

TEST_CASE("flow invariants") {
  const Topology t(2, 1, {{0, 1, 50}, {0, 2, 50}, {1, 3, 50}, {2, 3, 50}, {1, 2, 50}});
  Flow f{0, 3, {Path{{0, 1, 3}}, Path{{0, 2, 3}}}, 10.0, 100.0};
  CHECK_NOTHROW(f.validate(t));
  Flow overlap{0, 3, {Path{{0, 1, 3}}, Path{{0, 1, 2, 3}}}, 10.0, 100.0};
  CHECK_THROWS_AS(overlap.validate(t), ValidationError);
  Flow no_cap = f;
  no_cap.rate_cap_bits = 0.0;
  CHECK_THROWS_AS(no_cap.validate(t), ValidationError);
}

TEST_CASE("disjoint path enumeration") {
  const auto v = oracle::frozen();
  SUBCASE("line graph") {
    const Topology t(1, 1, {{0, 1, 50}, {1, 2, 50}});
    const auto p = enumerate_disjoint_paths(t, 0, 2, 4);
    REQUIRE(p.size() == 1);
    CHECK(p[0].hops == std::vector<int>{0, 1, 2});
  }
  SUBCASE("diamond") {
    const Topology t(2, 1, {{0, 1, 50}, {0, 2, 50}, {1, 3, 50}, {2, 3, 50}});
    CHECK(enumerate_disjoint_paths(t, 0, 3, 4).size() == v["diamond_paths"].get<std::size_t>());
  }
  SUBCASE("disconnected destination") {
    // UE 3 is fed only by SCBS 2, which the MBS cannot reach.
    const Topology t(2, 1, {{0, 1, 50}, {2, 3, 50}});
    CHECK(enumerate_disjoint_paths(t, 0, 3, 4).empty());
  }
  SUBCASE("matches brute force on random small graphs") {
    std::mt19937_64 rng(2024);
    std::bernoulli_distribution coin(0.45);
    for (int trial = 0; trial < 300; ++trial) {
      const int scbs = 1 + static_cast<int>(rng() % 4);  // up to 6 nodes in total
      const int ues = 1;
      std::vector<Edge> edges;
      for (int a = 0; a <= scbs; ++a)
        for (int b = 1; b <= scbs + ues; ++b)
          if (a != b && coin(rng)) edges.push_back({a, b, 50.0});
      edges.push_back({0, 1 + static_cast<int>(rng() % scbs), 50.0});
      edges.push_back({1 + static_cast<int>(rng() % scbs), scbs + 1, 50.0});
      std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        return std::pair(x.from, x.to) < std::pair(y.from, y.to);
      });
      edges.erase(std::unique(edges.begin(), edges.end(),
                              [](const Edge& x, const Edge& y) { return x.from == y.from && x.to == y.to; }),
                  edges.end());
      const Topology t(scbs, ues, edges);
      const int cap = 1 + static_cast<int>(rng() % 3);
      const auto got = enumerate_disjoint_paths(t, 0, scbs + 1, cap);
      const auto want = oracle::disjoint_paths(t, scbs + 1, cap);
      CHECK(got == want);
      for (std::size_t a = 0; a < got.size(); ++a) {
        CHECK_NOTHROW(validate_path(t, got[a], scbs + 1));
        for (std::size_t b = a + 1; b < got.size(); ++b) CHECK(node_disjoint(got[a], got[b]));
      }
    }
  }
}

TEST_CASE("power vector budgets") {
  PowerVector pv({20.0, 1.0});
  pv.set(0, 1, 0, 12.0);
  pv.set(0, 2, 1, 8.0);
  pv.set(1, 3, 0, 1.0);
  CHECK(pv.node_total(0) == doctest::Approx(20.0));
  CHECK(pv.within_budgets());
  pv.set(1, 4, 1, 0.5);
  CHECK_FALSE(pv.within_budgets());
  CHECK_THROWS_AS(pv.set(0, 1, 0, -1.0), ValidationError);
  CHECK_THROWS_AS(pv.set(5, 1, 0, 1.0), ValidationError);
}

TEST_CASE("independent random streams") {
  auto a = make_stream(1, Stream::kArrivals, {3, 4});
  auto b = make_stream(1, Stream::kArrivals, {3, 4});
  auto c = make_stream(1, Stream::kFading, {3, 4});
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
}
