#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cellqos/capacity.hpp"
#include "cellqos/error.hpp"
#include "cellqos/rng.hpp"
#include "support/oracles.hpp"

using namespace cellqos;

namespace {

double erlang_b(double rho, int servers) {
  double b = 1.0;
  for (int k = 1; k <= servers; ++k) b = rho * b / (k + rho * b);
  return b;
}

BlockingOptions reference_options() {
  BlockingOptions opt;
  opt.shadowing = ShadowingModel::log_normal(12.0);
  opt.loss = DistanceLossParams(8667.0, 3.38);
  opt.locations = 1080;
  opt.realizations = 4;
  return opt;
}

}  // namespace

TEST_CASE("link performance function and its inverse") {
  CHECK(psi(1.0) == doctest::Approx(1.0));
  CHECK(psi(3.0) == doctest::Approx(2.0));
  CHECK(psi(3.0, 0.5) == doctest::Approx(1.0));
  CHECK(psi(0.0) == 0.0);
  CHECK_THROWS_AS(psi(-0.1), Error);
  for (double u : {0.036, 1.0, 3.0})
    for (double a : {1.0, 0.6}) CHECK(psi(psi_inverse(u, a), a) == doctest::Approx(u).epsilon(1e-12));
  CHECK(dbm_to_mw(30.0) == doctest::Approx(1000.0));
  CHECK(dbm_to_mw(0.0) == 1.0);
}

TEST_CASE("radio parameters") {
  RadioParams r;
  CHECK_NOTHROW(r.validate());
  CHECK(r.noise_to_power() == doctest::Approx(std::pow(10.0, -15.5)).epsilon(1e-13));
  RadioParams bad = r;
  bad.common_channel_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = r;
  bad.orthogonality = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = r;
  bad.bandwidth_hz = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = r;
  bad.psi_scale = 1.2;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("OFDMA admission cost") {
  const RadioParams r;
  const ServiceClass svc;
  CHECK(sinr_ofdma(1e12, 1.0, r) == doctest::Approx(0.8797218075380858).epsilon(1e-13));
  CHECK(phi_ofdma(1e12, 1.0, r, svc) == doctest::Approx(0.039537882819396374).epsilon(1e-13));
  CHECK(phi_ofdma(1e-3, 1.0, r, svc) == doctest::Approx(0.03952861416519366).epsilon(1e-9));
  CHECK(phi_ofdma(1e12, 1e6, r, svc) > 100.0);
  CHECK(std::isinf(phi_ofdma(1e12, std::numeric_limits<double>::infinity(), r, svc)));
  // increasing in both l and f
  CHECK(phi_ofdma(2e12, 1.0, r, svc) > phi_ofdma(1e12, 1.0, r, svc));
  CHECK(phi_ofdma(1e12, 2.0, r, svc) > phi_ofdma(1e12, 1.0, r, svc));
  CHECK_THROWS_AS(phi_ofdma(0.0, 1.0, r, svc), Error);
  CHECK_THROWS_AS(phi_ofdma(1.0, -1.0, r, svc), Error);
}

TEST_CASE("CDMA admission cost") {
  RadioParams r;
  const ServiceClass svc;
  const double xi = cdma_threshold(r, svc);
  CHECK(xi == doctest::Approx(0.025267237888593863).epsilon(1e-13));
  CHECK(phi_cdma(1e12, 1.0, r, xi) == doctest::Approx(0.028721850103164533).epsilon(1e-12));

  r.common_channel_fraction = 0.0;
  const double l_half = 0.5 / r.noise_to_power();
  CHECK(phi_cdma(l_half, 0.5, r, 1.0) == doctest::Approx(1.0).epsilon(1e-13));

  r.orthogonality = 0.4;
  const double expected = 2.0 / (1.0 + 0.8) * (0.5 + 0.4 + 0.5);
  CHECK(phi_cdma(l_half, 0.5, r, 2.0) == doctest::Approx(expected).epsilon(1e-13));
  CHECK_THROWS_AS(phi_cdma(1.0, 1.0, r, 0.0), Error);
}

TEST_CASE("demand discretization") {
  CHECK(discretize_demand(0.03963, 1000) == 40);
  CHECK(discretize_demand(0.039537882819396374, 1000) == 40);
  CHECK(discretize_demand(0.001, 100) == 1);
  CHECK(discretize_demand(1.2, 100) == 120);
  CHECK(discretize_demand(0.5, 10) == 5);
  CHECK(discretize_demand(std::numeric_limits<double>::infinity(), 1000) == std::int64_t{1} << 62);
  CHECK(discretize_demand(1e300, 1000) == std::int64_t{1} << 62);
  CHECK_THROWS_AS(discretize_demand(0.0, 10), Error);
  CHECK_THROWS_AS(discretize_demand(0.5, 0), Error);
}

TEST_CASE("Kaufman-Roberts worked examples") {
  const std::vector<TrafficClass> one{{1.0, 1}};
  const auto a = kaufman_roberts(one, 1);
  CHECK(a.blocking[0] == doctest::Approx(0.5).epsilon(1e-15));

  const std::vector<TrafficClass> two{{1.0, 1}, {1.0, 2}};
  const auto b = kaufman_roberts(two, 2);
  REQUIRE(b.occupancy.size() == 3);
  CHECK(b.occupancy[0] == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
  CHECK(b.occupancy[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
  CHECK(b.occupancy[2] == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(b.blocking[0] == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(b.blocking[1] == doctest::Approx(5.0 / 7.0).epsilon(1e-15));

  const auto empty = kaufman_roberts({}, 5);
  CHECK(empty.occupancy[0] == 1.0);
  CHECK(empty.blocking.empty());
}

TEST_CASE("Kaufman-Roberts reduces to Erlang B for one class") {
  for (int c : {1, 5, 20, 100}) {
    for (double rho : {0.1, 1.0, 7.5, 40.0}) {
      const std::vector<TrafficClass> k{{rho, 1}};
      CHECK(kaufman_roberts(k, c).blocking[0] == doctest::Approx(erlang_b(rho, c)).epsilon(1e-12));
    }
  }
  // d units per call on C = d * m units behaves as m servers
  const std::vector<TrafficClass> k{{3.0, 4}};
  CHECK(kaufman_roberts(k, 40).blocking[0] == doctest::Approx(erlang_b(3.0, 10)).epsilon(1e-12));
}

TEST_CASE("Kaufman-Roberts matches state enumeration on every small instance") {
  Xoshiro256pp rng(2024);
  int instances = 0;
  for (int c = 1; c <= 10; ++c) {
    for (int k = 1; k <= 3; ++k) {
      for (int trial = 0; trial < 30; ++trial) {
        std::vector<TrafficClass> classes;
        for (int j = 0; j < k; ++j) {
          const double rho = std::exp(4.0 * rng.uniform() - 2.0);
          const auto demand = static_cast<std::int64_t>(1 + (rng() % static_cast<std::uint64_t>(c + 2)));
          classes.push_back({rho, demand});
        }
        const auto kr = kaufman_roberts(classes, c);
        const auto brute = testing::enumerate_loss_system(classes, c);
        for (std::size_t n = 0; n < kr.occupancy.size(); ++n)
          CHECK(std::abs(kr.occupancy[n] - brute.occupancy[n]) <= 1e-12);
        for (std::size_t j = 0; j < classes.size(); ++j)
          CHECK(std::abs(kr.blocking[j] - brute.blocking[j]) <= 1e-12);
        ++instances;
      }
    }
  }
  CHECK(instances == 900);
}

TEST_CASE("Kaufman-Roberts invariants") {
  std::vector<TrafficClass> classes;
  for (int d = 1; d <= 60; d += 7) classes.push_back({0.7 * d, d});
  classes.push_back({2.0, 1001});
  const auto kr = kaufman_roberts(classes, 1000);
  const double total = std::accumulate(kr.occupancy.begin(), kr.occupancy.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t j = 0; j + 2 < classes.size(); ++j) CHECK(kr.blocking[j] <= kr.blocking[j + 1]);
  for (double b : kr.blocking) {
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
  }
  CHECK(kr.blocking.back() == 1.0);

  // heavy load forces the rescaling path; result still normalized
  const std::vector<TrafficClass> heavy{{5000.0, 1}, {800.0, 3}};
  const auto h = kaufman_roberts(heavy, 2000);
  CHECK(std::accumulate(h.occupancy.begin(), h.occupancy.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isfinite(h.blocking[0]));
  CHECK(h.blocking[0] > 0.5);

  CHECK_THROWS_AS(kaufman_roberts(classes, 0), Error);
  const std::vector<TrafficClass> bad{{1.0, 0}};
  CHECK_THROWS_AS(kaufman_roberts(bad, 5), Error);
}

TEST_CASE("Kaufman-Roberts agrees with a simulated loss system") {
  const std::vector<TrafficClass> classes{{4.0, 1}, {2.0, 3}, {1.0, 5}};
  const auto kr = kaufman_roberts(classes, 20);
  const auto sim = testing::simulate_loss_system(classes, 20, 200000, 20000, 20, 5);
  for (std::size_t j = 0; j < classes.size(); ++j)
    CHECK(std::abs(kr.blocking[j] - sim.blocking[j]) < 4.0 * sim.se[j] + 1e-4);
}

TEST_CASE("arrival-weighted blocking") {
  // phi = 0.6 on C = 10 units: d = 6, a single class with B = rho / (1 + rho)
  const double rho = 1.7;
  std::vector<CellDemandProfile> one(1);
  one[0].classes = {{rho, discretize_demand(0.6, 10)}};
  one[0].capacity_units = 10;
  CHECK(arrival_weighted_blocking(one) == doctest::Approx(rho / (1.0 + rho)).epsilon(1e-14));

  std::vector<CellDemandProfile> mixed(3);
  mixed[0].classes = {{1.0, 1}};
  mixed[0].capacity_units = 1;
  mixed[1].classes = {{3.0, 20}};  // always blocked
  mixed[1].capacity_units = 10;
  mixed[2].capacity_units = 10;  // no users
  CHECK(arrival_weighted_blocking(mixed) == doctest::Approx((1.0 * 0.5 + 3.0 * 1.0) / 4.0));
  CHECK(arrival_weighted_blocking({}) == 0.0);
}

TEST_CASE("blocking pipeline basics") {
  auto opt = reference_options();
  opt.locations = 200;
  opt.realizations = 2;
  const LayoutModel hex = HexModel{TorusSpec(6, 1.0)};

  opt.traffic.density_erlang_per_km2 = 0.0;
  CHECK(blocking_probability(hex, opt).mean_blocking == 0.0);
  opt.traffic.density_erlang_per_km2 = 1e-6;
  CHECK(blocking_probability(hex, opt).mean_blocking < 1e-3);

  double prev = -1.0;
  for (double density : {23.1, 34.6, 46.2}) {
    opt.traffic.density_erlang_per_km2 = density;
    const auto r = blocking_probability(hex, opt);
    CHECK(r.mean_blocking >= prev);
    CHECK(r.mean_blocking >= 0.0);
    CHECK(r.mean_blocking <= 1.0);
    CHECK(r.per_realization.size() == 2);
    prev = r.mean_blocking;
  }

  opt.realizations = 0;
  CHECK_THROWS_AS(blocking_probability(hex, opt), Error);
  opt.realizations = 1;
  opt.locations = 0;
  CHECK_THROWS_AS(blocking_probability(hex, opt), Error);
}

TEST_CASE("blocking pipeline is deterministic across thread counts") {
  auto opt = reference_options();
  opt.locations = 300;
  opt.realizations = 3;
  for (const LayoutModel& model : {LayoutModel{HexModel{TorusSpec(6, 1.0)}},
                                   LayoutModel{PoissonModel{TorusSpec(6, 1.0), 1.1547}}}) {
    for (auto tech : {Technology::Ofdma, Technology::Cdma}) {
      opt.tech = tech;
      opt.threads = 1;
      const auto a = blocking_probability(model, opt);
      opt.threads = 3;
      const auto b = blocking_probability(model, opt);
      CHECK(a.mean_blocking == b.mean_blocking);
      CHECK(a.se == b.se);
      CHECK(a.per_realization == b.per_realization);
    }
  }
}

TEST_CASE("a single realization is representative on the reference cell") {
  auto opt = reference_options();
  opt.realizations = 10;
  const auto r = blocking_probability(HexModel{TorusSpec(6, 1.0)}, opt);
  double sum = 0.0, sum_sq = 0.0;
  for (double b : r.per_realization) {
    sum += b;
    sum_sq += b * b;
  }
  const double n = static_cast<double>(r.per_realization.size());
  const double mean = sum / n;
  const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1.0));
  CHECK(mean == doctest::Approx(r.mean_blocking).epsilon(1e-12));
  CHECK(r.se == doctest::Approx(sd / std::sqrt(n)).epsilon(1e-9));
  CHECK(sd / mean < 0.10);
}
