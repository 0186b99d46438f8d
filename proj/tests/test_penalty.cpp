#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "tierbid/penalty.hpp"
#include "tierbid/types.hpp"

using namespace tierbid;

namespace {

SystemConfig small_config() {
  SystemConfig cfg;
  cfg.cold_capacity_mb = 1000.0;
  cfg.hot_capacity_mb = 500.0;
  cfg.cold_rate_mbps = 1000.0;
  cfg.hot_rate_mbps = 2000.0;
  cfg.cold_cost_cents_per_mb = 0.05;
  cfg.hot_cost_cents_per_mb = 0.08;
  cfg.num_slots = 1;
  return cfg;
}

}  // namespace

TEST_CASE("g saturates to -1 at the midpoint for steep slopes") {
  CHECK(std::abs(penalty_g(0.5, 1e6) + 1.0) < 1e-12);
}

TEST_CASE("g is symmetric about one half") {
  for (double alpha : {10.0, 1e3, 1e6}) {
    for (double x : {-2.0, -0.3, 0.0, 0.1, 0.25, 0.5, 0.7, 0.99, 1.0, 1.8, 3.0}) {
      CHECK(penalty_g(x, alpha) == doctest::Approx(penalty_g(1.0 - x, alpha)).epsilon(1e-12));
    }
  }
}

TEST_CASE("g vanishes far outside the unit interval") {
  CHECK(std::abs(penalty_g(-10.0, 1e6)) < 1e-12);
  CHECK(std::abs(penalty_g(11.0, 1e6)) < 1e-12);
}

TEST_CASE("g1 is exactly zero at both endpoints") {
  for (double alpha : {10.0, 1e3, 1e6}) {
    CHECK(std::abs(penalty_g1(0.0, alpha)) <= 1e-12);
    CHECK(std::abs(penalty_g1(1.0, alpha)) <= 1e-12);
  }
}

TEST_CASE("g1 at the midpoint is about minus one half") {
  CHECK(penalty_g1(0.5, 1e6) == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("g1 is strictly negative on the open interval") {
  for (double alpha : {10.0, 1e3, 1e6}) {
    for (int n = 1; n < 1000; ++n) {
      const double x = n / 1000.0;
      CHECK(penalty_g1(x, alpha) < 0.0);
    }
  }
}

TEST_CASE("no NaN or infinity anywhere on a wide interval") {
  for (double alpha : {10.0, 1e3, 1e6}) {
    for (int n = 0; n <= 21000; ++n) {
      const double x = -10.0 + n * 0.001;
      const double g = penalty_g(x, alpha);
      const double g1 = penalty_g1(x, alpha);
      const double d = penalty_g_grad(x, alpha);
      REQUIRE(std::isfinite(g));
      REQUIRE(std::isfinite(g1));
      REQUIRE(std::isfinite(d));
    }
  }
}

TEST_CASE("analytic gradient matches central differences away from saturation") {
  for (double alpha : {10.0, 100.0}) {
    for (double x : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95}) {
      const double d = penalty_g_grad(x, alpha);
      if (std::abs(d) <= 1e-12) continue;
      const double eps = 1e-6;
      const double fd = (penalty_g(x + eps, alpha) - penalty_g(x - eps, alpha)) / (2 * eps);
      CHECK(d == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("all-zero decisions give a zero relaxed objective") {
  std::vector<FileSpec> files = {{0, 64.0, 16.0}};
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents = {10.0};
  sc.latency_req_ms = {100.0};
  sc.arrival_rate_per_s = {1.0};
  PenaltyParams pen;
  const double v = relaxed_objective({0.0}, {0.0}, {{0.0}}, {sc}, files, small_config(), pen);
  CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("relaxed objective equals expected profit at integral points") {
  std::vector<FileSpec> files = {{0, 64.0, 16.0}, {1, 128.0, 20.0}};
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents = {10.0, 4.0};
  sc.latency_req_ms = {100.0, 100.0};
  sc.arrival_rate_per_s = {1.0, 1.0};
  SystemConfig cfg = small_config();
  PenaltyParams pen;
  // A=(1,1), R=(1,0), H=(1,0): profit = P1 + P2 - cost + T q1.
  const double storage_cost = 64.0 * cfg.cold_cost_cents_per_mb + 64.0 * cfg.hot_cost_cents_per_mb +
                              2 * 128.0 * cfg.cold_cost_cents_per_mb;
  const double expect = 16.0 + 20.0 - storage_cost + 10.0;
  const double v =
      relaxed_objective({1.0, 1.0}, {1.0, 0.0}, {{1.0, 0.0}}, {sc}, files, cfg, pen);
  CHECK(v == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("a single half-valued acceptance costs about half the penalty weight") {
  std::vector<FileSpec> files = {{0, 64.0, 16.0}};
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents = {0.0};
  sc.latency_req_ms = {100.0};
  sc.arrival_rate_per_s = {0.0};
  SystemConfig cfg = small_config();
  PenaltyParams pen; // weight 1e9
  const double with_pen =
      relaxed_objective({0.5}, {0.0}, {{0.0}}, {sc}, files, cfg, pen);
  // Penalty-free value of the same fractional point.
  const double plain = 0.5 * 16.0 - 0.5 * 2 * 64.0 * cfg.cold_cost_cents_per_mb;
  CHECK(plain - with_pen == doctest::Approx(5e8).epsilon(1e-6));
}

TEST_CASE("raising the penalty weight never raises the objective") {
  std::vector<FileSpec> files = {{0, 64.0, 16.0}};
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents = {5.0};
  sc.latency_req_ms = {100.0};
  sc.arrival_rate_per_s = {1.0};
  SystemConfig cfg = small_config();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double a = u(rng), r = u(rng) * a, h = u(rng) * a;
    double prev = std::numeric_limits<double>::infinity();
    for (double w : {1.0, 1e3, 1e6, 1e9}) {
      PenaltyParams pen;
      pen.alpha = 100.0;
      pen.weight = w;
      const double v = relaxed_objective({a}, {r}, {{h}}, {sc}, files, cfg, pen);
      CHECK(v <= prev + 1e-9);
      prev = v;
    }
  }
}
