#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "tierbid/latency.hpp"
#include "tierbid/types.hpp"

using namespace tierbid;

namespace {

SystemConfig config_with_rates(double mu1_mbps, double mu2_mbps) {
  SystemConfig cfg;
  cfg.cold_capacity_mb = 1e9;
  cfg.hot_capacity_mb = 1e9;
  cfg.cold_rate_mbps = mu1_mbps;
  cfg.hot_rate_mbps = mu2_mbps;
  cfg.cold_cost_cents_per_mb = 0.05;
  cfg.hot_cost_cents_per_mb = 0.08;
  cfg.num_slots = 1;
  return cfg;
}

Scenario one_file_scenario(double arrival, double latency_ms) {
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents = {1.0};
  sc.latency_req_ms = {latency_ms};
  sc.arrival_rate_per_s = {arrival};
  return sc;
}

}  // namespace

TEST_CASE("service moments of a two-class mix") {
  // Request sizes 1 and 2 Mb at equal rates against a 10 Mb/s server.
  TierLoad load;
  load.add(1.0, 1.0 / 8.0);
  load.add(1.0, 2.0 / 8.0);
  const auto [ex, ex2] = service_moments(load, 10.0);
  CHECK(ex == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(ex2 == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("single unit class at unit rate has unit mean service time") {
  TierLoad load;
  load.add(1.0, 1.0 / 8.0); // one request/s of 1 Mb
  const auto [ex, ex2] = service_moments(load, 1.0);
  CHECK(ex == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("doubling the rate halves the mean and quarters the second moment") {
  TierLoad load;
  load.add(3.0, 2.0);
  load.add(1.0, 0.5);
  const auto [ex1, ex2_1] = service_moments(load, 100.0);
  const auto [ex_b, ex2_b] = service_moments(load, 200.0);
  CHECK(ex_b == doctest::Approx(ex1 / 2.0).epsilon(1e-12));
  CHECK(ex2_b == doctest::Approx(ex2_1 / 4.0).epsilon(1e-12));
}

TEST_CASE("zero aggregate arrival has undefined moments") {
  TierLoad load;
  CHECK_THROWS_AS(service_moments(load, 10.0), UndefinedMomentsError);
}

TEST_CASE("mean waiting time of the reference single-class load") {
  // 100 Mb requests at 10/s against 2000 Mb/s: h=1e5, f=1000, wait 0.05 s.
  TierLoad load;
  load.add(10.0, 12.5);
  CHECK(load.f_mbps == doctest::Approx(1000.0));
  CHECK(load.h_mb2ps == doctest::Approx(1e5));
  CHECK(waiting_time(load, 2000.0) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("empty load waits zero") {
  TierLoad load;
  CHECK(waiting_time(load, 2000.0) == 0.0);
}

TEST_CASE("waiting time grows monotonically toward the pole") {
  TierLoad base;
  double prev = 0.0;
  for (int step = 1; step <= 19; ++step) {
    TierLoad load;
    load.add(step * 1.0, 12.5); // f = 100 * step against mu = 2000
    const double w = waiting_time(load, 2000.0);
    CHECK(w > prev);
    prev = w;
  }
  TierLoad unstable;
  unstable.add(20.0, 12.5); // f = mu
  CHECK_THROWS_AS(waiting_time(unstable, 2000.0), InstabilityError);
}

TEST_CASE("expected latency reduces to transfer time at vanishing load") {
  std::vector<FileSpec> files = {{0, 64.0, 1.0}};
  SystemConfig cfg = config_with_rates(gbps_to_mbps(100.0), gbps_to_mbps(200.0));
  Scenario sc = one_file_scenario(1e-9, 100.0);
  StageTwoDecision d2 = make_stage_two(1);
  d2.accept_access[0] = 1;
  d2.sched_prob[kCold][0] = 1.0;
  // 64 MB from the cold tier at 100 Gb/s: 512 Mb / 100000 Mb/s = 5.12 ms.
  CHECK(expected_latency(0, d2, sc, files, cfg) ==
        doctest::Approx(0.00512).epsilon(1e-6));
}

TEST_CASE("rejected file has zero expected latency") {
  std::vector<FileSpec> files = {{0, 64.0, 1.0}};
  SystemConfig cfg = config_with_rates(2000.0, 2000.0);
  Scenario sc = one_file_scenario(5.0, 100.0);
  StageTwoDecision d2 = make_stage_two(1);
  CHECK(expected_latency(0, d2, sc, files, cfg) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("expected latency adds service and waiting on a loaded tier") {
  // The 0.05 s waiting case: single 12.5 MB file at 10/s on a 2000 Mb/s cold
  // tier; service 100/2000 = 0.05 s, total 0.1 s.
  std::vector<FileSpec> files = {{0, 12.5, 1.0}};
  SystemConfig cfg = config_with_rates(2000.0, 2000.0);
  Scenario sc = one_file_scenario(10.0, 100.0);
  StageTwoDecision d2 = make_stage_two(1);
  d2.accept_access[0] = 1;
  d2.sched_prob[kCold][0] = 1.0;
  CHECK(expected_latency(0, d2, sc, files, cfg) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("latency slack of a rejected file is the full requirement") {
  std::vector<FileSpec> files = {{0, 64.0, 1.0}};
  SystemConfig cfg = config_with_rates(2000.0, 2000.0);
  Scenario sc = one_file_scenario(5.0, 80.0);
  StageTwoDecision d2 = make_stage_two(1);
  const auto slacks = latency_slacks(d2, sc, files, cfg);
  CHECK(slacks[0] == doctest::Approx(0.080).epsilon(1e-12));
}

TEST_CASE("an accepted file with a tight requirement shows negative slack") {
  // Total latency 0.1 s against a 30 ms requirement: slack -0.07 s.
  std::vector<FileSpec> files = {{0, 12.5, 1.0}};
  SystemConfig cfg = config_with_rates(2000.0, 2000.0);
  Scenario sc = one_file_scenario(10.0, 30.0);
  StageTwoDecision d2 = make_stage_two(1);
  d2.accept_access[0] = 1;
  d2.sched_prob[kCold][0] = 1.0;
  const auto slacks = latency_slacks(d2, sc, files, cfg);
  CHECK(slacks[0] == doctest::Approx(-0.07).epsilon(1e-9));
}

TEST_CASE("latency is convex in each scheduling probability alone") {
  std::vector<FileSpec> files = {{0, 64.0, 1.0}, {1, 256.0, 1.0}};
  SystemConfig cfg = config_with_rates(4000.0, 6000.0);
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents = {1.0, 1.0};
  sc.latency_req_ms = {1e6, 1e6};
  sc.arrival_rate_per_s = {2.0, 0.5};
  StageTwoDecision d2 = make_stage_two(2);
  d2.accept_access = {1, 1};
  d2.sched_prob[kCold] = {0.5, 0.6};
  d2.sched_prob[kHot] = {0.5, 0.4};
  for (int tier : {kCold, kHot}) {
    const int n = 20;
    std::vector<double> vals;
    for (int s = 0; s <= n; ++s) {
      StageTwoDecision d = d2;
      d.sched_prob[tier][0] = s / double(n);
      vals.push_back(expected_latency(0, d, sc, files, cfg));
    }
    for (int s = 1; s < n; ++s) {
      const double second_diff = vals[s - 1] - 2 * vals[s] + vals[s + 1];
      CHECK(second_diff >= -1e-12);
    }
  }
}

TEST_CASE("latency is jointly non-convex in the scheduling vector") {
  // Search a small deterministic sample of feasible endpoint pairs for a
  // midpoint that is strictly worse than the endpoint average.
  std::vector<FileSpec> files = {{0, 64.0, 1.0}, {1, 256.0, 1.0}};
  SystemConfig cfg = config_with_rates(4000.0, 4000.0);
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents = {1.0, 1.0};
  sc.latency_req_ms = {1e6, 1e6};
  sc.arrival_rate_per_s = {3.0, 1.0};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto latency_at = [&](const std::vector<double>& p) {
    // p = (pi_{1,hot}, pi_{2,hot}); the rest goes to cold.
    StageTwoDecision d = make_stage_two(2);
    d.accept_access = {1, 1};
    d.sched_prob[kHot] = {p[0], p[1]};
    d.sched_prob[kCold] = {1.0 - p[0], 1.0 - p[1]};
    return expected_latency(0, d, sc, files, cfg);
  };
  bool witness_found = false;
  for (int t = 0; t < 2000 && !witness_found; ++t) {
    const std::vector<double> a = {u(rng), u(rng)};
    const std::vector<double> b = {u(rng), u(rng)};
    const std::vector<double> mid = {(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
    const double lhs = latency_at(mid);
    const double rhs = (latency_at(a) + latency_at(b)) / 2;
    if (lhs > rhs + 1e-9) witness_found = true;
  }
  CHECK(witness_found);
}

TEST_CASE("latency rises with arrivals and falls with service rates") {
  std::vector<FileSpec> files = {{0, 64.0, 1.0}, {1, 128.0, 1.0}};
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents = {1.0, 1.0};
  sc.latency_req_ms = {1e6, 1e6};
  sc.arrival_rate_per_s = {2.0, 1.0};
  StageTwoDecision d2 = make_stage_two(2);
  d2.accept_access = {1, 1};
  d2.sched_prob[kCold] = {0.7, 0.4};
  d2.sched_prob[kHot] = {0.3, 0.6};
  SystemConfig cfg = config_with_rates(4000.0, 6000.0);
  const double base = expected_latency(0, d2, sc, files, cfg);

  for (std::size_t j : {std::size_t(0), std::size_t(1)}) {
    Scenario bumped = sc;
    bumped.arrival_rate_per_s[j] += 0.5;
    CHECK(expected_latency(0, d2, bumped, files, cfg) >= base - 1e-12);
  }
  SystemConfig faster_cold = config_with_rates(5000.0, 6000.0);
  SystemConfig faster_hot = config_with_rates(4000.0, 8000.0);
  CHECK(expected_latency(0, d2, sc, files, faster_cold) <= base + 1e-12);
  CHECK(expected_latency(0, d2, sc, files, faster_hot) <= base + 1e-12);
}
