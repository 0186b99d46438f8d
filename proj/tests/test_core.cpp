#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "tierbid/feasibility.hpp"
#include "tierbid/types.hpp"

using namespace tierbid;

namespace {

SystemConfig base_config() {
  SystemConfig cfg;
  cfg.cold_capacity_mb = 1000.0;
  cfg.hot_capacity_mb = 500.0;
  cfg.cold_rate_mbps = 2000.0;
  cfg.hot_rate_mbps = 4000.0;
  cfg.cold_cost_cents_per_mb = 0.05;
  cfg.hot_cost_cents_per_mb = 0.08;
  cfg.num_slots = 1;
  return cfg;
}

Scenario uniform_scenario(std::size_t n, double q, double l_ms, double lambda) {
  Scenario sc;
  sc.index = 0;
  sc.probability = 1.0;
  sc.access_bid_cents.assign(n, q);
  sc.latency_req_ms.assign(n, l_ms);
  sc.arrival_rate_per_s.assign(n, lambda);
  return sc;
}

}  // namespace

TEST_CASE("two small files fit exactly into tight capacities") {
  std::vector<FileSpec> files = {{0, 1.0, 1.0}, {1, 1.0, 1.0}};
  SystemConfig cfg = base_config();
  cfg.cold_capacity_mb = 3.0;
  cfg.hot_capacity_mb = 1.0;
  StageOneDecision d1 = make_stage_one(2);
  d1.accept = {1, 1};
  d1.hot_replica = {1, 0};
  const auto report = check_stage_one_feasible(d1, files, cfg);
  CHECK(report.feasible);
  // Cold usage S(2A-R) = 1 + 2 = 3 against 3; hot usage 1 against 1.
  const auto* cold = report.find("cold_capacity");
  const auto* hot = report.find("hot_capacity");
  REQUIRE(cold != nullptr);
  REQUIRE(hot != nullptr);
  CHECK(cold->slack == doctest::Approx(0.0).scale(1.0));
  CHECK(hot->slack == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("a hot replica without acceptance is infeasible") {
  std::vector<FileSpec> files = {{0, 1.0, 1.0}, {1, 1.0, 1.0}};
  StageOneDecision d1 = make_stage_one(2);
  d1.accept = {0, 0};
  d1.hot_replica = {1, 0};
  CHECK_FALSE(check_stage_one_feasible(d1, files, base_config()).feasible);
}

TEST_CASE("storing everything can exceed the cold capacity") {
  std::vector<FileSpec> files;
  const double sizes[5] = {64, 128, 256, 512, 1024};
  for (int i = 0; i < 1000; ++i) files.push_back({i, sizes[i % 5], 1.0});
  SystemConfig cfg = base_config();
  cfg.cold_capacity_mb = 400.0 * 1000.0;
  cfg.hot_capacity_mb = 200.0 * 1000.0;
  StageOneDecision d1 = make_stage_one(1000);
  for (int i = 0; i < 1000; ++i) d1.accept[i] = 1;
  CHECK_FALSE(check_stage_one_feasible(d1, files, cfg).feasible);
}

TEST_CASE("empty access acceptance is always stage-two feasible") {
  std::vector<FileSpec> files = {{0, 64.0, 10.0}, {1, 128.0, 12.0}};
  SystemConfig cfg = base_config();
  StageOneDecision d1 = make_stage_one(2);
  d1.accept = {1, 1};
  Scenario sc = uniform_scenario(2, 5.0, 50.0, 10.0);
  StageTwoDecision d2 = make_stage_two(2);
  const auto report = check_stage_two_feasible(d2, d1, sc, files, cfg);
  CHECK(report.feasible);
  for (const auto& s : report.slacks) CHECK(s.slack >= 0.0);
}

TEST_CASE("access acceptance without storage acceptance is infeasible") {
  std::vector<FileSpec> files = {{0, 64.0, 10.0}};
  StageOneDecision d1 = make_stage_one(1);
  Scenario sc = uniform_scenario(1, 5.0, 1000.0, 0.001);
  StageTwoDecision d2 = make_stage_two(1);
  d2.accept_access[0] = 1;
  d2.sched_prob[kCold][0] = 1.0;
  CHECK_FALSE(check_stage_two_feasible(d2, d1, sc, files, base_config()).feasible);
}

TEST_CASE("single file load sits under the cold-rate bound") {
  // lambda=10/s, 8S=100 Mb, mu1=2000 Mb/s: load 1000 <= 2000.
  std::vector<FileSpec> files = {{0, 12.5, 10.0}};
  SystemConfig cfg = base_config();
  cfg.stability_margin = 0.0;
  StageOneDecision d1 = make_stage_one(1);
  d1.accept = {1};
  Scenario sc = uniform_scenario(1, 5.0, 1000.0, 10.0);
  StageTwoDecision d2 = make_stage_two(1);
  d2.accept_access[0] = 1;
  d2.sched_prob[kCold][0] = 1.0;
  const auto report = check_stage_two_feasible(d2, d1, sc, files, cfg);
  CHECK(report.feasible);
  const auto* stab = report.find("stability_cold");
  REQUIRE(stab != nullptr);
  CHECK(stab->slack == doctest::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("no acceptance earns zero profit") {
  std::vector<FileSpec> files = {{0, 64.0, 10.0}};
  Scenario sc = uniform_scenario(1, 5.0, 50.0, 1.0);
  StageOneDecision d1 = make_stage_one(1);
  std::vector<StageTwoDecision> d2 = {make_stage_two(1)};
  const auto p = profit_expected(d1, d2, {sc}, files, base_config());
  CHECK(p.total_cents() == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("hand-computed expected profit of one accepted file") {
  // P=16, S=64, A=1, R=0, c1=0.05/MB, T=1, one scenario with q=10, H=1:
  // 16 - 64*2*0.05 + 10 = 19.6 cents.
  std::vector<FileSpec> files = {{0, 64.0, 16.0}};
  SystemConfig cfg = base_config();
  StageOneDecision d1 = make_stage_one(1);
  d1.accept = {1};
  Scenario sc = uniform_scenario(1, 10.0, 1000.0, 0.01);
  StageTwoDecision d2 = make_stage_two(1);
  d2.accept_access[0] = 1;
  d2.sched_prob[kCold][0] = 1.0;
  const auto p = profit_expected(d1, {d2}, {sc}, files, cfg);
  CHECK(p.storage_revenue_cents == doctest::Approx(16.0));
  CHECK(p.storage_cost_cents == doctest::Approx(6.4));
  CHECK(p.access_profit_cents == doctest::Approx(10.0));
  CHECK(p.total_cents() == doctest::Approx(19.6).epsilon(1e-12));
}

TEST_CASE("a 64 MB file at a quarter cent per MB bids 16 cents") {
  CHECK(64.0 * 0.25 == doctest::Approx(16.0));
  FileSpec f{0, 64.0, 64.0 * 0.25};
  f.validate();
  CHECK(f.storage_bid_cents == doctest::Approx(16.0));
}

TEST_CASE("unit conversions round-trip exactly") {
  for (double s : {64.0, 128.0, 256.0, 512.0, 1024.0}) {
    CHECK(mb_to_mbit(s) / kMbitPerMb == s);
  }
  CHECK(gbps_to_mbps(100.0) == doctest::Approx(100000.0));
  CHECK(ms_to_s(s_to_ms(0.0512)) == 0.0512);
  CHECK(cents_per_gb_to_per_mb(50.0) == doctest::Approx(0.05));
}

TEST_CASE("zeroing the decisions of an unaccepted file changes nothing") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4;
    std::vector<FileSpec> files;
    for (std::size_t i = 0; i < n; ++i)
      files.push_back({int(i), 64.0 * (1 + int(u(rng) * 4)), 5.0 + 10.0 * u(rng)});
    SystemConfig cfg = base_config();
    cfg.cold_capacity_mb = 5000.0;
    cfg.hot_capacity_mb = 3000.0;
    Scenario sc = uniform_scenario(n, 0.0, 0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sc.access_bid_cents[i] = 10.0 * u(rng);
      sc.latency_req_ms[i] = 50.0 + 100.0 * u(rng);
      sc.arrival_rate_per_s[i] = 2.0 * u(rng);
    }
    StageOneDecision d1 = make_stage_one(n);
    StageTwoDecision d2 = make_stage_two(n);
    for (std::size_t i = 0; i < n; ++i) {
      d1.accept[i] = u(rng) < 0.5;
      d1.hot_replica[i] = d1.accept[i] && u(rng) < 0.5;
      d2.accept_access[i] = d1.accept[i] && u(rng) < 0.5;
      if (d2.accept_access[i]) {
        const double split = d1.hot_replica[i] ? u(rng) : 0.0;
        d2.sched_prob[kHot][i] = split;
        d2.sched_prob[kCold][i] = 1.0 - split;
      }
    }
    // Build the cleaned twin: wipe everything tied to unaccepted files.
    StageOneDecision c1 = d1;
    StageTwoDecision c2 = d2;
    for (std::size_t i = 0; i < n; ++i) {
      if (!d1.accept[i]) {
        c1.hot_replica[i] = 0;
        c2.accept_access[i] = 0;
        c2.sched_prob[kCold][i] = 0.0;
        c2.sched_prob[kHot][i] = 0.0;
      }
    }
    const bool f1 = check_stage_one_feasible(d1, files, cfg).feasible;
    const bool f1c = check_stage_one_feasible(c1, files, cfg).feasible;
    const bool cleaning_never_hurts = f1c || !f1;
    CHECK(cleaning_never_hurts);
    if (f1c) {
      const auto pa = profit_expected(c1, {c2}, {sc}, files, cfg);
      if (f1) {
        // Identical acceptances: profits agree because unaccepted files
        // contribute nothing to any term.
        StageOneDecision d1b = d1;
        const auto pb = profit_expected(d1b, {c2}, {sc}, files, cfg);
        CHECK(pa.total_cents() == doctest::Approx(pb.total_cents()).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("doubling all bids doubles revenue and leaves costs unchanged") {
  std::vector<FileSpec> files = {{0, 64.0, 16.0}, {1, 256.0, 30.0}};
  SystemConfig cfg = base_config();
  cfg.num_slots = 3;
  StageOneDecision d1 = make_stage_one(2);
  d1.accept = {1, 1};
  d1.hot_replica = {0, 1};
  Scenario sc = uniform_scenario(2, 4.0, 1000.0, 0.01);
  sc.access_bid_cents = {4.0, 7.0};
  StageTwoDecision d2 = make_stage_two(2);
  d2.accept_access = {1, 1};
  d2.sched_prob[kCold] = {1.0, 0.5};
  d2.sched_prob[kHot] = {0.0, 0.5};
  const auto p1 = profit_expected(d1, {d2}, {sc}, files, cfg);

  std::vector<FileSpec> files2 = files;
  for (auto& f : files2) f.storage_bid_cents *= 2.0;
  Scenario sc2 = sc;
  for (auto& q : sc2.access_bid_cents) q *= 2.0;
  const auto p2 = profit_expected(d1, {d2}, {sc2}, files2, cfg);
  CHECK(p2.storage_revenue_cents == doctest::Approx(2 * p1.storage_revenue_cents));
  CHECK(p2.access_profit_cents == doctest::Approx(2 * p1.access_profit_cents));
  CHECK(p2.storage_cost_cents == doctest::Approx(p1.storage_cost_cents));
}
