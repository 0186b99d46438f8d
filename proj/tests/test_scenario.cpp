#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "tierbid/scenario_gen.hpp"
#include "tierbid/types.hpp"

using namespace tierbid;

TEST_CASE("same seed yields an identical population and scenario set") {
  GeneratorSpec spec;
  spec.num_files = 50;
  spec.num_scenarios = 4;
  spec.seed = 42;
  const auto files_a = generate_files(spec);
  const auto files_b = generate_files(spec);
  REQUIRE(files_a.size() == files_b.size());
  for (std::size_t i = 0; i < files_a.size(); ++i) {
    CHECK(files_a[i].size_mb == files_b[i].size_mb);
    CHECK(files_a[i].storage_bid_cents == files_b[i].storage_bid_cents);
  }
  const auto sc_a = generate_scenarios(files_a, spec);
  const auto sc_b = generate_scenarios(files_b, spec);
  REQUIRE(sc_a.size() == sc_b.size());
  for (std::size_t k = 0; k < sc_a.size(); ++k) {
    CHECK(sc_a[k].probability == sc_b[k].probability);
    for (std::size_t i = 0; i < files_a.size(); ++i) {
      CHECK(sc_a[k].access_bid_cents[i] == sc_b[k].access_bid_cents[i]);
      CHECK(sc_a[k].latency_req_ms[i] == sc_b[k].latency_req_ms[i]);
      CHECK(sc_a[k].arrival_rate_per_s[i] == sc_b[k].arrival_rate_per_s[i]);
    }
  }
}

TEST_CASE("file sizes come from the five catalog sizes with bids in range") {
  GeneratorSpec spec;
  spec.num_files = 400;
  spec.seed = 9;
  for (const auto& f : generate_files(spec)) {
    bool known = false;
    for (double s : kFileSizesMb) known = known || f.size_mb == s;
    CHECK(known);
    CHECK(f.storage_bid_cents >= 0.1 * f.size_mb - 1e-12);
    CHECK(f.storage_bid_cents <= 0.3 * f.size_mb + 1e-12);
  }
}

TEST_CASE("access bid formula on the smallest file type") {
  // 64 MB at arrival 20 and requirement 40 ms: 50*64*ln(21)/1600 = 6.09.
  CHECK(access_bid_cents(64.0, 20.0, 40.0) ==
        doctest::Approx(50.0 * 64.0 * std::log(21.0) / 1600.0).epsilon(1e-12));
  CHECK(access_bid_cents(64.0, 20.0, 40.0) == doctest::Approx(6.089).epsilon(1e-3));
}

TEST_CASE("zero arrivals bid nothing") {
  CHECK(access_bid_cents(256.0, 0.0, 60.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("latency requirement bounds scale with bytes") {
  // 64 MB = 6.4e7 bytes: lo = 30 + 12.8 = 42.8 ms, hi = 30 + 64 = 94 ms.
  CHECK(latency_req_lo_ms(64.0) == doctest::Approx(42.8).epsilon(1e-12));
  CHECK(latency_req_hi_ms(64.0) == doctest::Approx(94.0).epsilon(1e-12));
}

TEST_CASE("generated scenarios respect their invariants") {
  GeneratorSpec spec;
  spec.num_files = 120;
  spec.num_scenarios = 6;
  spec.seed = 5;
  const auto files = generate_files(spec);
  const auto scenarios = generate_scenarios(files, spec);
  REQUIRE(int(scenarios.size()) == spec.num_scenarios);
  validate_scenario_set(scenarios, files.size());
  double psum = 0.0;
  for (const auto& sc : scenarios) {
    psum += sc.probability;
    for (std::size_t i = 0; i < files.size(); ++i) {
      CHECK(sc.access_bid_cents[i] >= 0.0);
      CHECK(sc.latency_req_ms[i] >= latency_req_lo_ms(files[i].size_mb) - 1e-9);
      CHECK(sc.latency_req_ms[i] <= latency_req_hi_ms(files[i].size_mb) + 1e-9);
      CHECK(sc.arrival_rate_per_s[i] >= 0.0);
    }
  }
  CHECK(psum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scenario probabilities are uniform over the set") {
  GeneratorSpec spec;
  spec.num_files = 10;
  spec.num_scenarios = 10;
  const auto files = generate_files(spec);
  for (const auto& sc : generate_scenarios(files, spec))
    CHECK(sc.probability == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("expected total population size tracks the uniform type mix") {
  GeneratorSpec spec;
  spec.num_files = 1000;
  double avg_total = 0.0;
  const int num_seeds = 5;
  for (int s = 1; s <= num_seeds; ++s) {
    spec.seed = s;
    double total = 0.0;
    for (const auto& f : generate_files(spec)) total += f.size_mb;
    avg_total += total / num_seeds;
  }
  // 1000 files, uniform over {64..1024} MB: expect 396.8 GB within 5%.
  CHECK(avg_total == doctest::Approx(396800.0).epsilon(0.05));
}

TEST_CASE("smaller file types see larger mean arrival rates") {
  GeneratorSpec spec;
  spec.num_files = 2000;
  spec.num_scenarios = 3;
  spec.seed = 17;
  const auto files = generate_files(spec);
  const auto scenarios = generate_scenarios(files, spec);
  std::map<double, std::pair<double, long>> by_size;
  for (const auto& sc : scenarios)
    for (std::size_t i = 0; i < files.size(); ++i) {
      auto& acc = by_size[files[i].size_mb];
      acc.first += sc.arrival_rate_per_s[i];
      acc.second += 1;
    }
  double prev_mean = 1e18;
  for (const auto& [size, acc] : by_size) {
    const double mean = acc.first / acc.second;
    CHECK(mean < prev_mean);
    prev_mean = mean;
  }
}

TEST_CASE("a degenerate distribution realizes only its single scenario") {
  std::vector<Scenario> scenarios(3);
  for (int k = 0; k < 3; ++k) {
    scenarios[k].index = k;
    scenarios[k].probability = (k == 1) ? 1.0 : 0.0;
    scenarios[k].access_bid_cents = {1.0};
    scenarios[k].latency_req_ms = {50.0};
    scenarios[k].arrival_rate_per_s = {1.0};
  }
  for (int idx : realize_slots(scenarios, 200, 7)) CHECK(idx == 1);
}

TEST_CASE("slot frequencies concentrate around the scenario probabilities") {
  std::vector<Scenario> scenarios(4);
  const double probs[4] = {0.1, 0.2, 0.3, 0.4};
  for (int k = 0; k < 4; ++k) {
    scenarios[k].index = k;
    scenarios[k].probability = probs[k];
    scenarios[k].access_bid_cents = {1.0};
    scenarios[k].latency_req_ms = {50.0};
    scenarios[k].arrival_rate_per_s = {1.0};
  }
  const int T = 100000;
  std::vector<long> counts(4, 0);
  for (int idx : realize_slots(scenarios, T, 123)) ++counts[idx];
  for (int k = 0; k < 4; ++k) {
    const double sigma = std::sqrt(T * probs[k] * (1 - probs[k]));
    CHECK(std::abs(counts[k] - T * probs[k]) <= 3 * sigma);
  }
}

TEST_CASE("instances survive a JSON round trip bit for bit") {
  GeneratorSpec spec;
  spec.num_files = 30;
  spec.num_scenarios = 4;
  spec.seed = 77;
  Instance inst;
  inst.files = generate_files(spec);
  inst.scenarios = generate_scenarios(inst.files, spec);
  const Instance back = instance_from_json(instance_to_json(inst));
  REQUIRE(back.files.size() == inst.files.size());
  REQUIRE(back.scenarios.size() == inst.scenarios.size());
  for (std::size_t i = 0; i < inst.files.size(); ++i) {
    CHECK(back.files[i].id == inst.files[i].id);
    CHECK(back.files[i].size_mb == inst.files[i].size_mb);
    CHECK(back.files[i].storage_bid_cents == inst.files[i].storage_bid_cents);
  }
  for (std::size_t k = 0; k < inst.scenarios.size(); ++k) {
    CHECK(back.scenarios[k].probability == inst.scenarios[k].probability);
    for (std::size_t i = 0; i < inst.files.size(); ++i) {
      CHECK(back.scenarios[k].access_bid_cents[i] == inst.scenarios[k].access_bid_cents[i]);
      CHECK(back.scenarios[k].latency_req_ms[i] == inst.scenarios[k].latency_req_ms[i]);
      CHECK(back.scenarios[k].arrival_rate_per_s[i] ==
            inst.scenarios[k].arrival_rate_per_s[i]);
    }
  }
  const std::string path = "/tmp/tierbid_roundtrip_instance.json";
  save_instance(inst, path);
  const Instance loaded = load_instance(path);
  CHECK(loaded.files.size() == inst.files.size());
  CHECK(loaded.scenarios.size() == inst.scenarios.size());
  std::remove(path.c_str());
}
