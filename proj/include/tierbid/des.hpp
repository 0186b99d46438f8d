#pragma once

#include <cstdint>
#include <vector>

#include "tierbid/types.hpp"

namespace tierbid {

// One simulated file class: a Poisson request stream of rate
// `arrival_per_s` for a file of `size_mb` MB.
struct DesClass {
  double arrival_per_s = 0.0;
  double size_mb = 0.0;
};

struct DesConfig {
  std::vector<DesClass> classes;
  double mu_mbps = 0.0;          // tier service rate
  long horizon_requests = 100000;
  double warmup_fraction = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct DesResult {
  double mean_wait_s = 0.0;
  double ci_halfwidth_s = 0.0;            // 95% batch-means interval on the wait
  std::vector<double> mean_latency_per_class_s;
  std::vector<long> requests_per_class;
  double observed_arrival_rate_per_s = 0.0;
  double mean_number_in_system = 0.0;     // time average of N(t), post warmup
  double sim_time_s = 0.0;                // post-warmup simulated time

  // count of post-warmup requests
  long measured_requests = 0;
};

// FIFO single-server queue fed by superposed Poisson streams; service time of
// a class-i request is (8 S_i) * Exponential(mean 1/mu). Refuses unstable
// input.
DesResult simulate_tier(const DesConfig& cfg);

}  // namespace tierbid
