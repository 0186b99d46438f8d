#pragma once

#include <utility>
#include <vector>

#include "tierbid/types.hpp"

namespace tierbid {

// Aggregate load offered to one storage tier. All request sizes enter in
// megabits (8 * S_i with S_i in MB).
struct TierLoad {
  double agg_arrival_per_s = 0.0; // Lambda = sum lambda_i pi_ij
  double f_mbps = 0.0;            // sum lambda_i pi_ij (8 S_i)
  double h_mb2ps = 0.0;           // sum lambda_i pi_ij (8 S_i)^2

  void add(double arrival_per_s, double size_mb) {
    const double bits = mb_to_mbit(size_mb);
    agg_arrival_per_s += arrival_per_s;
    f_mbps += arrival_per_s * bits;
    h_mb2ps += arrival_per_s * bits * bits;
  }
};

// Load on a tier induced by a stage-two decision under scenario `sc`.
TierLoad tier_load(const StageTwoDecision& d2, const Scenario& sc,
                   const std::vector<FileSpec>& files, int tier);

// First and second moments (seconds, seconds^2) of the per-request service
// time at a tier serving `load` at rate `mu_mbps`.
std::pair<double, double> service_moments(const TierLoad& load, double mu_mbps);

// Pollaczek-Khinchin mean waiting time in seconds. Requires load.f_mbps < mu.
double waiting_time(const TierLoad& load, double mu_mbps);

// Expected latency of one file's accepted requests, in seconds:
// sum_j pi_ij (8 S_i / mu_j) + sum_j pi_ij E[Q_j].
double expected_latency(std::size_t file_index, const StageTwoDecision& d2,
                        const Scenario& sc, const std::vector<FileSpec>& files,
                        const SystemConfig& cfg);

// Per-file slack l_i - T_i in seconds. Negative slack on a file with
// accept_access set marks a latency violation.
std::vector<double> latency_slacks(const StageTwoDecision& d2, const Scenario& sc,
                                   const std::vector<FileSpec>& files,
                                   const SystemConfig& cfg);

}  // namespace tierbid
