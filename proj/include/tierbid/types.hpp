#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tierbid {

// Tier indices: 0 = cold, 1 = hot.
inline constexpr int kCold = 0;
inline constexpr int kHot = 1;
inline constexpr int kNumTiers = 2;

// Unit conventions. Sizes live in MB everywhere; queueing math works in
// megabits (1 MB = 8 Mb) and seconds. Rates use decimal prefixes
// (1 Gb/s = 1000 Mb/s). Latency requirements are stored in milliseconds
// and converted to seconds at the queueing boundary.
inline constexpr double kMbitPerMb = 8.0;
inline constexpr double kMbitPerGbit = 1000.0;
inline constexpr double kMbPerGb = 1000.0;

inline double mb_to_mbit(double size_mb) { return size_mb * kMbitPerMb; }
inline double gbps_to_mbps(double rate_gbps) { return rate_gbps * kMbitPerGbit; }
inline double ms_to_s(double ms) { return ms / 1000.0; }
inline double s_to_ms(double s) { return s * 1000.0; }
inline double cents_per_gb_to_per_mb(double c) { return c / kMbPerGb; }

struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UndefinedMomentsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleInstanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an instance exceeds the brute-force oracle's cost guard.
struct InstanceTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SystemConfig {
  double cold_capacity_mb = 0.0;       // C_1
  double hot_capacity_mb = 0.0;        // C_2
  double cold_rate_mbps = 0.0;         // mu_1, Mb/s
  double hot_rate_mbps = 0.0;          // mu_2, Mb/s
  double cold_cost_cents_per_mb = 0.0; // c_1
  double hot_cost_cents_per_mb = 0.0;  // c_2
  int num_slots = 1;                   // T
  double stability_margin = 1e-6;      // delta, slack in the strict rate bound
  double restriction_eps = 0.001;      // eps for restricted solve before rounding
  double penalty_alpha = 1e6;          // alpha, sigmoid steepness
  double penalty_weight = 1e9;         // C, integrality penalty multiplier

  double capacity_mb(int tier) const { return tier == kCold ? cold_capacity_mb : hot_capacity_mb; }
  double rate_mbps(int tier) const { return tier == kCold ? cold_rate_mbps : hot_rate_mbps; }
  double cost_cents_per_mb(int tier) const {
    return tier == kCold ? cold_cost_cents_per_mb : hot_cost_cents_per_mb;
  }

  void validate() const;
};

struct FileSpec {
  int id = 0;
  double size_mb = 0.0;       // S_i
  double storage_bid_cents = 0.0; // P_i

  void validate() const;
};

struct Scenario {
  int index = 0;
  double probability = 0.0;                 // p^k
  std::vector<double> access_bid_cents;     // q_i^k
  std::vector<double> latency_req_ms;       // l_i^k
  std::vector<double> arrival_rate_per_s;   // lambda_i^k

  void validate(std::size_t num_files) const;
};

void validate_scenario_set(const std::vector<Scenario>& scenarios, std::size_t num_files);

struct StageOneDecision {
  std::vector<std::uint8_t> accept;      // A_i
  std::vector<std::uint8_t> hot_replica; // R_i
};

struct StageTwoDecision {
  std::vector<std::uint8_t> accept_access;        // H_i
  std::array<std::vector<double>, kNumTiers> sched_prob; // pi_{i,j}

  double pi(std::size_t i, int tier) const { return sched_prob[tier][i]; }
};

StageOneDecision make_stage_one(std::size_t num_files);
StageTwoDecision make_stage_two(std::size_t num_files);

}  // namespace tierbid
