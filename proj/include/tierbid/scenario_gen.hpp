#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tierbid/types.hpp"

namespace tierbid {

inline constexpr int kNumFileTypes = 5;
inline constexpr std::array<double, kNumFileTypes> kFileSizesMb = {64, 128, 256, 512, 1024};

struct GeneratorSpec {
  int num_files = 100;
  int num_scenarios = 5;
  std::uint64_t seed = 1;
  // Mixing proportions over the five file types; must sum to 1.
  std::array<double, kNumFileTypes> type_mix = {0.2, 0.2, 0.2, 0.2, 0.2};
  // Mean access arrival rate per type, requests/s within a slot. Smaller
  // files are accessed more frequently.
  std::array<double, kNumFileTypes> mean_arrivals = {20, 10, 8, 4, 2};
  // Storage bid per MB drawn uniformly from this range, cents.
  double storage_bid_per_mb_lo = 0.1;
  double storage_bid_per_mb_hi = 0.3;

  void validate() const;
};

// Latency requirement bounds in ms for a file of `size_mb` MB; the size
// enters in bytes (decimal MB).
double latency_req_lo_ms(double size_mb);
double latency_req_hi_ms(double size_mb);

// Access bid in cents for a file of `size_mb` MB given its realized arrival
// rate and latency requirement (natural log).
double access_bid_cents(double size_mb, double arrival_rate, double latency_ms);

std::vector<FileSpec> generate_files(const GeneratorSpec& spec);

std::vector<Scenario> generate_scenarios(const std::vector<FileSpec>& files,
                                         const GeneratorSpec& spec);

// T i.i.d. slot realizations drawn from the scenarios' categorical
// distribution.
std::vector<int> realize_slots(const std::vector<Scenario>& scenarios, int num_slots,
                               std::uint64_t seed);

// JSON persistence for a generated instance (schema documented in README).
struct Instance {
  std::vector<FileSpec> files;
  std::vector<Scenario> scenarios;
};

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& json_text);
void save_instance(const Instance& instance, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace tierbid
