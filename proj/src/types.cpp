#include "tierbid/types.hpp"

#include <cmath>
#include <numeric>

namespace tierbid {

void SystemConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw StructuralError(std::string(name) + " must be strictly positive");
  };
  positive(cold_capacity_mb, "cold_capacity_mb");
  positive(hot_capacity_mb, "hot_capacity_mb");
  positive(cold_rate_mbps, "cold_rate_mbps");
  positive(hot_rate_mbps, "hot_rate_mbps");
  positive(cold_cost_cents_per_mb, "cold_cost_cents_per_mb");
  positive(hot_cost_cents_per_mb, "hot_cost_cents_per_mb");
  positive(penalty_alpha, "penalty_alpha");
  positive(penalty_weight, "penalty_weight");
  if (num_slots < 1) throw StructuralError("num_slots must be >= 1");
  if (!(stability_margin > 0.0 && stability_margin < 1.0))
    throw StructuralError("stability_margin must be in (0,1)");
  if (!(restriction_eps > 0.0 && restriction_eps < 1.0))
    throw StructuralError("restriction_eps must be in (0,1)");
}

void FileSpec::validate() const {
  if (!(size_mb > 0.0)) throw StructuralError("file size_mb must be strictly positive");
  if (!(storage_bid_cents >= 0.0)) throw StructuralError("storage_bid_cents must be >= 0");
}

void Scenario::validate(std::size_t num_files) const {
  if (access_bid_cents.size() != num_files || latency_req_ms.size() != num_files ||
      arrival_rate_per_s.size() != num_files) {
    throw StructuralError("scenario arrays must match file count");
  }
  if (!(probability >= 0.0 && probability <= 1.0))
    throw StructuralError("scenario probability must be in [0,1]");
  for (std::size_t i = 0; i < num_files; ++i) {
    if (!(access_bid_cents[i] >= 0.0)) throw StructuralError("access bid must be >= 0");
    if (!(latency_req_ms[i] > 0.0)) throw StructuralError("latency requirement must be > 0");
    if (!(arrival_rate_per_s[i] >= 0.0)) throw StructuralError("arrival rate must be >= 0");
  }
}

void validate_scenario_set(const std::vector<Scenario>& scenarios, std::size_t num_files) {
  if (scenarios.empty()) throw StructuralError("scenario set must be non-empty");
  double total = 0.0;
  for (const auto& sc : scenarios) {
    sc.validate(num_files);
    total += sc.probability;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw StructuralError("scenario probabilities must sum to 1");
}

StageOneDecision make_stage_one(std::size_t num_files) {
  StageOneDecision d;
  d.accept.assign(num_files, 0);
  d.hot_replica.assign(num_files, 0);
  return d;
}

StageTwoDecision make_stage_two(std::size_t num_files) {
  StageTwoDecision d;
  d.accept_access.assign(num_files, 0);
  d.sched_prob[kCold].assign(num_files, 0.0);
  d.sched_prob[kHot].assign(num_files, 0.0);
  return d;
}

}  // namespace tierbid
