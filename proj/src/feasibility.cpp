#include "tierbid/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tierbid/latency.hpp"

namespace tierbid {

const ConstraintSlack* FeasibilityReport::find(const std::string& name) const {
  auto it = std::find_if(slacks.begin(), slacks.end(),
                         [&](const ConstraintSlack& s) { return s.name == name; });
  return it == slacks.end() ? nullptr : &*it;
}

namespace {

void require_dims(const StageOneDecision& d, std::size_t n) {
  if (d.accept.size() != n || d.hot_replica.size() != n)
    throw StructuralError("stage-one decision arrays must match file count");
}

void require_dims(const StageTwoDecision& d, std::size_t n) {
  if (d.accept_access.size() != n || d.sched_prob[kCold].size() != n ||
      d.sched_prob[kHot].size() != n)
    throw StructuralError("stage-two decision arrays must match file count");
}

}  // namespace

FeasibilityReport check_stage_one_feasible(const StageOneDecision& d,
                                           const std::vector<FileSpec>& files,
                                           const SystemConfig& cfg) {
  if (files.empty()) throw StructuralError("file list must be non-empty");
  require_dims(d, files.size());

  double cold_usage = 0.0;
  double hot_usage = 0.0;
  double min_coupling = 0.0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const int a = d.accept[i];
    const int r = d.hot_replica[i];
    cold_usage += files[i].size_mb * (2 * a - r);
    hot_usage += files[i].size_mb * r;
    min_coupling = std::min(min_coupling, static_cast<double>(a - r));
  }

  FeasibilityReport report;
  report.add("cold_capacity", cfg.cold_capacity_mb - cold_usage);
  report.add("hot_capacity", cfg.hot_capacity_mb - hot_usage);
  report.add("replica_coupling", min_coupling);
  return report;
}

FeasibilityReport check_stage_two_feasible(const StageTwoDecision& d2,
                                           const StageOneDecision& d1,
                                           const Scenario& sc,
                                           const std::vector<FileSpec>& files,
                                           const SystemConfig& cfg) {
  if (files.empty()) throw StructuralError("file list must be non-empty");
  require_dims(d1, files.size());
  require_dims(d2, files.size());
  sc.validate(files.size());

  FeasibilityReport report;
  double min_accept = 0.0;   // A_i - H_i
  double min_replica = 0.0;  // min(R_i - pi_i2, pi_i2)
  double max_balance = 0.0;  // |pi_i1 + pi_i2 - H_i|
  for (std::size_t i = 0; i < files.size(); ++i) {
    const double pi1 = d2.pi(i, kCold);
    const double pi2 = d2.pi(i, kHot);
    if (std::isnan(pi1) || std::isnan(pi2))
      throw StructuralError("NaN scheduling probability");
    min_accept = std::min(min_accept,
                          static_cast<double>(d1.accept[i]) - d2.accept_access[i]);
    min_replica = std::min({min_replica, d1.hot_replica[i] - pi2, pi2, pi1});
    max_balance = std::max(max_balance, std::abs(pi1 + pi2 - d2.accept_access[i]));
  }
  report.add("access_coupling", min_accept);
  report.add("replica_scheduling", min_replica);
  // Balance is an equality; allow floating-point noise.
  report.add("probability_balance", 1e-9 - max_balance);

  bool stable = true;
  for (int tier = 0; tier < kNumTiers; ++tier) {
    const TierLoad load = tier_load(d2, sc, files, tier);
    const double budget = (1.0 - cfg.stability_margin) * cfg.rate_mbps(tier);
    report.add(tier == kCold ? "stability_cold" : "stability_hot", budget - load.f_mbps);
    stable = stable && load.f_mbps < cfg.rate_mbps(tier);
  }

  if (stable) {
    const std::vector<double> slacks = latency_slacks(d2, sc, files, cfg);
    double min_latency_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < files.size(); ++i)
      min_latency_slack = std::min(min_latency_slack, slacks[i]);
    report.add("latency", min_latency_slack);
  } else {
    // Unstable tier: the latency of any scheduled file diverges.
    report.add("latency", -std::numeric_limits<double>::infinity());
  }
  return report;
}

namespace {

ProfitBreakdown storage_terms(const StageOneDecision& d1,
                              const std::vector<FileSpec>& files,
                              const SystemConfig& cfg) {
  ProfitBreakdown p;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const int a = d1.accept[i];
    const int r = d1.hot_replica[i];
    p.storage_revenue_cents += files[i].storage_bid_cents * a;
    p.storage_cost_cents += files[i].size_mb * (2 * a - r) * cfg.cold_cost_cents_per_mb +
                            files[i].size_mb * r * cfg.hot_cost_cents_per_mb;
  }
  return p;
}

}  // namespace

ProfitBreakdown profit_expected(const StageOneDecision& d1,
                                const std::vector<StageTwoDecision>& d2_per_scenario,
                                const std::vector<Scenario>& scenarios,
                                const std::vector<FileSpec>& files,
                                const SystemConfig& cfg) {
  if (d2_per_scenario.size() != scenarios.size())
    throw StructuralError("one stage-two decision required per scenario");
  ProfitBreakdown p = storage_terms(d1, files, cfg);
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    require_dims(d2_per_scenario[k], files.size());
    double accepted = 0.0;
    for (std::size_t i = 0; i < files.size(); ++i)
      accepted += scenarios[k].access_bid_cents[i] * d2_per_scenario[k].accept_access[i];
    p.access_profit_cents += cfg.num_slots * scenarios[k].probability * accepted;
  }
  return p;
}

ProfitBreakdown profit_realized(const StageOneDecision& d1,
                                const std::vector<StageTwoDecision>& d2_per_slot,
                                const std::vector<int>& slot_scenarios,
                                const std::vector<Scenario>& scenarios,
                                const std::vector<FileSpec>& files,
                                const SystemConfig& cfg) {
  if (d2_per_slot.size() != slot_scenarios.size())
    throw StructuralError("one stage-two decision required per slot");
  ProfitBreakdown p = storage_terms(d1, files, cfg);
  for (std::size_t t = 0; t < d2_per_slot.size(); ++t) {
    const int k = slot_scenarios[t];
    if (k < 0 || static_cast<std::size_t>(k) >= scenarios.size())
      throw StructuralError("slot scenario index out of range");
    require_dims(d2_per_slot[t], files.size());
    for (std::size_t i = 0; i < files.size(); ++i)
      p.access_profit_cents +=
          scenarios[k].access_bid_cents[i] * d2_per_slot[t].accept_access[i];
  }
  return p;
}

}  // namespace tierbid
