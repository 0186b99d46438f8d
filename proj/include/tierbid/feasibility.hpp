#pragma once

#include <string>
#include <vector>

#include "tierbid/types.hpp"

namespace tierbid {

struct ConstraintSlack {
  std::string name;
  double slack = 0.0; // >= 0 means satisfied
  bool satisfied() const { return slack >= 0.0; }
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<ConstraintSlack> slacks;

  void add(std::string name, double slack) {
    feasible = feasible && slack >= 0.0;
    slacks.push_back({std::move(name), slack});
  }
  const ConstraintSlack* find(const std::string& name) const;
};

// Capacity and replication-coupling constraints of the first stage.
FeasibilityReport check_stage_one_feasible(const StageOneDecision& d,
                                           const std::vector<FileSpec>& files,
                                           const SystemConfig& cfg);

// Stage-two constraints given a feasible stage-one decision: acceptance
// coupling, replica coupling, probability balance, stability (with margin
// delta) and per-file latency requirements.
FeasibilityReport check_stage_two_feasible(const StageTwoDecision& d2,
                                           const StageOneDecision& d1,
                                           const Scenario& sc,
                                           const std::vector<FileSpec>& files,
                                           const SystemConfig& cfg);

struct ProfitBreakdown {
  double storage_revenue_cents = 0.0;
  double storage_cost_cents = 0.0;
  double access_profit_cents = 0.0;

  double storage_profit_cents() const { return storage_revenue_cents - storage_cost_cents; }
  double total_cents() const { return storage_profit_cents() + access_profit_cents; }
};

// Expected profit: storage terms plus T * sum_k sum_i p^k q_i^k H_i^k.
// `d2_per_scenario` is indexed like `scenarios`.
ProfitBreakdown profit_expected(const StageOneDecision& d1,
                                const std::vector<StageTwoDecision>& d2_per_scenario,
                                const std::vector<Scenario>& scenarios,
                                const std::vector<FileSpec>& files,
                                const SystemConfig& cfg);

// Realized profit: storage terms plus the sum of accepted bids over actual
// slots. `slot_scenarios[t]` gives the scenario index realized in slot t and
// `d2_per_slot[t]` the decision taken there.
ProfitBreakdown profit_realized(const StageOneDecision& d1,
                                const std::vector<StageTwoDecision>& d2_per_slot,
                                const std::vector<int>& slot_scenarios,
                                const std::vector<Scenario>& scenarios,
                                const std::vector<FileSpec>& files,
                                const SystemConfig& cfg);

}  // namespace tierbid
