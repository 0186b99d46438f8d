#include "tierbid/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "tierbid/feasibility.hpp"
#include "tierbid/latency.hpp"

namespace tierbid {

namespace {

double expected_total(const StageOneDecision& d1,
                      const std::vector<StageTwoDecision>& d2,
                      const std::vector<Scenario>& scenarios,
                      const std::vector<FileSpec>& files, const SystemConfig& cfg) {
  return profit_expected(d1, d2, scenarios, files, cfg).total_cents();
}

// Hot-first schedule: stored files in `order` with a hot replica fill the
// hot tier up to its stability budget, spilling the remainder to cold.
void assign_schedule(StageTwoDecision& d2, const StageOneDecision& d1,
                     const Scenario& sc, const std::vector<FileSpec>& files,
                     const SystemConfig& cfg, const std::vector<std::size_t>& order) {
  double hot_budget = (1.0 - cfg.stability_margin) * cfg.hot_rate_mbps;
  for (std::size_t i : order) {
    d2.sched_prob[kHot][i] = 0.0;
    d2.sched_prob[kCold][i] = 0.0;
    if (!d2.accept_access[i]) continue;
    double pi2 = 0.0;
    if (d1.hot_replica[i]) {
      const double demand = sc.arrival_rate_per_s[i] * mb_to_mbit(files[i].size_mb);
      pi2 = demand > 0.0 ? std::min(1.0, hot_budget / demand) : 1.0;
      hot_budget -= pi2 * demand;
    }
    d2.sched_prob[kHot][i] = pi2;
    d2.sched_prob[kCold][i] = 1.0 - pi2;
  }
}

}  // namespace

StageTwoDecision greedy_stage_two(const StageOneDecision& d1, const Scenario& sc,
                                  const std::vector<FileSpec>& files,
                                  const SystemConfig& cfg, GreedyOrder order) {
  std::vector<std::size_t> stored;
  for (std::size_t i = 0; i < files.size(); ++i)
    if (d1.accept[i]) stored.push_back(i);

  auto rank = [&](std::size_t i) {
    if (order == GreedyOrder::kPerSize)
      return sc.access_bid_cents[i] / files[i].size_mb;
    return sc.access_bid_cents[i] / std::max(sc.arrival_rate_per_s[i], 1e-12);
  };
  std::stable_sort(stored.begin(), stored.end(), [&](std::size_t a, std::size_t b) {
    if (rank(a) != rank(b)) return rank(a) > rank(b);
    return files[a].id < files[b].id;
  });

  StageTwoDecision d2 = make_stage_two(files.size());
  for (std::size_t i : stored) {
    d2.accept_access[i] = 1;
    assign_schedule(d2, d1, sc, files, cfg, stored);
    if (!check_stage_two_feasible(d2, d1, sc, files, cfg).feasible) {
      d2.accept_access[i] = 0;
      assign_schedule(d2, d1, sc, files, cfg, stored);
    }
  }
  return d2;
}

BaselineResult solve_individual(const std::vector<FileSpec>& files,
                                const std::vector<Scenario>& scenarios,
                                const SystemConfig& cfg, const SolverOptions& opts) {
  BaselineResult result;
  result.d1 = solve_storage_stage_one(files, cfg, opts).d1;
  result.d2_per_scenario.reserve(scenarios.size());
  for (const auto& sc : scenarios)
    result.d2_per_scenario.push_back(
        solve_stage_two(result.d1, sc, files, cfg, opts).first);
  result.expected_profit_cents =
      expected_total(result.d1, result.d2_per_scenario, scenarios, files, cfg);
  return result;
}

BaselineResult solve_greedy(const std::vector<FileSpec>& files,
                            const std::vector<Scenario>& scenarios,
                            const SystemConfig& cfg, const SolverOptions& opts,
                            GreedyOrder order) {
  BaselineResult result;
  result.d1 = solve_storage_stage_one(files, cfg, opts).d1;
  result.d2_per_scenario.reserve(scenarios.size());
  for (const auto& sc : scenarios)
    result.d2_per_scenario.push_back(
        greedy_stage_two(result.d1, sc, files, cfg, order));
  result.expected_profit_cents =
      expected_total(result.d1, result.d2_per_scenario, scenarios, files, cfg);
  return result;
}

}  // namespace tierbid
