#pragma once

#include <vector>

#include "tierbid/solver.hpp"
#include "tierbid/types.hpp"

namespace tierbid {

// Two-stage baseline strategies for comparison against the full solver.
//
// All baselines share the same shape of output: a first-stage decision made
// before scenarios realize, plus one second-stage decision per scenario.

struct BaselineResult {
  StageOneDecision d1;
  std::vector<StageTwoDecision> d2_per_scenario;
  double expected_profit_cents = 0.0;
};

// Individual scheme: stage one admits storage bids on storage profit alone
// (ignoring future access revenue), stage two then solves the access
// problem optimally for that fixed placement.
BaselineResult solve_individual(const std::vector<FileSpec>& files,
                                const std::vector<Scenario>& scenarios,
                                const SystemConfig& cfg, const SolverOptions& opts);

enum class GreedyOrder {
  kPerSize,    // rank access bids by q_i / S_i
  kPerRate,    // rank access bids by q_i / lambda_i
};

// Greedy heuristic: same stage-one placement as the individual scheme, then
// per scenario accepts access bids greedily in decreasing rank order,
// keeping a bid only if a feasible schedule still exists. Accepted files
// with a hot replica are served from the hot tier first, overflowing to
// cold when the hot tier saturates.
BaselineResult solve_greedy(const std::vector<FileSpec>& files,
                            const std::vector<Scenario>& scenarios,
                            const SystemConfig& cfg, const SolverOptions& opts,
                            GreedyOrder order);

// Second stage of the greedy heuristic for a fixed placement; exposed for
// testing.
StageTwoDecision greedy_stage_two(const StageOneDecision& d1, const Scenario& sc,
                                  const std::vector<FileSpec>& files,
                                  const SystemConfig& cfg, GreedyOrder order);

}  // namespace tierbid
