#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tierbid/feasibility.hpp"
#include "tierbid/types.hpp"

namespace tierbid {

// One stage of the integrality-penalty continuation: solve with sigmoid
// steepness `alpha` and penalty multiplier `weight`, then move to the next.
struct ContinuationStage {
  double alpha = 0.0;  // 0 disables the integrality penalty for the stage
  double weight = 0.0;
};

struct SolverOptions {
  int multistarts = 16;
  int max_iters = 300;   // inner projected-gradient iterations per round
  int al_rounds = 6;     // multiplier updates per continuation stage

  // Backtracking step rule.
  double step_init = 0.05;
  double step_grow = 1.2;
  double step_shrink = 0.5;
  double step_min = 1e-10;

  // Increasing multipliers for latency/stability/capacity violations.
  double rho_init = 100.0;
  double rho_growth = 3.0;

  // Continuation schedule; empty selects the default, which ends at the
  // config's penalty_alpha.
  std::vector<ContinuationStage> alpha_schedule;

  double tol = 1e-6;
  std::uint64_t seed = 0;
  bool verbose = false; // per-round progress on stderr

  void validate() const;
  // The default schedule used when alpha_schedule is empty.
  static std::vector<ContinuationStage> default_schedule(const SystemConfig& cfg);
};

struct SolveReport {
  double objective_cents = 0.0;         // expected profit of the returned integral decision
  double relaxed_objective_cents = 0.0; // winning relaxed point at the config's alpha, C
  long iterations = 0;
  int starts = 0;
  int best_start = -1;
  double kkt_residual = 0.0; // projected-step norm at the winning relaxed point
  double min_slack = 0.0;    // tightest constraint slack of the returned decision
  double wall_time_ms = 0.0;
  bool budget_exhausted = false;
};

struct StageOnePlan {
  StageOneDecision d1;
  std::vector<StageTwoDecision> d2_per_scenario;
  SolveReport report;
};

// Solves the relaxed deterministic-equivalent problem over A, R and all
// per-scenario H, pi by projected gradient ascent with augmented-Lagrangian
// constraint handling, then rounds to a decision feasible for the original
// constraints (capacities and rates are restricted by (1 - eps) during the
// relaxed solve; ties at exactly 0.5 round to 0).
StageOnePlan solve_stage_one(const std::vector<FileSpec>& files,
                             const std::vector<Scenario>& scenarios,
                             const SystemConfig& cfg, const SolverOptions& opts);

// First stage solved on the storage profit alone (no second-stage terms);
// used by the independent-stages baseline. d2_per_scenario is empty.
StageOnePlan solve_storage_stage_one(const std::vector<FileSpec>& files,
                                     const SystemConfig& cfg,
                                     const SolverOptions& opts);

// Second-stage solve for one realized scenario given a feasible stage-one
// decision. pi_{i,1} is substituted as H_i - pi_{i,2}.
std::pair<StageTwoDecision, SolveReport> solve_stage_two(
    const StageOneDecision& d1, const Scenario& sc,
    const std::vector<FileSpec>& files, const SystemConfig& cfg,
    const SolverOptions& opts);

struct OracleResult {
  StageOneDecision d1;
  std::vector<StageTwoDecision> d2_per_scenario;
  double profit_cents = 0.0;
};

// Exhaustive oracle for tiny instances: enumerates all valid integral
// decisions and grid-searches the scheduling probabilities. Throws
// InstanceTooLargeError beyond I <= 4, K <= 3, grid <= 64.
OracleResult brute_force_oracle(const std::vector<FileSpec>& files,
                                const std::vector<Scenario>& scenarios,
                                const SystemConfig& cfg, int grid_resolution);

}  // namespace tierbid
