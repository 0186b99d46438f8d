#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tierbid/scenario_gen.hpp"
#include "tierbid/solver.hpp"
#include "tierbid/types.hpp"

namespace tierbid {

enum class Method { kProfitMax, kIndividual, kGreedyPerSize, kGreedyPerRate };

const char* method_name(Method m);       // "pm", "is", "gh1", "gh2"
Method method_from_name(const std::string& name);

enum class SweepVariable { kColdCapacity, kHotRate, kHotCost, kColdCost };

const char* sweep_variable_name(SweepVariable v);
SweepVariable sweep_variable_from_name(const std::string& name);

// One batch experiment: a grid over one system parameter, a set of methods,
// and several seeded runs per grid point. Runs share random instances
// across grid points and methods so curves differ only through the swept
// parameter.
struct ExperimentPlan {
  SystemConfig base_cfg;
  GeneratorSpec gen;
  SolverOptions solver;
  SweepVariable variable = SweepVariable::kColdCapacity;
  std::vector<double> grid; // MB for capacities, Mb/s for rates, cents/MB for costs
  std::vector<Method> methods = {Method::kProfitMax, Method::kIndividual,
                                 Method::kGreedyPerSize, Method::kGreedyPerRate};
  int runs = 10;
  int threads = 4;
  std::uint64_t seed = 0;

  void validate() const;
  SystemConfig config_at(double point) const;
};

// One result row: realized performance of one method at one grid point for
// one seeded run. Profits are realized over the T slots of the horizon.
struct SweepRow {
  double point = 0.0;
  Method method = Method::kProfitMax;
  int run = 0;
  bool feasible = true;
  double total_profit_cents = 0.0;
  double storage_profit_cents = 0.0;
  double access_profit_cents = 0.0;
  double arar = 0.0; // accepted / submitted access bids over all slots; 0/0 -> 0
  long accepted_storage_bids = 0;
  long hot_replicas = 0;
  long accepted_access_bids = 0;
  long submitted_access_bids = 0;
  long solver_iterations = 0;
  int solver_best_start = 0;
};

struct SweepResultSet {
  SweepVariable variable = SweepVariable::kColdCapacity;
  std::vector<SweepRow> rows; // sorted by (point, method order in plan, run)
};

// Runs the full grid x runs job pool. A solver failure at one (point, run)
// is recorded as an infeasible row, not raised.
SweepResultSet run_experiment(const ExperimentPlan& plan);

// Writes out_dir/results.csv (one row per point x method x run, fixed
// column order, byte-deterministic), out_dir/summary.json (per point x
// method means and standard deviations plus a metadata block) and four
// plot-data files (profit, profit split, ARAR, acceptance counts; grid
// point column followed by one per-method mean column).
void emit_report(const SweepResultSet& results, const ExperimentPlan& plan,
                 const std::string& out_dir);

std::string rows_to_csv(const std::vector<SweepRow>& rows, SweepVariable variable);
std::vector<SweepRow> rows_from_csv(const std::string& csv);

// Tie-corrected Spearman rank correlation; used by trend checks over sweep
// curves. Requires xs.size() == ys.size() >= 2.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace tierbid
