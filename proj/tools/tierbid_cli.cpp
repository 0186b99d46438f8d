// Batch CLI for the tiered-storage bidding library.
//
// Subcommands:
//   generate        emit a seeded instance (files + scenarios) as JSON
//   solve           solve one instance with one method, print the outcome
//   sweep           run a parameter sweep experiment from a JSON plan
//   validate-queue  compare the queueing formula against simulation
//   oracle          brute-force a tiny instance and print the optimum
//
// Config files are JSON with a schema_version field; human-facing units are
// GB, Gb/s and cents per GB (converted to the library's MB / Mb/s / cents
// per MB internally). See README.md for the schemas.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tierbid/baselines.hpp"
#include "tierbid/des.hpp"
#include "tierbid/feasibility.hpp"
#include "tierbid/latency.hpp"
#include "tierbid/scenario_gen.hpp"
#include "tierbid/solver.hpp"
#include "tierbid/sweep.hpp"

namespace {

using nlohmann::json;
using namespace tierbid;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

SystemConfig system_from_json(const json& j) {
  SystemConfig cfg;
  cfg.cold_capacity_mb = j.value("cold_capacity_gb", 400.0) * kMbPerGb;
  cfg.hot_capacity_mb = j.value("hot_capacity_gb", 200.0) * kMbPerGb;
  cfg.cold_rate_mbps = gbps_to_mbps(j.value("cold_rate_gbps", 100.0));
  cfg.hot_rate_mbps = gbps_to_mbps(j.value("hot_rate_gbps", 200.0));
  cfg.cold_cost_cents_per_mb = cents_per_gb_to_per_mb(j.value("cold_cost_cents_per_gb", 50.0));
  cfg.hot_cost_cents_per_mb = cents_per_gb_to_per_mb(j.value("hot_cost_cents_per_gb", 80.0));
  cfg.num_slots = j.value("num_slots", 20);
  cfg.stability_margin = j.value("stability_margin", 1e-6);
  cfg.restriction_eps = j.value("restriction_eps", 0.001);
  cfg.penalty_alpha = j.value("penalty_alpha", 1e6);
  cfg.penalty_weight = j.value("penalty_weight", 1e9);
  return cfg;
}

GeneratorSpec generator_from_json(const json& j) {
  GeneratorSpec spec;
  spec.num_files = j.value("num_files", 100);
  spec.num_scenarios = j.value("num_scenarios", 5);
  spec.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("type_mix"))
    for (int t = 0; t < kNumFileTypes; ++t) spec.type_mix[t] = j["type_mix"][t];
  if (j.contains("mean_arrivals"))
    for (int t = 0; t < kNumFileTypes; ++t) spec.mean_arrivals[t] = j["mean_arrivals"][t];
  spec.storage_bid_per_mb_lo = j.value("storage_bid_per_mb_lo", 0.1);
  spec.storage_bid_per_mb_hi = j.value("storage_bid_per_mb_hi", 0.3);
  return spec;
}

SolverOptions solver_from_json(const json& j) {
  SolverOptions opts;
  opts.multistarts = j.value("multistarts", opts.multistarts);
  opts.max_iters = j.value("max_iters", opts.max_iters);
  opts.al_rounds = j.value("al_rounds", opts.al_rounds);
  opts.seed = j.value("seed", opts.seed);
  return opts;
}

double grid_point_to_internal(SweepVariable v, double human) {
  switch (v) {
    case SweepVariable::kColdCapacity: return human * kMbPerGb;
    case SweepVariable::kHotRate: return gbps_to_mbps(human);
    case SweepVariable::kHotCost:
    case SweepVariable::kColdCost: return cents_per_gb_to_per_mb(human);
  }
  return human;
}

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan plan;
  if (j.value("schema_version", 1) != 1)
    throw std::runtime_error("unsupported plan schema_version");
  if (j.contains("system")) plan.base_cfg = system_from_json(j["system"]);
  if (j.contains("generator")) plan.gen = generator_from_json(j["generator"]);
  if (j.contains("solver")) plan.solver = solver_from_json(j["solver"]);
  plan.variable = sweep_variable_from_name(j.value("variable", "cold_capacity"));
  for (double v : j.at("grid"))
    plan.grid.push_back(grid_point_to_internal(plan.variable, v));
  if (j.contains("methods")) {
    plan.methods.clear();
    for (const auto& m : j["methods"]) plan.methods.push_back(method_from_name(m));
  }
  plan.runs = j.value("runs", 10);
  plan.threads = j.value("threads", 4);
  plan.seed = j.value("seed", std::uint64_t{0});
  return plan;
}

json decision_to_json(const StageOneDecision& d1,
                      const std::vector<StageTwoDecision>& d2) {
  json out;
  out["accept"] = d1.accept;
  out["hot_replica"] = d1.hot_replica;
  out["scenarios"] = json::array();
  for (const auto& s : d2) {
    json e;
    e["accept_access"] = s.accept_access;
    e["pi_cold"] = s.sched_prob[kCold];
    e["pi_hot"] = s.sched_prob[kHot];
    out["scenarios"].push_back(std::move(e));
  }
  return out;
}

int cmd_generate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_path) {
  json cfg = config_path.empty() ? json::object() : json::parse(read_file(config_path));
  GeneratorSpec spec = generator_from_json(cfg.contains("generator") ? cfg["generator"] : cfg);
  if (seed != 0) spec.seed = seed;
  Instance inst;
  inst.files = generate_files(spec);
  inst.scenarios = generate_scenarios(inst.files, spec);
  const std::string text = instance_to_json(inst);
  if (out_path.empty())
    std::cout << text << '\n';
  else
    write_file(out_path, text);
  return 0;
}

int cmd_solve(const std::string& config_path, const std::string& instance_path,
              const std::string& method_name_str, std::uint64_t seed,
              const std::string& out_path, const std::string& format) {
  json cfg_json = config_path.empty() ? json::object() : json::parse(read_file(config_path));
  SystemConfig cfg = system_from_json(cfg_json.contains("system") ? cfg_json["system"]
                                                                  : cfg_json);
  SolverOptions opts = solver_from_json(cfg_json.value("solver", json::object()));
  if (seed != 0) opts.seed = seed;

  Instance inst;
  if (!instance_path.empty()) {
    inst = load_instance(instance_path);
  } else {
    GeneratorSpec spec = generator_from_json(cfg_json.value("generator", json::object()));
    if (seed != 0) spec.seed = seed;
    inst.files = generate_files(spec);
    inst.scenarios = generate_scenarios(inst.files, spec);
  }

  const Method method = method_from_name(method_name_str);
  StageOneDecision d1;
  std::vector<StageTwoDecision> d2;
  long iterations = 0;
  if (method == Method::kProfitMax) {
    StageOnePlan plan = solve_stage_one(inst.files, inst.scenarios, cfg, opts);
    d1 = std::move(plan.d1);
    d2 = std::move(plan.d2_per_scenario);
    iterations = plan.report.iterations;
  } else if (method == Method::kIndividual) {
    BaselineResult r = solve_individual(inst.files, inst.scenarios, cfg, opts);
    d1 = std::move(r.d1);
    d2 = std::move(r.d2_per_scenario);
  } else {
    const GreedyOrder order = method == Method::kGreedyPerSize ? GreedyOrder::kPerSize
                                                               : GreedyOrder::kPerRate;
    BaselineResult r = solve_greedy(inst.files, inst.scenarios, cfg, opts, order);
    d1 = std::move(r.d1);
    d2 = std::move(r.d2_per_scenario);
  }

  const ProfitBreakdown profit = profit_expected(d1, d2, inst.scenarios, inst.files, cfg);
  if (format == "json") {
    json out;
    out["schema_version"] = 1;
    out["method"] = method_name_str;
    out["expected_profit_cents"] = profit.total_cents();
    out["storage_profit_cents"] = profit.storage_profit_cents();
    out["access_profit_cents"] = profit.access_profit_cents;
    out["solver_iterations"] = iterations;
    out["decision"] = decision_to_json(d1, d2);
    const std::string text = out.dump(2) + "\n";
    if (out_path.empty())
      std::cout << text;
    else
      write_file(out_path, text);
  } else {
    std::ostringstream out;
    out << "method,expected_profit_cents,storage_profit_cents,access_profit_cents\n"
        << method_name_str << ',' << profit.total_cents() << ','
        << profit.storage_profit_cents() << ',' << profit.access_profit_cents << '\n';
    if (out_path.empty())
      std::cout << out.str();
    else
      write_file(out_path, out.str());
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, std::uint64_t seed,
              const std::string& out_dir) {
  ExperimentPlan plan = plan_from_json(json::parse(read_file(config_path)));
  if (seed != 0) plan.seed = seed;
  const SweepResultSet results = run_experiment(plan);
  emit_report(results, plan, out_dir);
  long infeasible = 0;
  for (const auto& r : results.rows)
    if (!r.feasible) ++infeasible;
  std::cout << "wrote " << results.rows.size() << " rows to " << out_dir << "/results.csv";
  if (infeasible > 0) std::cout << " (" << infeasible << " infeasible)";
  std::cout << '\n';
  return 0;
}

int cmd_validate_queue(double mu_gbps, double utilization, long requests,
                       std::uint64_t seed) {
  // Single-class check: analytic waiting time vs simulation at the given
  // utilization.
  const double mu = gbps_to_mbps(mu_gbps);
  const double size_mb = 256.0;
  const double arrival = utilization * mu / mb_to_mbit(size_mb);

  TierLoad load;
  load.add(arrival, size_mb);
  const double analytic = waiting_time(load, mu);

  DesConfig cfg;
  cfg.classes = {{arrival, size_mb}};
  cfg.mu_mbps = mu;
  cfg.horizon_requests = requests;
  cfg.seed = seed;
  const DesResult sim = simulate_tier(cfg);
  const double rel = std::abs(sim.mean_wait_s - analytic) / std::max(analytic, 1e-12);
  std::printf("analytic_wait_s=%.6g simulated_wait_s=%.6g ci_halfwidth_s=%.3g "
              "relative_error=%.4f\n",
              analytic, sim.mean_wait_s, sim.ci_halfwidth_s, rel);
  return rel <= 0.05 ? 0 : 1;
}

int cmd_oracle(const std::string& config_path, const std::string& instance_path,
               int grid) {
  json cfg_json = config_path.empty() ? json::object() : json::parse(read_file(config_path));
  SystemConfig cfg = system_from_json(cfg_json.contains("system") ? cfg_json["system"]
                                                                  : cfg_json);
  const Instance inst = load_instance(instance_path);
  const OracleResult result = brute_force_oracle(inst.files, inst.scenarios, cfg, grid);
  json out;
  out["profit_cents"] = result.profit_cents;
  out["decision"] = decision_to_json(result.d1, result.d2_per_scenario);
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage bidding for tiered cloud storage"};
  app.require_subcommand(1);

  std::string config_path, instance_path, out_path, method = "pm", format = "csv";
  std::uint64_t seed = 0;

  auto* gen = app.add_subcommand("generate", "Emit a seeded instance as JSON");
  gen->add_option("--config", config_path, "Config JSON path");
  gen->add_option("--seed", seed, "Generator seed override");
  gen->add_option("--out", out_path, "Output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "Solve one instance with one method");
  solve->add_option("--config", config_path, "Config JSON path");
  solve->add_option("--instance", instance_path, "Instance JSON path");
  solve->add_option("--method", method, "pm|is|gh1|gh2");
  solve->add_option("--seed", seed, "Seed override");
  solve->add_option("--out", out_path, "Output file (default stdout)");
  solve->add_option("--format", format, "csv|json");

  auto* sweep = app.add_subcommand("sweep", "Run a sweep experiment plan");
  sweep->add_option("--config", config_path, "Plan JSON path")->required();
  sweep->add_option("--seed", seed, "Plan seed override");
  std::string out_dir = "sweep_out";
  sweep->add_option("--out", out_dir, "Output directory");

  auto* vq = app.add_subcommand("validate-queue", "Check the waiting-time formula by simulation");
  double mu_gbps = 100.0, utilization = 0.6;
  long requests = 1000000;
  vq->add_option("--rate-gbps", mu_gbps, "Service rate, Gb/s");
  vq->add_option("--utilization", utilization, "Offered load fraction in (0,1)");
  vq->add_option("--requests", requests, "Simulated request count");
  vq->add_option("--seed", seed, "Simulation seed");

  auto* oracle = app.add_subcommand("oracle", "Brute-force a tiny instance");
  oracle->add_option("--config", config_path, "Config JSON path");
  oracle->add_option("--instance", instance_path, "Instance JSON path")->required();
  int grid = 32;
  oracle->add_option("--grid", grid, "Scheduling grid resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(config_path, seed, out_path);
    if (solve->parsed())
      return cmd_solve(config_path, instance_path, method, seed, out_path, format);
    if (sweep->parsed()) return cmd_sweep(config_path, seed, out_dir);
    if (vq->parsed()) return cmd_validate_queue(mu_gbps, utilization, requests, seed);
    if (oracle->parsed()) return cmd_oracle(config_path, instance_path, grid);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
