#include "tierbid/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tierbid/baselines.hpp"
#include "tierbid/feasibility.hpp"

namespace tierbid {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::kProfitMax: return "pm";
    case Method::kIndividual: return "is";
    case Method::kGreedyPerSize: return "gh1";
    case Method::kGreedyPerRate: return "gh2";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "pm") return Method::kProfitMax;
  if (name == "is") return Method::kIndividual;
  if (name == "gh1") return Method::kGreedyPerSize;
  if (name == "gh2") return Method::kGreedyPerRate;
  throw StructuralError("unknown method: " + name);
}

const char* sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::kColdCapacity: return "cold_capacity";
    case SweepVariable::kHotRate: return "hot_rate";
    case SweepVariable::kHotCost: return "hot_cost";
    case SweepVariable::kColdCost: return "cold_cost";
  }
  return "?";
}

SweepVariable sweep_variable_from_name(const std::string& name) {
  if (name == "cold_capacity") return SweepVariable::kColdCapacity;
  if (name == "hot_rate") return SweepVariable::kHotRate;
  if (name == "hot_cost") return SweepVariable::kHotCost;
  if (name == "cold_cost") return SweepVariable::kColdCost;
  throw StructuralError("unknown sweep variable: " + name);
}

void ExperimentPlan::validate() const {
  gen.validate();
  solver.validate();
  if (grid.empty()) throw StructuralError("sweep grid must be non-empty");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw StructuralError("sweep grid must be sorted ascending");
  if (runs < 1) throw StructuralError("runs must be >= 1");
  if (threads < 1) throw StructuralError("threads must be >= 1");
  if (methods.empty()) throw StructuralError("at least one method required");
  for (double p : grid) config_at(p).validate();
}

SystemConfig ExperimentPlan::config_at(double point) const {
  SystemConfig cfg = base_cfg;
  switch (variable) {
    case SweepVariable::kColdCapacity: cfg.cold_capacity_mb = point; break;
    case SweepVariable::kHotRate: cfg.hot_rate_mbps = point; break;
    case SweepVariable::kHotCost: cfg.hot_cost_cents_per_mb = point; break;
    case SweepVariable::kColdCost: cfg.cold_cost_cents_per_mb = point; break;
  }
  return cfg;
}

namespace {

struct RunInstance {
  std::vector<FileSpec> files;
  std::vector<Scenario> scenarios;
  std::vector<int> slot_scenarios;
};

RunInstance make_instance(const ExperimentPlan& plan, int run) {
  GeneratorSpec spec = plan.gen;
  spec.seed = mix_seed(plan.seed, static_cast<std::uint64_t>(run));
  RunInstance inst;
  inst.files = generate_files(spec);
  inst.scenarios = generate_scenarios(inst.files, spec);
  inst.slot_scenarios = realize_slots(inst.scenarios, plan.base_cfg.num_slots,
                                      mix_seed(spec.seed, 0x5107ULL));
  return inst;
}

void fill_row(SweepRow& row, const StageOneDecision& d1,
              const std::vector<StageTwoDecision>& d2_per_scenario,
              const RunInstance& inst, const SystemConfig& cfg) {
  std::vector<StageTwoDecision> d2_per_slot;
  d2_per_slot.reserve(inst.slot_scenarios.size());
  for (int k : inst.slot_scenarios) d2_per_slot.push_back(d2_per_scenario[k]);

  const ProfitBreakdown profit = profit_realized(d1, d2_per_slot, inst.slot_scenarios,
                                                 inst.scenarios, inst.files, cfg);
  row.total_profit_cents = profit.total_cents();
  row.storage_profit_cents = profit.storage_profit_cents();
  row.access_profit_cents = profit.access_profit_cents;
  for (std::size_t i = 0; i < inst.files.size(); ++i) {
    row.accepted_storage_bids += d1.accept[i];
    row.hot_replicas += d1.hot_replica[i];
  }
  row.submitted_access_bids =
      row.accepted_storage_bids * static_cast<long>(inst.slot_scenarios.size());
  for (const auto& d2 : d2_per_slot)
    for (std::size_t i = 0; i < inst.files.size(); ++i)
      row.accepted_access_bids += d2.accept_access[i];
  row.arar = row.submitted_access_bids == 0
                 ? 0.0
                 : static_cast<double>(row.accepted_access_bids) /
                       static_cast<double>(row.submitted_access_bids);
}

// All methods for one (grid point, run). The storage-only stage one is
// shared by IS and both greedy variants.
void run_point(const ExperimentPlan& plan, double point, int run,
               const RunInstance& inst, std::vector<SweepRow>& out) {
  const SystemConfig cfg = plan.config_at(point);
  SolverOptions opts = plan.solver;
  opts.seed = mix_seed(plan.seed, 0xabcdULL + run);

  bool need_storage_d1 = false;
  for (Method m : plan.methods) need_storage_d1 |= (m != Method::kProfitMax);
  StageOneDecision storage_d1;
  long storage_iters = 0;
  bool storage_ok = false;
  if (need_storage_d1) {
    try {
      StageOnePlan sp = solve_storage_stage_one(inst.files, cfg, opts);
      storage_d1 = std::move(sp.d1);
      storage_iters = sp.report.iterations;
      storage_ok = true;
    } catch (const std::exception&) {
    }
  }
  for (std::size_t m = 0; m < plan.methods.size(); ++m) {
    const Method method = plan.methods[m];
    SweepRow& row = out[m];
    row.point = point;
    row.method = method;
    row.run = run;
    try {
      if (method == Method::kProfitMax) {
        StageOnePlan sp = solve_stage_one(inst.files, inst.scenarios, cfg, opts);
        row.solver_iterations = sp.report.iterations;
        row.solver_best_start = sp.report.best_start;
        fill_row(row, sp.d1, sp.d2_per_scenario, inst, cfg);
      } else {
        if (!storage_ok) throw InfeasibleInstanceError("storage stage one failed");
        std::vector<StageTwoDecision> d2;
        d2.reserve(inst.scenarios.size());
        for (const auto& sc : inst.scenarios) {
          if (method == Method::kIndividual) {
            auto [dec, rep] = solve_stage_two(storage_d1, sc, inst.files, cfg, opts);
            row.solver_iterations += rep.iterations;
            d2.push_back(std::move(dec));
          } else {
            const GreedyOrder order = method == Method::kGreedyPerSize
                                          ? GreedyOrder::kPerSize
                                          : GreedyOrder::kPerRate;
            d2.push_back(greedy_stage_two(storage_d1, sc, inst.files, cfg, order));
          }
        }
        row.solver_iterations += storage_iters;
        fill_row(row, storage_d1, d2, inst, cfg);
      }
    } catch (const std::exception&) {
      row = SweepRow{};
      row.point = point;
      row.method = method;
      row.run = run;
      row.feasible = false;
    }
  }
}

}  // namespace

SweepResultSet run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  SweepResultSet results;
  results.variable = plan.variable;
  const std::size_t num_points = plan.grid.size();
  const std::size_t num_methods = plan.methods.size();
  results.rows.assign(num_points * num_methods * plan.runs, SweepRow{});

  struct Job {
    std::size_t point_idx;
    int run;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < num_points; ++p)
    for (int r = 0; r < plan.runs; ++r) jobs.push_back({p, r});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job job = jobs[j];
      const RunInstance inst = make_instance(plan, job.run);
      std::vector<SweepRow> point_rows(num_methods);
      run_point(plan, plan.grid[job.point_idx], job.run, inst, point_rows);
      for (std::size_t m = 0; m < num_methods; ++m) {
        const std::size_t idx =
            (job.point_idx * num_methods + m) * plan.runs + job.run;
        results.rows[idx] = std::move(point_rows[m]);
      }
    }
  };
  const int num_threads = std::min<int>(plan.threads, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < num_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows, SweepVariable variable) {
  std::ostringstream out;
  out << "variable,point,method,run,feasible,total_profit_cents,storage_profit_cents,"
         "access_profit_cents,arar,accepted_storage_bids,hot_replicas,"
         "accepted_access_bids,submitted_access_bids,solver_iterations,"
         "solver_best_start\n";
  const char* vname = sweep_variable_name(variable);
  for (const auto& r : rows) {
    out << vname << ',' << format_double(r.point) << ',' << method_name(r.method) << ','
        << r.run << ',' << (r.feasible ? 1 : 0) << ','
        << format_double(r.total_profit_cents) << ','
        << format_double(r.storage_profit_cents) << ','
        << format_double(r.access_profit_cents) << ',' << format_double(r.arar) << ','
        << r.accepted_storage_bids << ',' << r.hot_replicas << ','
        << r.accepted_access_bids << ',' << r.submitted_access_bids << ','
        << r.solver_iterations << ',' << r.solver_best_start << '\n';
  }
  return out.str();
}

std::vector<SweepRow> rows_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw StructuralError("empty CSV");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 15) throw StructuralError("bad CSV row: " + line);
    SweepRow r;
    r.point = std::stod(fields[1]);
    r.method = method_from_name(fields[2]);
    r.run = std::stoi(fields[3]);
    r.feasible = fields[4] == "1";
    r.total_profit_cents = std::stod(fields[5]);
    r.storage_profit_cents = std::stod(fields[6]);
    r.access_profit_cents = std::stod(fields[7]);
    r.arar = std::stod(fields[8]);
    r.accepted_storage_bids = std::stol(fields[9]);
    r.hot_replicas = std::stol(fields[10]);
    r.accepted_access_bids = std::stol(fields[11]);
    r.submitted_access_bids = std::stol(fields[12]);
    r.solver_iterations = std::stol(fields[13]);
    r.solver_best_start = std::stoi(fields[14]);
    rows.push_back(r);
  }
  return rows;
}

namespace {

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1)) : 0.0;
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

void emit_report(const SweepResultSet& results, const ExperimentPlan& plan,
                 const std::string& out_dir) {
  if (results.rows.empty()) throw StructuralError("no results to report");
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  write_file(dir / "results.csv", rows_to_csv(results.rows, results.variable));

  // Per (point, method) aggregates, in plan order.
  struct Agg {
    std::vector<double> total, storage, access, arar, stor_bids, acc_bids;
  };
  std::map<std::pair<double, std::size_t>, Agg> aggs;
  auto method_pos = [&](Method m) {
    return static_cast<std::size_t>(
        std::find(plan.methods.begin(), plan.methods.end(), m) - plan.methods.begin());
  };
  for (const auto& r : results.rows) {
    Agg& a = aggs[{r.point, method_pos(r.method)}];
    a.total.push_back(r.total_profit_cents);
    a.storage.push_back(r.storage_profit_cents);
    a.access.push_back(r.access_profit_cents);
    a.arar.push_back(r.arar);
    a.stor_bids.push_back(static_cast<double>(r.accepted_storage_bids));
    a.acc_bids.push_back(static_cast<double>(r.accepted_access_bids));
  }

  nlohmann::json summary;
  summary["schema_version"] = 1;
  summary["metadata"] = {
      {"variable", sweep_variable_name(results.variable)},
      {"runs", plan.runs},
      {"seed", plan.seed},
      {"generated_at",
       std::chrono::duration_cast<std::chrono::seconds>(
           std::chrono::system_clock::now().time_since_epoch())
           .count()},
  };
  summary["points"] = nlohmann::json::array();
  for (double point : plan.grid) {
    nlohmann::json entry;
    entry["point"] = point;
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      const Agg& a = aggs[{point, m}];
      nlohmann::json ms;
      auto put = [&](const char* key, const std::vector<double>& xs) {
        const Stats s = stats_of(xs);
        ms[std::string(key) + "_mean"] = s.mean;
        ms[std::string(key) + "_std"] = s.stddev;
      };
      put("total_profit_cents", a.total);
      put("storage_profit_cents", a.storage);
      put("access_profit_cents", a.access);
      put("arar", a.arar);
      put("accepted_storage_bids", a.stor_bids);
      put("accepted_access_bids", a.acc_bids);
      entry[method_name(plan.methods[m])] = std::move(ms);
    }
    summary["points"].push_back(std::move(entry));
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  // Four plot-data panels: grid point column plus one mean column per method.
  auto emit_panel = [&](const std::string& file, const std::vector<std::string>& cols,
                        auto value_of) {
    std::ostringstream out;
    out << "point";
    for (std::size_t m = 0; m < plan.methods.size(); ++m)
      for (const auto& c : cols)
        out << ',' << method_name(plan.methods[m]) << (c.empty() ? "" : "_" + c);
    out << '\n';
    for (double point : plan.grid) {
      out << format_double(point);
      for (std::size_t m = 0; m < plan.methods.size(); ++m)
        for (std::size_t c = 0; c < cols.size(); ++c)
          out << ',' << format_double(value_of(aggs[{point, m}], c));
      out << '\n';
    }
    write_file(dir / file, out.str());
  };
  emit_panel("panel_profit.csv", {""},
             [](const Agg& a, std::size_t) { return stats_of(a.total).mean; });
  emit_panel("panel_profit_split.csv", {"storage", "access"}, [](const Agg& a, std::size_t c) {
    return stats_of(c == 0 ? a.storage : a.access).mean;
  });
  emit_panel("panel_arar.csv", {""},
             [](const Agg& a, std::size_t) { return stats_of(a.arar).mean; });
  emit_panel("panel_counts.csv", {"storage", "access"}, [](const Agg& a, std::size_t c) {
    return stats_of(c == 0 ? a.stor_bids : a.acc_bids).mean;
  });
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw StructuralError("spearman needs two equal-length series of size >= 2");
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * (i + j) + 1.0; // average rank for the tie group
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const std::vector<double> rx = ranks(xs), ry = ranks(ys);
  const Stats sx = stats_of(rx), sy = stats_of(ry);
  double cov = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i)
    cov += (rx[i] - sx.mean) * (ry[i] - sy.mean);
  cov /= rx.size() - 1;
  if (sx.stddev == 0.0 || sy.stddev == 0.0) return 0.0;
  return cov / (sx.stddev * sy.stddev);
}

}  // namespace tierbid
