#include "tierbid/latency.hpp"

#include <cmath>

namespace tierbid {

TierLoad tier_load(const StageTwoDecision& d2, const Scenario& sc,
                   const std::vector<FileSpec>& files, int tier) {
  TierLoad load;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const double pi = d2.pi(i, tier);
    if (std::isnan(pi)) throw StructuralError("NaN scheduling probability");
    if (pi <= 0.0) continue;
    load.add(sc.arrival_rate_per_s[i] * pi, files[i].size_mb);
  }
  return load;
}

std::pair<double, double> service_moments(const TierLoad& load, double mu_mbps) {
  if (!(load.agg_arrival_per_s > 0.0))
    throw UndefinedMomentsError("service moments undefined for zero aggregate arrival rate");
  const double g = load.agg_arrival_per_s;
  const double mean = load.f_mbps / (mu_mbps * g);
  const double second = 2.0 * load.h_mb2ps / (mu_mbps * mu_mbps * g);
  return {mean, second};
}

double waiting_time(const TierLoad& load, double mu_mbps) {
  if (load.agg_arrival_per_s <= 0.0) return 0.0;
  if (!(load.f_mbps < mu_mbps))
    throw InstabilityError("offered load meets or exceeds service rate; queue diverges");
  return load.h_mb2ps / (mu_mbps * (mu_mbps - load.f_mbps));
}

double expected_latency(std::size_t file_index, const StageTwoDecision& d2,
                        const Scenario& sc, const std::vector<FileSpec>& files,
                        const SystemConfig& cfg) {
  double total = 0.0;
  for (int tier = 0; tier < kNumTiers; ++tier) {
    const double pi = d2.pi(file_index, tier);
    if (std::isnan(pi)) throw StructuralError("NaN scheduling probability");
    if (pi <= 0.0) continue;
    const double mu = cfg.rate_mbps(tier);
    const TierLoad load = tier_load(d2, sc, files, tier);
    total += pi * mb_to_mbit(files[file_index].size_mb) / mu;
    total += pi * waiting_time(load, mu);
  }
  return total;
}

std::vector<double> latency_slacks(const StageTwoDecision& d2, const Scenario& sc,
                                   const std::vector<FileSpec>& files,
                                   const SystemConfig& cfg) {
  // Waiting times are shared per tier; compute them once.
  double wait[kNumTiers];
  for (int tier = 0; tier < kNumTiers; ++tier) {
    const TierLoad load = tier_load(d2, sc, files, tier);
    wait[tier] = waiting_time(load, cfg.rate_mbps(tier));
  }
  std::vector<double> slacks(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    double latency = 0.0;
    for (int tier = 0; tier < kNumTiers; ++tier) {
      const double pi = d2.pi(i, tier);
      if (pi <= 0.0) continue;
      latency += pi * (mb_to_mbit(files[i].size_mb) / cfg.rate_mbps(tier) + wait[tier]);
    }
    slacks[i] = ms_to_s(sc.latency_req_ms[i]) - latency;
  }
  return slacks;
}

}  // namespace tierbid
