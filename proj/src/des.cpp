#include "tierbid/des.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tierbid {

void DesConfig::validate() const {
  if (classes.empty()) throw StructuralError("simulation needs at least one class");
  if (horizon_requests < 10000) throw StructuralError("horizon must be >= 10^4 requests");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 0.5))
    throw StructuralError("warmup_fraction must be in [0, 0.5)");
  if (!(mu_mbps > 0.0)) throw StructuralError("mu_mbps must be > 0");
  double offered = 0.0;
  for (const auto& c : classes) {
    if (c.arrival_per_s < 0.0 || c.size_mb <= 0.0)
      throw StructuralError("invalid simulation class");
    offered += c.arrival_per_s * mb_to_mbit(c.size_mb);
  }
  if (offered >= mu_mbps)
    throw InstabilityError("offered load >= service rate; refusing unstable simulation");
}

DesResult simulate_tier(const DesConfig& cfg) {
  cfg.validate();

  const std::size_t num_classes = cfg.classes.size();
  DesResult result;
  result.mean_latency_per_class_s.assign(num_classes, 0.0);
  result.requests_per_class.assign(num_classes, 0);

  double total_rate = 0.0;
  std::vector<double> rates(num_classes);
  for (std::size_t i = 0; i < num_classes; ++i) {
    rates[i] = cfg.classes[i].arrival_per_s;
    total_rate += rates[i];
  }
  if (total_rate <= 0.0) return result; // no traffic at all

  std::mt19937_64 rng(cfg.seed);
  std::exponential_distribution<double> interarrival(total_rate);
  std::discrete_distribution<std::size_t> pick_class(rates.begin(), rates.end());
  std::exponential_distribution<double> unit_exp(1.0);

  const long warmup = static_cast<long>(cfg.horizon_requests * cfg.warmup_fraction);
  const long measured = cfg.horizon_requests - warmup;

  // Lindley recursion; FIFO keeps departures ordered, so N(t) integrates with
  // a single merge pass over arrival and departure times.
  std::vector<double> arrivals_post;   // post-warmup arrival epochs
  std::vector<double> departures_post; // departure epochs of post-warmup jobs
  arrivals_post.reserve(measured);
  departures_post.reserve(measured);

  std::vector<double> waits;
  waits.reserve(measured);
  std::vector<double> latency_sum(num_classes, 0.0);

  double clock = 0.0;
  double prev_depart = 0.0; // departure epoch of the previous job
  double first_measured_arrival = 0.0;
  for (long n = 0; n < cfg.horizon_requests; ++n) {
    clock += interarrival(rng);
    const std::size_t cls = pick_class(rng);
    const double service =
        mb_to_mbit(cfg.classes[cls].size_mb) * unit_exp(rng) / cfg.mu_mbps;
    const double start = std::max(clock, prev_depart);
    const double wait = start - clock;
    prev_depart = start + service;
    if (n >= warmup) {
      if (waits.empty()) first_measured_arrival = clock;
      waits.push_back(wait);
      latency_sum[cls] += wait + service;
      ++result.requests_per_class[cls];
      arrivals_post.push_back(clock);
      departures_post.push_back(prev_depart);
    }
  }

  result.measured_requests = static_cast<long>(waits.size());
  if (waits.empty()) return result;

  double wait_sum = 0.0;
  for (double w : waits) wait_sum += w;
  result.mean_wait_s = wait_sum / waits.size();

  for (std::size_t i = 0; i < num_classes; ++i) {
    if (result.requests_per_class[i] > 0)
      result.mean_latency_per_class_s[i] = latency_sum[i] / result.requests_per_class[i];
  }

  // Batch-means 95% CI over 20 batches.
  const int num_batches = 20;
  const std::size_t batch_size = waits.size() / num_batches;
  if (batch_size > 1) {
    std::vector<double> batch_means(num_batches, 0.0);
    for (int b = 0; b < num_batches; ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < batch_size; ++j) s += waits[b * batch_size + j];
      batch_means[b] = s / batch_size;
    }
    double mean = 0.0;
    for (double m : batch_means) mean += m;
    mean /= num_batches;
    double var = 0.0;
    for (double m : batch_means) var += (m - mean) * (m - mean);
    var /= (num_batches - 1);
    const double t_975_df19 = 2.093;
    result.ci_halfwidth_s = t_975_df19 * std::sqrt(var / num_batches);
  }

  const double end_time = std::max(arrivals_post.back(), departures_post.back());
  const double span = end_time - first_measured_arrival;
  if (span > 0.0) {
    result.sim_time_s = span;
    result.observed_arrival_rate_per_s = static_cast<double>(waits.size()) / span;

    // Integrate N(t) over the measurement window.
    double area = 0.0;
    std::size_t ai = 0, di = 0;
    long in_system = 0;
    double t = first_measured_arrival;
    while (di < departures_post.size()) {
      double next;
      bool is_arrival;
      if (ai < arrivals_post.size() && arrivals_post[ai] <= departures_post[di]) {
        next = arrivals_post[ai];
        is_arrival = true;
      } else {
        next = departures_post[di];
        is_arrival = false;
      }
      area += in_system * (next - t);
      t = next;
      if (is_arrival) {
        ++in_system;
        ++ai;
      } else {
        --in_system;
        ++di;
      }
    }
    result.mean_number_in_system = area / span;
  }
  return result;
}

}  // namespace tierbid
