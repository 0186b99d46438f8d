#include "tierbid/penalty.hpp"

#include <cmath>

namespace tierbid {

namespace {

// Stable logistic sigmoid 1/(1+exp(-t)).
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double z = std::exp(t);
  return z / (1.0 + z);
}

// sigma'(t) = sigma(t) sigma(-t), even in t.
double sigmoid_deriv(double t) {
  const double z = std::exp(-std::abs(t));
  const double d = 1.0 + z;
  return z / (d * d);
}

}  // namespace

double penalty_g(double x, double alpha) {
  return sigmoid(-alpha * x) - sigmoid(-alpha * (x - 1.0));
}

double penalty_g1(double x, double alpha) {
  return penalty_g(x, alpha) + 0.5 - sigmoid(-alpha);
}

double penalty_g_grad(double x, double alpha) {
  return -alpha * (sigmoid_deriv(alpha * x) - sigmoid_deriv(alpha * (x - 1.0)));
}

double relaxed_objective(const std::vector<double>& accept,
                         const std::vector<double>& hot_replica,
                         const std::vector<std::vector<double>>& accept_access_per_scenario,
                         const std::vector<Scenario>& scenarios,
                         const std::vector<FileSpec>& files,
                         const SystemConfig& cfg,
                         const PenaltyParams& pen) {
  pen.validate();
  const std::size_t n = files.size();
  if (accept.size() != n || hot_replica.size() != n ||
      accept_access_per_scenario.size() != scenarios.size())
    throw StructuralError("relaxed decision arrays must match instance dimensions");

  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    value += files[i].storage_bid_cents * accept[i];
    value -= files[i].size_mb * (2.0 * accept[i] - hot_replica[i]) * cfg.cold_cost_cents_per_mb;
    value -= files[i].size_mb * hot_replica[i] * cfg.hot_cost_cents_per_mb;
    value += pen.weight * (penalty_g1(accept[i], pen.alpha) + penalty_g1(hot_replica[i], pen.alpha));
  }
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto& h = accept_access_per_scenario[k];
    if (h.size() != n) throw StructuralError("relaxed H^k array must match file count");
    for (std::size_t i = 0; i < n; ++i) {
      value += cfg.num_slots * scenarios[k].probability * scenarios[k].access_bid_cents[i] * h[i];
      value += pen.weight * penalty_g1(h[i], pen.alpha);
    }
  }
  return value;
}

}  // namespace tierbid
