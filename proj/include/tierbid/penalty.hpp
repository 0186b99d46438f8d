#pragma once

#include <vector>

#include "tierbid/types.hpp"

namespace tierbid {

struct PenaltyParams {
  double alpha = 1e6; // sigmoid steepness
  double weight = 1e9; // multiplier C

  void validate() const {
    if (!(alpha > 0.0)) throw StructuralError("penalty alpha must be > 0");
    if (!(weight > 0.0)) throw StructuralError("penalty weight must be > 0");
  }
};

// Integrality penalty g(x) = sigmoid(-alpha x) - sigmoid(-alpha (x-1)),
// evaluated with overflow-safe branches; saturates instead of overflowing.
double penalty_g(double x, double alpha);

// Shifted penalty g1(x) = g(x) + 1/2 - sigmoid(-alpha); zero at x = 0 and
// x = 1, strictly negative on (0,1).
double penalty_g1(double x, double alpha);

// Analytic derivative shared by g and g1.
double penalty_g_grad(double x, double alpha);

// Relaxed deterministic-equivalent objective: the profit expression of the
// first-stage problem evaluated at fractional decisions, plus
// weight * g1 over every binary-relaxed variable (A, R and each H^k).
double relaxed_objective(const std::vector<double>& accept,
                         const std::vector<double>& hot_replica,
                         const std::vector<std::vector<double>>& accept_access_per_scenario,
                         const std::vector<Scenario>& scenarios,
                         const std::vector<FileSpec>& files,
                         const SystemConfig& cfg,
                         const PenaltyParams& pen);

}  // namespace tierbid
