#include "tierbid/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "tierbid/latency.hpp"
#include "tierbid/penalty.hpp"

namespace tierbid {

void SolverOptions::validate() const {
  if (multistarts < 1) throw StructuralError("multistarts must be >= 1");
  if (max_iters < 1) throw StructuralError("max_iters must be >= 1");
  if (al_rounds < 1) throw StructuralError("al_rounds must be >= 1");
  if (!(rho_init > 0.0 && rho_growth >= 1.0))
    throw StructuralError("constraint penalty schedule must be positive and nondecreasing");
  if (!(tol > 0.0)) throw StructuralError("tol must be > 0");
  for (std::size_t s = 1; s < alpha_schedule.size(); ++s) {
    if (alpha_schedule[s].alpha < alpha_schedule[s - 1].alpha)
      throw StructuralError("alpha_schedule must be monotone increasing");
  }
}

std::vector<ContinuationStage> SolverOptions::default_schedule(const SystemConfig& cfg) {
  // Moderate alpha stages do the integrality work; the final stage at the
  // configured alpha only sharpens variables already near {0,1} (its
  // gradient is numerically zero elsewhere).
  std::vector<ContinuationStage> stages = {
      {0.0, 0.0}, {10.0, 100.0}, {30.0, 300.0}, {100.0, 1000.0}, {1000.0, 10000.0}};
  if (cfg.penalty_alpha > stages.back().alpha)
    stages.push_back({cfg.penalty_alpha, 10000.0});
  return stages;
}

namespace {

using VecD = std::vector<double>;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Smooth positive extension of mu - f past the barrier point 0.98 mu, so the
// waiting-time expression stays finite and differentiable while the
// stability multipliers push the load back below the pole.
struct BarrierDenom {
  double value = 0.0;
  double deriv = 0.0; // d/df
};

BarrierDenom barrier_denom(double f, double mu) {
  const double fcap = 0.98 * mu;
  BarrierDenom d;
  if (f <= fcap) {
    d.value = mu - f;
    d.deriv = -1.0;
  } else {
    // Exponent capped so the denominator stays bounded away from zero even
    // at wildly overloaded iterates; beyond the cap the stability and
    // latency multipliers carry the whole restoring force.
    const double tail = mu - fcap;
    const double z = std::exp(-std::min((f - fcap) / tail, 30.0));
    d.value = tail * z;
    d.deriv = -z;
  }
  return d;
}

// Constraint residuals (normalized; <= 0 means satisfied) of the relaxed
// problem at one point.
struct ConstraintValues {
  std::array<double, 2> cap{};                   // capacity per tier
  VecD replica_coupling;                         // R_i - A_i
  std::vector<VecD> access_coupling;             // H_ik - A_i
  std::vector<VecD> hot_coupling;                // pi2_ik - R_i
  std::vector<std::array<double, 2>> stability;  // per scenario per tier
  std::vector<VecD> latency;                     // per scenario per file

  double max_violation() const {
    double v = std::max({0.0, cap[0], cap[1]});
    for (double c : replica_coupling) v = std::max(v, c);
    for (const auto& block : {&access_coupling, &hot_coupling, &latency})
      for (const auto& vec : *block)
        for (double c : vec) v = std::max(v, c);
    for (const auto& st : stability) v = std::max({v, st[0], st[1]});
    return v;
  }
};

// Relaxed problem over x = [A, R, (H^k, pi2^k) for each scenario], with
// pi_{i,1}^k = H_i^k - pi2_i^k substituted out. Capacity, coupling,
// stability and latency constraints are handled by an augmented Lagrangian;
// the box (and pi2 <= H) by projection.
class RelaxedEngine {
 public:
  struct Setup {
    const std::vector<FileSpec>* files = nullptr;
    std::vector<const Scenario*> scenarios;
    VecD scenario_weight; // multiplier on sum_i q_i H_i per scenario
    SystemConfig cfg;     // already eps-restricted by the caller
    bool include_storage_profit = true;
    bool fix_first_stage = false;
    VecD fixed_accept, fixed_replica; // integral, used when fix_first_stage
    bool fix_access = false;
    std::vector<VecD> fixed_access; // integral H^k, used when fix_access
  };

  explicit RelaxedEngine(Setup setup) : s_(std::move(setup)) {
    I_ = s_.files->size();
    K_ = s_.scenarios.size();
    n_ = 2 * I_ + 2 * K_ * I_;
    bits_.resize(I_);
    for (std::size_t i = 0; i < I_; ++i) bits_[i] = mb_to_mbit((*s_.files)[i].size_mb);
    latency_req_s_.resize(K_);
    for (std::size_t k = 0; k < K_; ++k) {
      latency_req_s_[k].resize(I_);
      for (std::size_t i = 0; i < I_; ++i)
        latency_req_s_[k][i] = ms_to_s(s_.scenarios[k]->latency_req_ms[i]);
    }
    reset_multipliers(100.0);
  }

  std::size_t dim() const { return n_; }
  std::size_t idx_a(std::size_t i) const { return i; }
  std::size_t idx_r(std::size_t i) const { return I_ + i; }
  std::size_t idx_h(std::size_t k, std::size_t i) const { return 2 * I_ + 2 * k * I_ + i; }
  std::size_t idx_p(std::size_t k, std::size_t i) const { return 2 * I_ + 2 * k * I_ + I_ + i; }

  void set_penalty(double alpha, double weight) {
    alpha_ = alpha;
    weight_ = weight;
  }

  void reset_multipliers(double rho) {
    rho_ = rho;
    lam_cap_ = {0.0, 0.0};
    lam_ra_.assign(I_, 0.0);
    lam_ha_.assign(K_, VecD(I_, 0.0));
    lam_pr_.assign(K_, VecD(I_, 0.0));
    lam_st_.assign(K_, {0.0, 0.0});
    lam_lat_.assign(K_, VecD(I_, 0.0));
    prev_violation_ = std::numeric_limits<double>::infinity();
  }

  void project(VecD& x) const {
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    for (std::size_t i = 0; i < I_; ++i) {
      if (s_.fix_first_stage) {
        x[idx_a(i)] = s_.fixed_accept[i];
        x[idx_r(i)] = s_.fixed_replica[i];
      } else {
        x[idx_a(i)] = clamp01(x[idx_a(i)]);
        x[idx_r(i)] = clamp01(x[idx_r(i)]);
      }
    }
    for (std::size_t k = 0; k < K_; ++k) {
      for (std::size_t i = 0; i < I_; ++i) {
        double& h = x[idx_h(k, i)];
        if (s_.fix_access) {
          h = s_.fixed_access[k][i];
        } else if (s_.fix_first_stage) {
          h = std::clamp(h, 0.0, s_.fixed_accept[i]);
        } else {
          h = clamp01(h);
        }
        double hi = h;
        if (s_.fix_first_stage) hi = std::min(hi, s_.fixed_replica[i]);
        x[idx_p(k, i)] = std::clamp(x[idx_p(k, i)], 0.0, hi);
      }
    }
  }

  double eval(const VecD& x, VecD* grad, ConstraintValues* cv) const {
    if (grad) grad->assign(n_, 0.0);
    if (cv) {
      cv->replica_coupling.assign(I_, 0.0);
      cv->access_coupling.assign(K_, VecD(I_, 0.0));
      cv->hot_coupling.assign(K_, VecD(I_, 0.0));
      cv->stability.assign(K_, {0.0, 0.0});
      cv->latency.assign(K_, VecD(I_, 0.0));
    }
    const SystemConfig& cfg = s_.cfg;
    double value = 0.0;

    // Storage profit, integrality penalties and capacity terms.
    double cold_usage = 0.0;
    double hot_usage = 0.0;
    for (std::size_t i = 0; i < I_; ++i) {
      const double a = x[idx_a(i)];
      const double r = x[idx_r(i)];
      const double size = (*s_.files)[i].size_mb;
      cold_usage += size * (2.0 * a - r);
      hot_usage += size * r;
      if (s_.include_storage_profit) {
        value += (*s_.files)[i].storage_bid_cents * a;
        value -= size * (2.0 * a - r) * cfg.cold_cost_cents_per_mb;
        value -= size * r * cfg.hot_cost_cents_per_mb;
      }
      if (!s_.fix_first_stage && weight_ > 0.0) {
        value += weight_ * (penalty_g1(a, alpha_) + penalty_g1(r, alpha_));
      }
      if (grad && !s_.fix_first_stage) {
        double ga = 0.0;
        double gr = 0.0;
        if (s_.include_storage_profit) {
          ga = (*s_.files)[i].storage_bid_cents - 2.0 * size * cfg.cold_cost_cents_per_mb;
          gr = size * (cfg.cold_cost_cents_per_mb - cfg.hot_cost_cents_per_mb);
        }
        if (weight_ > 0.0) {
          ga += weight_ * penalty_g_grad(a, alpha_);
          gr += weight_ * penalty_g_grad(r, alpha_);
        }
        (*grad)[idx_a(i)] += ga;
        (*grad)[idx_r(i)] += gr;
      }
    }

    if (!s_.fix_first_stage) {
      const double c_cold = (cold_usage - cfg.cold_capacity_mb) / cfg.cold_capacity_mb;
      const double c_hot = (hot_usage - cfg.hot_capacity_mb) / cfg.hot_capacity_mb;
      if (cv) cv->cap = {c_cold, c_hot};
      const double m_cold = al_term(c_cold, lam_cap_[0], &value);
      const double m_hot = al_term(c_hot, lam_cap_[1], &value);
      for (std::size_t i = 0; i < I_; ++i) {
        const double size = (*s_.files)[i].size_mb;
        const double c_ra = x[idx_r(i)] - x[idx_a(i)];
        if (cv) cv->replica_coupling[i] = c_ra;
        const double m_ra = al_term(c_ra, lam_ra_[i], &value);
        if (grad) {
          (*grad)[idx_a(i)] += -m_cold * 2.0 * size / cfg.cold_capacity_mb + m_ra;
          (*grad)[idx_r(i)] += m_cold * size / cfg.cold_capacity_mb -
                               m_hot * size / cfg.hot_capacity_mb - m_ra;
        }
      }
    }

    for (std::size_t k = 0; k < K_; ++k) value += scenario_terms(x, k, grad, cv);

    if (grad) zero_fixed(*grad);
    return value;
  }

  // Recomputes constraints at x and performs one multiplier update. The
  // dual step is skipped while the iterate is still grossly infeasible;
  // updating from such points drives multipliers to absurd values that pin
  // later rounds at zero.
  void update_multipliers(const VecD& x) {
    ConstraintValues cv;
    eval(x, nullptr, &cv);
    const double violation = cv.max_violation();
    if (violation > kResidualCap) {
      prev_violation_ = violation;
      return;
    }
    auto bump = [this](double& lam, double c) {
      lam = std::clamp(lam + rho_ * std::min(c, kResidualCap), 0.0, 1e4);
    };
    bump(lam_cap_[0], cv.cap[0]);
    bump(lam_cap_[1], cv.cap[1]);
    for (std::size_t i = 0; i < I_; ++i) bump(lam_ra_[i], cv.replica_coupling[i]);
    for (std::size_t k = 0; k < K_; ++k) {
      for (std::size_t i = 0; i < I_; ++i) {
        bump(lam_ha_[k][i], cv.access_coupling[k][i]);
        bump(lam_pr_[k][i], cv.hot_coupling[k][i]);
        bump(lam_lat_[k][i], cv.latency[k][i]);
      }
      bump(lam_st_[k][0], cv.stability[k][0]);
      bump(lam_st_[k][1], cv.stability[k][1]);
    }
    if (violation > 0.5 * prev_violation_) rho_ = std::min(rho_ * rho_growth_, 1e8);
    prev_violation_ = violation;
  }

  void set_rho_growth(double g) { rho_growth_ = g; }
  double max_violation(const VecD& x) const {
    ConstraintValues cv;
    eval(x, nullptr, &cv);
    return cv.max_violation();
  }

  // Contracts the free coordinates toward zero (always feasible) until the
  // start point sits in the moderate-violation regime where the augmented
  // Lagrangian is informative.
  void shrink_to_moderate(VecD& x) const {
    for (int pass = 0; pass < 80 && max_violation(x) > kResidualCap; ++pass) {
      for (std::size_t i = 0; i < I_; ++i) {
        if (!s_.fix_first_stage) {
          x[idx_a(i)] *= 0.8;
          x[idx_r(i)] *= 0.8;
        }
      }
      for (std::size_t k = 0; k < K_; ++k) {
        for (std::size_t i = 0; i < I_; ++i) {
          if (!s_.fix_access) x[idx_h(k, i)] *= 0.8;
          x[idx_p(k, i)] *= 0.8;
        }
      }
      project(x);
    }
  }

 private:
  // Augmented-Lagrangian term for inequality c <= 0; adds -phi(c) to *value
  // and returns the active multiplier m = max(0, lam + rho c). Residuals
  // saturate at kResidualCap: beyond it the penalty grows linearly with the
  // saturated slope, keeping gradients bounded at grossly infeasible
  // iterates.
  static constexpr double kResidualCap = 10.0;

  double al_term(double c, double lam, double* value) const {
    const double c_eff = std::min(c, kResidualCap);
    const double m = std::max(0.0, lam + rho_ * c_eff);
    double phi = (m * m - lam * lam) / (2.0 * rho_);
    if (c > kResidualCap) phi += m * (c - kResidualCap);
    *value -= phi;
    return m;
  }

  double scenario_terms(const VecD& x, std::size_t k, VecD* grad,
                        ConstraintValues* cv) const {
    const SystemConfig& cfg = s_.cfg;
    const Scenario& sc = *s_.scenarios[k];
    const double w_k = s_.scenario_weight[k];
    double value = 0.0;

    // Tier aggregates with pi_{i,1} = H_i - pi2_i.
    double f[2] = {0.0, 0.0};
    double h2[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < I_; ++i) {
      const double lam = sc.arrival_rate_per_s[i];
      const double pi2 = x[idx_p(k, i)];
      const double pi1 = x[idx_h(k, i)] - pi2;
      f[0] += lam * pi1 * bits_[i];
      h2[0] += lam * pi1 * bits_[i] * bits_[i];
      f[1] += lam * pi2 * bits_[i];
      h2[1] += lam * pi2 * bits_[i] * bits_[i];
    }
    double eq[2], u[2], v[2], m_st[2];
    for (int tier = 0; tier < 2; ++tier) {
      const double mu = cfg.rate_mbps(tier);
      const BarrierDenom d = barrier_denom(f[tier], mu);
      eq[tier] = h2[tier] / (mu * d.value);
      u[tier] = 1.0 / (mu * d.value);
      v[tier] = -h2[tier] * d.deriv / (mu * d.value * d.value);
      const double c_st = (f[tier] - (1.0 - cfg.stability_margin) * mu) / mu;
      if (cv) cv->stability[k][tier] = c_st;
      m_st[tier] = al_term(c_st, lam_st_[k][tier], &value);
    }

    // Profit, integrality penalty and coupling constraints on H.
    for (std::size_t i = 0; i < I_; ++i) {
      const double h = x[idx_h(k, i)];
      value += w_k * sc.access_bid_cents[i] * h;
      if (!s_.fix_access && weight_ > 0.0) value += weight_ * penalty_g1(h, alpha_);
      if (grad) {
        double gh = w_k * sc.access_bid_cents[i];
        if (!s_.fix_access && weight_ > 0.0) gh += weight_ * penalty_g_grad(h, alpha_);
        (*grad)[idx_h(k, i)] += gh;
      }
      if (!s_.fix_first_stage) {
        const double c_ha = h - x[idx_a(i)];
        const double c_pr = x[idx_p(k, i)] - x[idx_r(i)];
        if (cv) {
          cv->access_coupling[k][i] = c_ha;
          cv->hot_coupling[k][i] = c_pr;
        }
        const double m_ha = al_term(c_ha, lam_ha_[k][i], &value);
        const double m_pr = al_term(c_pr, lam_pr_[k][i], &value);
        if (grad) {
          (*grad)[idx_h(k, i)] -= m_ha;
          (*grad)[idx_a(i)] += m_ha;
          (*grad)[idx_p(k, i)] -= m_pr;
          (*grad)[idx_r(i)] += m_pr;
        }
      }
    }

    // Latency constraints: T_i = sum_j pi_ij (b_i / mu_j + EQ_j) <= l_i.
    // With w_i = m_i / l_i the gradient needs only tier aggregates of
    // w_i pi_ij, so the whole block stays O(I).
    VecD w_lat(I_, 0.0);
    double p_sum[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < I_; ++i) {
      const double pi2 = x[idx_p(k, i)];
      const double pi1 = x[idx_h(k, i)] - pi2;
      const double latency = pi1 * (bits_[i] / cfg.cold_rate_mbps + eq[0]) +
                             pi2 * (bits_[i] / cfg.hot_rate_mbps + eq[1]);
      const double l = latency_req_s_[k][i];
      const double c_lat = (latency - l) / l;
      if (cv) cv->latency[k][i] = c_lat;
      const double m = al_term(c_lat, lam_lat_[k][i], &value);
      w_lat[i] = m / l;
      p_sum[0] += w_lat[i] * pi1;
      p_sum[1] += w_lat[i] * pi2;
    }
    if (grad) {
      for (std::size_t i = 0; i < I_; ++i) {
        const double lam = sc.arrival_rate_per_s[i];
        double g_pi[2];
        for (int tier = 0; tier < 2; ++tier) {
          const double mu = cfg.rate_mbps(tier);
          const double d_eq = u[tier] * lam * bits_[i] * bits_[i] + v[tier] * lam * bits_[i];
          g_pi[tier] = -(w_lat[i] * (bits_[i] / mu + eq[tier]) + p_sum[tier] * d_eq) -
                       m_st[tier] * lam * bits_[i] / mu;
        }
        (*grad)[idx_h(k, i)] += g_pi[0];
        (*grad)[idx_p(k, i)] += g_pi[1] - g_pi[0];
      }
    }
    return value;
  }

  void zero_fixed(VecD& grad) const {
    if (s_.fix_first_stage) {
      for (std::size_t i = 0; i < I_; ++i) {
        grad[idx_a(i)] = 0.0;
        grad[idx_r(i)] = 0.0;
      }
    }
    if (s_.fix_access) {
      for (std::size_t k = 0; k < K_; ++k)
        for (std::size_t i = 0; i < I_; ++i) grad[idx_h(k, i)] = 0.0;
    }
  }

  Setup s_;
  std::size_t I_ = 0, K_ = 0, n_ = 0;
  VecD bits_;
  std::vector<VecD> latency_req_s_;

  double alpha_ = 0.0;
  double weight_ = 0.0;
  double rho_ = 100.0;
  double rho_growth_ = 3.0;
  double prev_violation_ = std::numeric_limits<double>::infinity();
  std::array<double, 2> lam_cap_{};
  VecD lam_ra_;
  std::vector<VecD> lam_ha_, lam_pr_, lam_lat_;
  std::vector<std::array<double, 2>> lam_st_;
};

struct InnerResult {
  long iterations = 0;
  double final_step_norm = 0.0;
  bool hit_budget = false;
};

// Projected gradient ascent with per-coordinate RMS scaling and
// backtracking on the global step length.
InnerResult optimize_inner(RelaxedEngine& engine, VecD& x, const SolverOptions& opts) {
  const std::size_t n = engine.dim();
  VecD grad(n), scale(n, 0.0), trial(n);
  double step = opts.step_init;
  InnerResult result;

  double value = engine.eval(x, &grad, nullptr);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    ++result.iterations;
    for (std::size_t j = 0; j < n; ++j)
      scale[j] = 0.9 * scale[j] + 0.1 * grad[j] * grad[j];

    bool accepted = false;
    double step_norm = 0.0;
    for (int bt = 0; bt < 12 && !accepted; ++bt) {
      trial = x;
      for (std::size_t j = 0; j < n; ++j)
        trial[j] += step * grad[j] / std::sqrt(scale[j] + 1e-12);
      engine.project(trial);
      const double trial_value = engine.eval(trial, nullptr, nullptr);
      if (trial_value > value) {
        step_norm = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          step_norm = std::max(step_norm, std::abs(trial[j] - x[j]));
        x.swap(trial);
        value = trial_value;
        step = std::min(step * opts.step_grow, 0.25);
        accepted = true;
      } else {
        step *= opts.step_shrink;
        if (step < opts.step_min) break;
      }
    }
    result.final_step_norm = step_norm;
    if (!accepted || step_norm < opts.tol) return result;
    value = engine.eval(x, &grad, nullptr);
  }
  result.hit_budget = true;
  return result;
}

// Full continuation + augmented-Lagrangian loop from one start point.
InnerResult optimize_multistage(RelaxedEngine& engine, VecD& x, const SolverOptions& opts,
                                const std::vector<ContinuationStage>& schedule) {
  engine.reset_multipliers(opts.rho_init);
  engine.set_rho_growth(opts.rho_growth);
  InnerResult total;
  for (const auto& stage : schedule) {
    engine.set_penalty(stage.alpha, stage.weight);
    for (int round = 0; round < opts.al_rounds; ++round) {
      const InnerResult r = optimize_inner(engine, x, opts);
      total.iterations += r.iterations;
      total.final_step_norm = r.final_step_norm;
      total.hit_budget = total.hit_budget || r.hit_budget;
      engine.update_multipliers(x);
      if (opts.verbose) {
        double sum = std::accumulate(x.begin(), x.end(), 0.0);
        std::fprintf(stderr,
                     "  alpha=%g round=%d iters=%ld value=%.4f maxviol=%.3g sumx=%.2f\n",
                     stage.alpha, round, r.iterations,
                     engine.eval(x, nullptr, nullptr), engine.max_violation(x), sum);
      }
    }
  }
  return total;
}

SystemConfig restricted_config(const SystemConfig& cfg) {
  SystemConfig r = cfg;
  const double shrink = 1.0 - cfg.restriction_eps;
  r.cold_capacity_mb *= shrink;
  r.hot_capacity_mb *= shrink;
  r.cold_rate_mbps *= shrink;
  r.hot_rate_mbps *= shrink;
  return r;
}

// Density-guided warm start: accept everything at stage one (replicating
// hot when it is the cheaper or requested placement), then fill each
// scenario's tiers with access bids in decreasing value-per-load order
// until `load_cap` of the restricted service rates is committed.
VecD warm_start(const RelaxedEngine& engine, const RelaxedEngine::Setup& setup,
                double load_cap, bool replicate_all, std::uint64_t jitter_seed) {
  const std::vector<FileSpec>& files = *setup.files;
  const SystemConfig& cfg = setup.cfg;
  const std::size_t I = files.size();
  VecD x(engine.dim(), 0.0);

  std::uint64_t state = jitter_seed;
  auto jitter = [&] {
    if (jitter_seed == 0) return 1.0;
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    return 0.5 + u; // multiplicative noise in [0.5, 1.5)
  };

  std::vector<double> accept(I, 1.0), replica(I, 0.0);
  if (setup.fix_first_stage) {
    accept = setup.fixed_accept;
    replica = setup.fixed_replica;
  } else {
    const bool hot_cheaper = cfg.hot_cost_cents_per_mb < cfg.cold_cost_cents_per_mb;
    for (std::size_t i = 0; i < I; ++i)
      replica[i] = (replicate_all || hot_cheaper) ? 1.0 : 0.0;
    for (std::size_t i = 0; i < I; ++i) {
      x[engine.idx_a(i)] = accept[i];
      x[engine.idx_r(i)] = replica[i];
    }
  }

  for (std::size_t k = 0; k < setup.scenarios.size(); ++k) {
    const Scenario& sc = *setup.scenarios[k];
    std::vector<std::size_t> order;
    std::vector<double> key(I, 0.0);
    for (std::size_t i = 0; i < I; ++i) {
      if (accept[i] <= 0.0) continue;
      const double load = sc.arrival_rate_per_s[i] * mb_to_mbit(files[i].size_mb);
      key[i] = sc.access_bid_cents[i] / std::max(load, 1e-9) * jitter();
      order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (key[a] != key[b]) return key[a] > key[b];
      return files[a].id < files[b].id;
    });
    double cold_budget = load_cap * cfg.cold_rate_mbps;
    double hot_budget = load_cap * cfg.hot_rate_mbps;
    for (std::size_t i : order) {
      const double load = sc.arrival_rate_per_s[i] * mb_to_mbit(files[i].size_mb);
      if (replica[i] > 0.0 && load <= hot_budget) {
        hot_budget -= load;
        x[engine.idx_h(k, i)] = 1.0;
        x[engine.idx_p(k, i)] = 1.0;
      } else if (load <= cold_budget) {
        cold_budget -= load;
        x[engine.idx_h(k, i)] = 1.0;
        x[engine.idx_p(k, i)] = 0.0;
      }
    }
  }
  return x;
}

VecD initial_point(const RelaxedEngine& engine, const RelaxedEngine::Setup& setup,
                   int start, std::uint64_t seed) {
  const std::size_t n = engine.dim();
  switch (start) {
    case 0: return warm_start(engine, setup, 0.9, false, 0);
    case 1: return warm_start(engine, setup, 0.7, false, 0);
    case 2: return warm_start(engine, setup, 0.9, true, 0);
    case 3: return VecD(n, 0.0);
    case 4: return VecD(n, 0.5);
    case 5: return VecD(n, 1.0);
    default: break;
  }
  if (start % 2 == 0) {
    const std::uint64_t s = seed ^ (0xa0761d6478bd642fULL * (start + 1));
    std::uint64_t state = s;
    const double cap = 0.5 + 0.45 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53);
    return warm_start(engine, setup, cap, (splitmix64(state) & 1) != 0, state);
  }
  VecD x(n);
  std::uint64_t state = seed ^ (0x8bb84b93962eacc9ULL * (start + 1));
  for (std::size_t j = 0; j < n; ++j)
    x[j] = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
  return x;
}

// Nearest-integer rounding with ties at exactly 0.5 going to 0.
bool round_binary(double v) { return v > 0.5; }

// Continuous re-solve of pi2 for fixed integral (d1, h): pure feasibility
// problem since the profit does not depend on pi.
StageTwoDecision resolve_pi(const StageOneDecision& d1,
                            const std::vector<std::uint8_t>& h, const Scenario& sc,
                            const std::vector<FileSpec>& files, const SystemConfig& rcfg,
                            const VecD& pi2_init, const SolverOptions& opts) {
  RelaxedEngine::Setup setup;
  setup.files = &files;
  setup.scenarios = {&sc};
  setup.scenario_weight = {0.0};
  setup.cfg = rcfg;
  setup.include_storage_profit = false;
  setup.fix_first_stage = true;
  setup.fix_access = true;
  setup.fixed_accept.assign(files.size(), 0.0);
  setup.fixed_replica.assign(files.size(), 0.0);
  setup.fixed_access.assign(1, VecD(files.size(), 0.0));
  for (std::size_t i = 0; i < files.size(); ++i) {
    setup.fixed_accept[i] = d1.accept[i];
    setup.fixed_replica[i] = d1.hot_replica[i];
    setup.fixed_access[0][i] = h[i];
  }
  RelaxedEngine engine(std::move(setup));
  VecD x(engine.dim(), 0.0);
  for (std::size_t i = 0; i < files.size(); ++i) {
    x[engine.idx_h(0, i)] = h[i];
    x[engine.idx_p(0, i)] = pi2_init.empty() ? 0.5 * h[i] : pi2_init[i];
  }
  engine.project(x);
  engine.shrink_to_moderate(x);

  SolverOptions mini = opts;
  mini.max_iters = std::min(opts.max_iters, 200);
  mini.al_rounds = std::max(3, opts.al_rounds / 2);
  engine.reset_multipliers(opts.rho_init);
  engine.set_penalty(0.0, 0.0);
  for (int round = 0; round < mini.al_rounds; ++round) {
    optimize_inner(engine, x, mini);
    engine.update_multipliers(x);
  }

  StageTwoDecision d2 = make_stage_two(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    d2.accept_access[i] = h[i];
    const double pi2 = x[engine.idx_p(0, i)];
    d2.sched_prob[kHot][i] = pi2;
    d2.sched_prob[kCold][i] = h[i] - pi2;
  }
  return d2;
}

// Rounds H, re-solves pi continuously and drops accepted bids (lowest bid
// first) until the decision satisfies the original stage-two constraints.
// Greedy completion after rounding: re-admits rejected access bids that
// still fit when served entirely from one tier. Each addition earns a
// nonnegative bid and is kept only if the full constraint check passes, so
// the pass never degrades the decision.
void fill_access(StageTwoDecision& d2, const StageOneDecision& d1, const Scenario& sc,
                 const std::vector<FileSpec>& files, const SystemConfig& cfg) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < files.size(); ++i)
    if (d1.accept[i] && !d2.accept_access[i] && sc.access_bid_cents[i] > 0.0)
      order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sc.access_bid_cents[a] > sc.access_bid_cents[b];
  });
  for (std::size_t i : order) {
    for (int tier : {kHot, kCold}) {
      if (tier == kHot && !d1.hot_replica[i]) continue;
      StageTwoDecision cand = d2;
      cand.accept_access[i] = 1;
      cand.sched_prob[tier][i] = 1.0;
      cand.sched_prob[1 - tier][i] = 0.0;
      if (check_stage_two_feasible(cand, d1, sc, files, cfg).feasible) {
        d2 = std::move(cand);
        break;
      }
    }
  }
}

StageTwoDecision finalize_stage_two(const StageOneDecision& d1, const Scenario& sc,
                                    const std::vector<FileSpec>& files,
                                    const SystemConfig& cfg, const SystemConfig& rcfg,
                                    std::vector<std::uint8_t> h, VecD pi2_init,
                                    const SolverOptions& opts) {
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!d1.accept[i]) h[i] = 0;
    if (!pi2_init.empty()) {
      if (!h[i]) pi2_init[i] = 0.0;
      pi2_init[i] = std::clamp(pi2_init[i], 0.0, static_cast<double>(d1.hot_replica[i]));
    }
  }
  while (true) {
    StageTwoDecision d2 = resolve_pi(d1, h, sc, files, rcfg, pi2_init, opts);
    const FeasibilityReport report = check_stage_two_feasible(d2, d1, sc, files, cfg);
    if (report.feasible) {
      fill_access(d2, d1, sc, files, cfg);
      return d2;
    }

    // Drop the accepted bid with the smallest access bid; ties by id.
    std::size_t victim = files.size();
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (!h[i]) continue;
      if (victim == files.size() || sc.access_bid_cents[i] < sc.access_bid_cents[victim])
        victim = i;
    }
    if (victim == files.size()) return make_stage_two(files.size()); // all-zero is feasible
    h[victim] = 0;
    if (!pi2_init.empty()) pi2_init[victim] = 0.0;
  }
}


// Drops storage acceptances until the rounded first stage fits the original
// capacities. Rarely triggered: the relaxed solve already ran on
// (1 - eps)-restricted capacities.
void repair_capacity(StageOneDecision& d1, const std::vector<FileSpec>& files,
                     const std::vector<Scenario>& scenarios, const SystemConfig& cfg,
                     double slot_weight) {
  auto hot_usage = [&] {
    double u = 0.0;
    for (std::size_t i = 0; i < files.size(); ++i)
      u += files[i].size_mb * d1.hot_replica[i];
    return u;
  };
  auto cold_usage = [&] {
    double u = 0.0;
    for (std::size_t i = 0; i < files.size(); ++i)
      u += files[i].size_mb * (2.0 * d1.accept[i] - d1.hot_replica[i]);
    return u;
  };
  auto access_value = [&](std::size_t i) {
    double v = 0.0;
    for (const auto& sc : scenarios)
      v += slot_weight * sc.probability * sc.access_bid_cents[i];
    return v;
  };

  while (hot_usage() > cfg.hot_capacity_mb) {
    std::size_t victim = files.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (!d1.hot_replica[i]) continue;
      const double density = access_value(i) / files[i].size_mb;
      if (density < best) {
        best = density;
        victim = i;
      }
    }
    if (victim == files.size()) break;
    d1.hot_replica[victim] = 0; // replica falls back to cold
  }
  while (cold_usage() > cfg.cold_capacity_mb) {
    std::size_t victim = files.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (!d1.accept[i]) continue;
      const double margin =
          files[i].storage_bid_cents + access_value(i) -
          files[i].size_mb * (2.0 - d1.hot_replica[i]) * cfg.cold_cost_cents_per_mb -
          files[i].size_mb * d1.hot_replica[i] * cfg.hot_cost_cents_per_mb;
      const double density = margin / (files[i].size_mb * (2.0 - d1.hot_replica[i]));
      if (density < best) {
        best = density;
        victim = i;
      }
    }
    if (victim == files.size()) break;
    d1.accept[victim] = 0;
    d1.hot_replica[victim] = 0;
  }
}

// Greedy completion after rounding: accepts left-out storage bids whose
// storage profit alone is positive and whose footprint fits the remaining
// capacity. Access acceptance stays optional, so every addition is a
// guaranteed improvement; the relaxed solve tends to leave such files at
// fractional values that round down when capacity binds.
void fill_capacity(StageOneDecision& d1, const std::vector<FileSpec>& files,
                   const SystemConfig& cfg) {
  double cold_slack = cfg.cold_capacity_mb;
  double hot_slack = cfg.hot_capacity_mb;
  for (std::size_t i = 0; i < files.size(); ++i) {
    cold_slack -= files[i].size_mb * (2.0 * d1.accept[i] - d1.hot_replica[i]);
    hot_slack -= files[i].size_mb * d1.hot_replica[i];
  }
  bool added = true;
  while (added) {
    added = false;
    std::size_t pick = files.size();
    bool pick_replica = false;
    double best_density = 0.0;
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (d1.accept[i]) continue;
      const double s = files[i].size_mb;
      const double cold_only = files[i].storage_bid_cents - 2.0 * s * cfg.cold_cost_cents_per_mb;
      const double replicated = files[i].storage_bid_cents -
                                s * (cfg.cold_cost_cents_per_mb + cfg.hot_cost_cents_per_mb);
      if (cold_only > 0.0 && 2.0 * s <= cold_slack && cold_only / s > best_density) {
        best_density = cold_only / s;
        pick = i;
        pick_replica = false;
      }
      if (replicated > 0.0 && s <= cold_slack && s <= hot_slack &&
          replicated / s > best_density) {
        best_density = replicated / s;
        pick = i;
        pick_replica = true;
      }
    }
    if (pick < files.size()) {
      d1.accept[pick] = 1;
      d1.hot_replica[pick] = pick_replica;
      cold_slack -= files[pick].size_mb * (pick_replica ? 1.0 : 2.0);
      if (pick_replica) hot_slack -= files[pick].size_mb;
      added = true;
    }
  }
}

struct Candidate {
  StageOneDecision d1;
  std::vector<StageTwoDecision> d2;
  double score = -std::numeric_limits<double>::infinity();
  bool valid = false;
};

// Polish pass over a rounded candidate: when the hot tier is the pricier
// one, a surviving replica must pay for itself through access revenue.
// Tries dropping each replica, rerouting that file's traffic to the cold
// tier or, failing that, releasing its access bids; keeps the flip when the
// recomputed expected profit improves.
void polish_replicas(Candidate& cand, const std::vector<FileSpec>& files,
                     const std::vector<Scenario>& scenarios, const SystemConfig& cfg) {
  if (cfg.hot_cost_cents_per_mb <= cfg.cold_cost_cents_per_mb) return;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!cand.d1.hot_replica[i]) continue;
    StageOneDecision d1 = cand.d1;
    d1.hot_replica[i] = 0;
    if (!check_stage_one_feasible(d1, files, cfg).feasible) continue;
    std::vector<StageTwoDecision> d2 = cand.d2;
    bool ok = true;
    for (std::size_t k = 0; k < scenarios.size() && ok; ++k) {
      d2[k].sched_prob[kCold][i] += d2[k].sched_prob[kHot][i];
      d2[k].sched_prob[kHot][i] = 0.0;
      if (check_stage_two_feasible(d2[k], d1, scenarios[k], files, cfg).feasible)
        continue;
      d2[k].accept_access[i] = 0;
      d2[k].sched_prob[kCold][i] = 0.0;
      ok = check_stage_two_feasible(d2[k], d1, scenarios[k], files, cfg).feasible;
    }
    if (!ok) continue;
    const double score = scenarios.empty()
                             ? profit_expected(d1, {}, {}, files, cfg).storage_profit_cents()
                             : profit_expected(d1, d2, scenarios, files, cfg).total_cents();
    if (score > cand.score) {
      cand.d1 = std::move(d1);
      cand.d2 = std::move(d2);
      cand.score = score;
    }
  }
}

Candidate round_stage_one(const VecD& x, const RelaxedEngine& engine,
                          const std::vector<FileSpec>& files,
                          const std::vector<Scenario>& scenarios,
                          const SystemConfig& cfg, const SystemConfig& rcfg,
                          const SolverOptions& opts, bool with_second_stage) {
  Candidate cand;
  cand.d1 = make_stage_one(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    cand.d1.accept[i] = round_binary(x[engine.idx_a(i)]);
    cand.d1.hot_replica[i] = cand.d1.accept[i] && round_binary(x[engine.idx_r(i)]);
  }
  repair_capacity(cand.d1, files, scenarios, cfg,
                  with_second_stage ? static_cast<double>(cfg.num_slots) : 0.0);
  fill_capacity(cand.d1, files, cfg);
  if (!check_stage_one_feasible(cand.d1, files, cfg).feasible) return cand;

  if (with_second_stage) {
    cand.d2.reserve(scenarios.size());
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
      std::vector<std::uint8_t> h(files.size(), 0);
      VecD pi2(files.size(), 0.0);
      for (std::size_t i = 0; i < files.size(); ++i) {
        h[i] = cand.d1.accept[i] && round_binary(x[engine.idx_h(k, i)]);
        pi2[i] = x[engine.idx_p(k, i)];
      }
      StageTwoDecision d2 = finalize_stage_two(cand.d1, scenarios[k], files, cfg, rcfg,
                                               std::move(h), std::move(pi2), opts);
      if (!check_stage_two_feasible(d2, cand.d1, scenarios[k], files, cfg).feasible)
        return cand;
      cand.d2.push_back(std::move(d2));
    }
    cand.score = profit_expected(cand.d1, cand.d2, scenarios, files, cfg).total_cents();
  } else {
    ProfitBreakdown p = profit_expected(cand.d1, {}, {}, files, cfg);
    cand.score = p.storage_profit_cents();
  }
  polish_replicas(cand, files, scenarios, cfg);
  cand.valid = true;
  return cand;
}

StageOnePlan solve_first_stage_impl(const std::vector<FileSpec>& files,
                                    const std::vector<Scenario>& scenarios,
                                    const SystemConfig& cfg, const SolverOptions& opts,
                                    bool with_second_stage) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  opts.validate();
  if (files.empty()) throw StructuralError("file list must be non-empty");
  for (const auto& f : files) f.validate();
  if (with_second_stage) validate_scenario_set(scenarios, files.size());

  const SystemConfig rcfg = restricted_config(cfg);
  const std::vector<ContinuationStage> schedule =
      opts.alpha_schedule.empty() ? SolverOptions::default_schedule(cfg) : opts.alpha_schedule;

  RelaxedEngine::Setup setup;
  setup.files = &files;
  if (with_second_stage) {
    for (const auto& sc : scenarios) {
      setup.scenarios.push_back(&sc);
      setup.scenario_weight.push_back(cfg.num_slots * sc.probability);
    }
  }
  setup.cfg = rcfg;

  StageOnePlan plan;
  plan.report.starts = opts.multistarts;
  Candidate best;
  double best_relaxed = 0.0;
  double best_residual = 0.0;

  for (int start = 0; start < opts.multistarts; ++start) {
    RelaxedEngine engine(setup);
    VecD x = initial_point(engine, setup, start, opts.seed);
    engine.project(x);
    engine.shrink_to_moderate(x);
    const InnerResult r = optimize_multistage(engine, x, opts, schedule);
    plan.report.iterations += r.iterations;
    plan.report.budget_exhausted = plan.report.budget_exhausted || r.hit_budget;

    Candidate cand = round_stage_one(x, engine, files, scenarios, cfg, rcfg, opts,
                                     with_second_stage);
    if (cand.valid && cand.score > best.score) {
      best = std::move(cand);
      plan.report.best_start = start;
      best_residual = r.final_step_norm;
      // Relaxed objective reported at the configured (paper) alpha and C.
      VecD accept(files.size()), replica(files.size());
      std::vector<VecD> access(scenarios.size(), VecD(files.size()));
      for (std::size_t i = 0; i < files.size(); ++i) {
        accept[i] = x[engine.idx_a(i)];
        replica[i] = x[engine.idx_r(i)];
      }
      for (std::size_t k = 0; k < scenarios.size(); ++k)
        for (std::size_t i = 0; i < files.size(); ++i)
          access[k][i] = x[engine.idx_h(k, i)];
      PenaltyParams paper{cfg.penalty_alpha, cfg.penalty_weight};
      best_relaxed = with_second_stage
                         ? relaxed_objective(accept, replica, access, scenarios, files,
                                             cfg, paper)
                         : relaxed_objective(accept, replica, {}, {}, files, cfg, paper);
    }
  }

  if (!best.valid)
    throw InfeasibleInstanceError("no feasible rounded decision found from any start");

  plan.d1 = std::move(best.d1);
  plan.d2_per_scenario = std::move(best.d2);
  plan.report.objective_cents = best.score;
  plan.report.relaxed_objective_cents = best_relaxed;
  plan.report.kkt_residual = best_residual;

  const FeasibilityReport rep1 = check_stage_one_feasible(plan.d1, files, cfg);
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& s : rep1.slacks) min_slack = std::min(min_slack, s.slack);
  for (std::size_t k = 0; k < plan.d2_per_scenario.size(); ++k) {
    const FeasibilityReport rep2 =
        check_stage_two_feasible(plan.d2_per_scenario[k], plan.d1, scenarios[k], files, cfg);
    for (const auto& s : rep2.slacks) min_slack = std::min(min_slack, s.slack);
  }
  plan.report.min_slack = min_slack;
  plan.report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return plan;
}

}  // namespace

StageOnePlan solve_stage_one(const std::vector<FileSpec>& files,
                             const std::vector<Scenario>& scenarios,
                             const SystemConfig& cfg, const SolverOptions& opts) {
  if (scenarios.empty()) throw StructuralError("at least one scenario required");
  return solve_first_stage_impl(files, scenarios, cfg, opts, true);
}

StageOnePlan solve_storage_stage_one(const std::vector<FileSpec>& files,
                                     const SystemConfig& cfg, const SolverOptions& opts) {
  return solve_first_stage_impl(files, {}, cfg, opts, false);
}

std::pair<StageTwoDecision, SolveReport> solve_stage_two(
    const StageOneDecision& d1, const Scenario& sc,
    const std::vector<FileSpec>& files, const SystemConfig& cfg,
    const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  opts.validate();
  if (files.empty()) throw StructuralError("file list must be non-empty");
  if (!check_stage_one_feasible(d1, files, cfg).feasible)
    throw StructuralError("stage-one decision must be feasible");

  const SystemConfig rcfg = restricted_config(cfg);
  const std::vector<ContinuationStage> schedule =
      opts.alpha_schedule.empty() ? SolverOptions::default_schedule(cfg) : opts.alpha_schedule;

  RelaxedEngine::Setup setup;
  setup.files = &files;
  setup.scenarios = {&sc};
  setup.scenario_weight = {1.0};
  setup.cfg = rcfg;
  setup.include_storage_profit = false;
  setup.fix_first_stage = true;
  setup.fixed_accept.assign(files.size(), 0.0);
  setup.fixed_replica.assign(files.size(), 0.0);
  for (std::size_t i = 0; i < files.size(); ++i) {
    setup.fixed_accept[i] = d1.accept[i];
    setup.fixed_replica[i] = d1.hot_replica[i];
  }

  SolveReport report;
  report.starts = opts.multistarts;
  StageTwoDecision best = make_stage_two(files.size());
  double best_score = -std::numeric_limits<double>::infinity();

  for (int start = 0; start < opts.multistarts; ++start) {
    RelaxedEngine engine(setup);
    VecD x = initial_point(engine, setup, start, opts.seed + 0x9e37ULL);
    engine.project(x);
    engine.shrink_to_moderate(x);
    const InnerResult r = optimize_multistage(engine, x, opts, schedule);
    report.iterations += r.iterations;
    report.budget_exhausted = report.budget_exhausted || r.hit_budget;

    std::vector<std::uint8_t> h(files.size(), 0);
    VecD pi2(files.size(), 0.0);
    for (std::size_t i = 0; i < files.size(); ++i) {
      h[i] = d1.accept[i] && round_binary(x[engine.idx_h(0, i)]);
      pi2[i] = x[engine.idx_p(0, i)];
    }
    StageTwoDecision d2 =
        finalize_stage_two(d1, sc, files, cfg, rcfg, std::move(h), std::move(pi2), opts);
    double score = 0.0;
    for (std::size_t i = 0; i < files.size(); ++i)
      score += sc.access_bid_cents[i] * d2.accept_access[i];
    if (score > best_score) {
      best_score = score;
      best = std::move(d2);
      report.best_start = start;
      report.kkt_residual = r.final_step_norm;
    }
  }

  report.objective_cents = best_score;
  report.relaxed_objective_cents = best_score;
  const FeasibilityReport rep = check_stage_two_feasible(best, d1, sc, files, cfg);
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.slacks) min_slack = std::min(min_slack, s.slack);
  report.min_slack = min_slack;
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(best), report};
}

namespace {

// Oracle helpers ------------------------------------------------------------

struct OracleScenarioCache {
  // (h_mask, free_mask) -> feasible pi2 assignment if one exists.
  std::map<std::pair<unsigned, unsigned>, std::optional<VecD>> memo;
};

bool oracle_point_feasible(const std::vector<FileSpec>& files, const Scenario& sc,
                           const SystemConfig& cfg, unsigned h_mask, const VecD& pi2) {
  StageTwoDecision d2 = make_stage_two(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!(h_mask >> i & 1u)) continue;
    d2.accept_access[i] = 1;
    d2.sched_prob[kHot][i] = pi2[i];
    d2.sched_prob[kCold][i] = 1.0 - pi2[i];
  }
  for (int tier = 0; tier < kNumTiers; ++tier) {
    const TierLoad load = tier_load(d2, sc, files, tier);
    if (load.f_mbps > (1.0 - cfg.stability_margin) * cfg.rate_mbps(tier)) return false;
  }
  const std::vector<double> slacks = latency_slacks(d2, sc, files, cfg);
  for (std::size_t i = 0; i < files.size(); ++i)
    if ((h_mask >> i & 1u) && slacks[i] < 0.0) return false;
  return true;
}

std::optional<VecD> oracle_grid_search(const std::vector<FileSpec>& files,
                                       const Scenario& sc, const SystemConfig& cfg,
                                       unsigned h_mask, unsigned free_mask, int grid) {
  std::vector<std::size_t> free_files;
  for (std::size_t i = 0; i < files.size(); ++i)
    if (free_mask >> i & 1u) free_files.push_back(i);

  VecD pi2(files.size(), 0.0);
  // Depth-first over grid choices for files that may use the hot tier.
  std::vector<int> choice(free_files.size(), 0);
  std::size_t depth = 0;
  while (true) {
    if (depth == free_files.size()) {
      if (oracle_point_feasible(files, sc, cfg, h_mask, pi2)) return pi2;
      if (free_files.empty()) return std::nullopt;
      --depth;
      ++choice[depth];
    } else if (choice[depth] > grid) {
      if (depth == 0) return std::nullopt;
      choice[depth] = 0;
      --depth;
      ++choice[depth];
    } else {
      pi2[free_files[depth]] = static_cast<double>(choice[depth]) / grid;
      ++depth;
      if (depth < free_files.size()) choice[depth] = 0;
    }
  }
}

}  // namespace

OracleResult brute_force_oracle(const std::vector<FileSpec>& files,
                                const std::vector<Scenario>& scenarios,
                                const SystemConfig& cfg, int grid_resolution) {
  cfg.validate();
  const std::size_t I = files.size();
  if (I > 4 || scenarios.size() > 3 || grid_resolution > 64 || grid_resolution < 1)
    throw InstanceTooLargeError("oracle limited to I <= 4, K <= 3, grid <= 64");
  OracleResult result;
  result.d1 = make_stage_one(I);
  result.d2_per_scenario.assign(scenarios.size(), make_stage_two(I));
  result.profit_cents = 0.0;
  if (I == 0) return result;
  validate_scenario_set(scenarios, I);

  std::vector<OracleScenarioCache> caches(scenarios.size());
  auto best_access = [&](std::size_t k, unsigned a_mask, unsigned r_mask)
      -> std::pair<double, std::pair<unsigned, VecD>> {
    const Scenario& sc = scenarios[k];
    double best = 0.0;
    std::pair<unsigned, VecD> best_sched{0u, VecD(I, 0.0)};
    unsigned h = a_mask;
    while (true) {
      double value = 0.0;
      for (std::size_t i = 0; i < I; ++i)
        if (h >> i & 1u) value += sc.access_bid_cents[i];
      if (value > best) {
        const unsigned free_mask = h & r_mask;
        auto key = std::make_pair(h, free_mask);
        auto it = caches[k].memo.find(key);
        if (it == caches[k].memo.end()) {
          it = caches[k]
                   .memo
                   .emplace(key, oracle_grid_search(files, sc, cfg, h, free_mask,
                                                    grid_resolution))
                   .first;
        }
        if (it->second) {
          best = value;
          best_sched = {h, *it->second};
        }
      }
      if (h == 0) break;
      h = (h - 1) & a_mask;
    }
    return {best, best_sched};
  };

  double best_total = 0.0; // all-zero decision is always feasible with profit 0
  bool found = false;
  for (unsigned a_mask = 0; a_mask < (1u << I); ++a_mask) {
    for (unsigned r_mask = a_mask;; r_mask = (r_mask - 1) & a_mask) {
      double cold = 0.0, hot = 0.0, storage = 0.0;
      for (std::size_t i = 0; i < I; ++i) {
        const int a = a_mask >> i & 1u;
        const int r = r_mask >> i & 1u;
        cold += files[i].size_mb * (2 * a - r);
        hot += files[i].size_mb * r;
        storage += files[i].storage_bid_cents * a -
                   files[i].size_mb * (2 * a - r) * cfg.cold_cost_cents_per_mb -
                   files[i].size_mb * r * cfg.hot_cost_cents_per_mb;
      }
      if (cold <= cfg.cold_capacity_mb && hot <= cfg.hot_capacity_mb) {
        double total = storage;
        std::vector<std::pair<unsigned, VecD>> schedules(scenarios.size());
        for (std::size_t k = 0; k < scenarios.size(); ++k) {
          auto [value, sched] = best_access(k, a_mask, r_mask);
          total += cfg.num_slots * scenarios[k].probability * value;
          schedules[k] = std::move(sched);
        }
        if (!found || total > best_total) {
          found = true;
          best_total = total;
          for (std::size_t i = 0; i < I; ++i) {
            result.d1.accept[i] = a_mask >> i & 1u;
            result.d1.hot_replica[i] = r_mask >> i & 1u;
          }
          for (std::size_t k = 0; k < scenarios.size(); ++k) {
            StageTwoDecision& d2 = result.d2_per_scenario[k];
            d2 = make_stage_two(I);
            const auto& [h_mask, pi2] = schedules[k];
            for (std::size_t i = 0; i < I; ++i) {
              if (!(h_mask >> i & 1u)) continue;
              d2.accept_access[i] = 1;
              d2.sched_prob[kHot][i] = pi2[i];
              d2.sched_prob[kCold][i] = 1.0 - pi2[i];
            }
          }
        }
      }
      if (r_mask == 0) break;
    }
  }
  result.profit_cents = best_total;
  return result;
}

}  // namespace tierbid
