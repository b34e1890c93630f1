#pragma once

// Symmetry-breaking verdicts.  A verdict compares a test-function upper bound on
// the full infimum S with the computed radial infimum S_rad; breaking is
// certified only when S_rad exceeds the bound by more than a fixed multiple of
// the combined numerical tolerance.  Closed-form criteria (the Felli-Schneider
// condition, the lambda_alpha threshold) are reported alongside.

#include "rellich/quadrature_nd.hpp"
#include "rellich/reduced_solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace rellich {

enum class Verdict {
  radial_breaks_certified,
  breaks_for_large_lambda,  // closed-form criterion without a numeric lambda threshold
  no_breaking_evidence,
  inconclusive,
};

enum class Criterion { FS_condition, lambda_alpha_threshold, upper_bound_vs_radial, critical_nonattainment };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::radial_breaks_certified: return "radial_breaks_certified";
    case Verdict::breaks_for_large_lambda: return "breaks_for_large_lambda";
    case Verdict::no_breaking_evidence: return "no_breaking_evidence";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

inline const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::FS_condition: return "FS_condition";
    case Criterion::lambda_alpha_threshold: return "lambda_alpha_threshold";
    case Criterion::upper_bound_vs_radial: return "upper_bound_vs_radial";
    case Criterion::critical_nonattainment: return "critical_nonattainment";
  }
  return "?";
}

struct PhaseVerdict {
  ProblemParams params;
  Verdict verdict = Verdict::inconclusive;
  std::vector<Criterion> criteria_fired;
  std::optional<double> s_upper_bound;
  std::optional<double> s_radial;
  std::optional<double> margin;     // s_radial - s_upper_bound
  std::optional<double> tolerance;  // combined numeric tolerance of the two values
  std::optional<double> bump_delta; // bump width that produced s_upper_bound
  std::string error;                // non-empty when the point failed

  bool fired(Criterion c) const {
    return std::find(criteria_fired.begin(), criteria_fired.end(), c) != criteria_fired.end();
  }
};

struct VerdictBudget {
  SolverConfig solver{};
  RadialQuadSpec quadrature{};
  BumpSpec bump{};            // delta is overridden by the scan below
  double first_delta = 0.4;   // bump widths first_delta / 2^k, k = 0, 1, ...
  int min_delta_steps = 3;    // always tries 0.4, 0.2, 0.1
  int max_delta_steps = 12;   // keeps halving while the bound improves
  double margin_factor = 3.0;
};

// ---------------------------------------------------------------------------

struct CriticalBound {
  double value = 0;            // quotient of |x|^{-alpha/2} U, an upper bound for S_{alpha,2**}(lambda)
  double s_double_star = 0;    // the unweighted constant
  double lambda_alpha = 0;
  bool strictly_below = false; // lambda < lambda_alpha, so S_{alpha,2**}(lambda) < S**
  double relative_error = 0;
};

inline CriticalBound critical_upper_bound(const ProblemParams& p, const RadialQuadSpec& quad = {}) {
  const auto v = validate_params(p);
  if (!v.flags.q_critical) throw std::invalid_argument("critical_upper_bound requires q = 2**");
  const auto c = closed_form_constants(p);
  if (!(p.lambda > -c.gamma_alpha_formula))
    throw InadmissibleParams("lambda must exceed -(n-alpha)^2/4");
  const auto u = quotient_of_U(p, quad);
  CriticalBound b;
  b.value = u.value;
  b.s_double_star = u.s_double_star;
  b.lambda_alpha = c.lambda_alpha;
  b.strictly_below = p.lambda < c.lambda_alpha;
  b.relative_error = u.relative_error;
  return b;
}

// ---------------------------------------------------------------------------

struct RadialEstimate {
  double value = 0;
  double tolerance = 0;  // Richardson estimate |S_N - S_{N/2}| / 3 plus the residual level
  bool converged = false;
};

/// S_rad(lambda) at the configured grid with a grid-refinement error estimate.
inline RadialEstimate radial_estimate(const ProblemParams& p, const SolverConfig& cfg) {
  const ReducedForm form = reduce_fourth_order(p);
  const auto fine = solve_fourth(form, cfg);
  SolverConfig coarse_cfg = cfg;
  coarse_cfg.grid = Grid1D(cfg.grid.half_length(), cfg.grid.intervals() / 2);
  const auto coarse = solve_fourth(form, coarse_cfg, fine.profile);
  RadialEstimate r;
  r.value = fine.infimum;
  r.tolerance = std::abs(fine.infimum - coarse.infimum) / 3.0 + cfg.el_tolerance * fine.infimum;
  r.converged = fine.converged && coarse.converged;
  return r;
}

struct BumpBound {
  double value = 0;
  double tolerance = 0;
  double delta = 0;
};

/// Best bump bound of (eps int|x|^a|Lap u|^2 + int|x|^{a-2}|grad u|^2) / (int|x|^{-b}|u|^q)^{2/q}
/// over delta = first_delta / 2^k.
inline BumpBound best_bump_bound(const ProblemParams& p, double eps, const VerdictBudget& budget) {
  BumpBound best{std::numeric_limits<double>::infinity(), 0, 0};
  BumpSpec spec = budget.bump;
  for (int k = 0; k < budget.max_delta_steps; ++k) {
    spec.delta = budget.first_delta * std::ldexp(1.0, -k);
    const auto e = bump_energies(p, spec);
    const double v = bump_quotient(p, e, eps);
    const bool improved = v < best.value;
    if (improved) best = {v, 4 * e.relative_error * v, spec.delta};
    if (!improved && k + 1 >= budget.min_delta_steps) break;
  }
  return best;
}

inline PhaseVerdict verdict_at(const ProblemParams& p, const VerdictBudget& budget = {}) {
  const auto v = validate_params(p);
  const auto c = closed_form_constants(p);
  if (!(p.lambda > -c.gamma_alpha_formula))
    throw InadmissibleParams("lambda must exceed -(n-alpha)^2/4");

  PhaseVerdict out;
  out.params = p;
  out.verdict = Verdict::no_breaking_evidence;

  auto compare = [&](double upper, double upper_tol, double radial, double radial_tol, Criterion crit) {
    out.s_upper_bound = upper;
    out.s_radial = radial;
    out.margin = radial - upper;
    out.tolerance = upper_tol + radial_tol;
    if (*out.margin > budget.margin_factor * *out.tolerance) {
      out.criteria_fired.push_back(crit);
      out.verdict = Verdict::radial_breaks_certified;
    } else if (*out.margin > -budget.margin_factor * *out.tolerance) {
      out.verdict = Verdict::inconclusive;
    }
  };

  if (v.flags.q_below_first_order_critical || std::abs(p.q - two_star(p.n)) <= critical_tolerance) {
    // q <= 2*: only the qualitative route through the lower-order problem
    if (felli_schneider_holds(p)) {
      out.criteria_fired.push_back(Criterion::FS_condition);
      out.verdict = Verdict::breaks_for_large_lambda;
    }
    return out;
  }

  if (v.flags.q_supercritical_full) {
    out.verdict = Verdict::inconclusive;  // the full problem has no finite infimum to compare
    return out;
  }

  const RadialEstimate radial = radial_estimate(p, budget.solver);
  if (!radial.converged) {
    out.verdict = Verdict::inconclusive;
    out.s_radial = radial.value;
    out.error = "radial solve did not converge";
    return out;
  }

  if (v.flags.q_critical) {
    const auto bound = critical_upper_bound(p, budget.quadrature);
    if (bound.strictly_below) out.criteria_fired.push_back(Criterion::lambda_alpha_threshold);
    if (p.alpha == 0.0 && p.lambda > 0) {
      // S_{0,2**}(lambda) = S** is not attained for lambda > 0
      const double upper = bound.s_double_star;
      compare(upper, bound.relative_error * upper, radial.value, radial.tolerance,
              Criterion::critical_nonattainment);
    } else {
      compare(bound.value, bound.relative_error * bound.value, radial.value, radial.tolerance,
              Criterion::upper_bound_vs_radial);
    }
    return out;
  }

  // 2* < q < 2**: bump upper bound.  For lambda > 0 both sides are reported in the
  // eps = 1/lambda normalization, S~(eps) = S(lambda) / lambda.
  if (p.lambda > 0) {
    const double eps = 1.0 / p.lambda;
    const auto bump = best_bump_bound(p, eps, budget);
    out.bump_delta = bump.delta;
    compare(bump.value, bump.tolerance, radial.value * eps, radial.tolerance * eps,
            Criterion::upper_bound_vs_radial);
  } else {
    // numerator int|x|^a|Lap u|^2 + lambda int|x|^{a-2}|grad u|^2 directly
    BumpBound best{std::numeric_limits<double>::infinity(), 0, 0};
    BumpSpec spec = budget.bump;
    for (int k = 0; k < budget.min_delta_steps; ++k) {
      spec.delta = budget.first_delta * std::ldexp(1.0, -k);
      const auto e = bump_energies(p, spec);
      const double val = (e.laplacian + p.lambda * e.gradient) / std::pow(e.lq, 2.0 / p.q);
      if (val > 0 && val < best.value) best = {val, 4 * e.relative_error * std::abs(val), spec.delta};
    }
    out.bump_delta = best.delta;
    compare(best.value, best.tolerance, radial.value, radial.tolerance, Criterion::upper_bound_vs_radial);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SemicontinuityChain {
  double theta_q = 0;
  double tau_alpha = 0;
  double eps_alpha = 0;
  double K_alpha = 0;
  double radial_lower_bound = 0;
};

/// Lower bound for S^rad_{alpha,q}(lambda) from a reference value of S^rad_{0,2**}(lambda):
///   S^rad_{alpha,q} >= delta_alpha^{2(1-theta)/q} (S^rad_{0,2**} / K_alpha)^{theta 2**/q}.
inline SemicontinuityChain semicontinuity_chain(const ProblemParams& p, double gamma,
                                                double reference_critical_radial) {
  validate_params(p);
  if (p.lambda < 0) throw std::invalid_argument("semicontinuity chain needs lambda >= 0");
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
  const double crit = two_double_star(p.n);
  if (p.q > crit + critical_tolerance) throw std::invalid_argument("semicontinuity chain needs q <= 2**");
  const auto c = closed_form_constants(p);

  SemicontinuityChain s;
  s.theta_q = std::min(1.0, (p.q - 2) / (crit - 2));
  s.tau_alpha = 1 + p.alpha / (p.n - 4);
  s.eps_alpha = std::abs(s.tau_alpha - 1) * (p.n - 2) / std::sqrt(gamma);
  const double g = (1 + s.eps_alpha) * (1 + s.eps_alpha);
  s.K_alpha = g / std::pow(s.tau_alpha, 3 + 2 / crit) +
              p.lambda / gamma / std::pow(s.tau_alpha, 1 + 2 / crit) *
                  std::abs(1 - g / (s.tau_alpha * s.tau_alpha));
  s.radial_lower_bound = std::pow(c.delta_alpha, 2 * (1 - s.theta_q) / p.q) *
                         std::pow(reference_critical_radial / s.K_alpha, s.theta_q * crit / p.q);
  return s;
}

// ---------------------------------------------------------------------------

struct PhaseGrid {
  int n = 5;
  std::vector<double> alphas;
  std::vector<double> qs;
  std::vector<double> lambdas;

  std::vector<ProblemParams> points() const {
    std::vector<ProblemParams> out;
    for (double a : alphas)
      for (double q : qs)
        for (double l : lambdas) out.push_back({n, a, q, l});
    return out;
  }
};

/// Thread-safe verdict store keyed by the exact parameter values.  Values are
/// deterministic, so concurrent inserts of the same key are benign.
class VerdictCache {
 public:
  using Key = std::tuple<int, double, double, double>;
  static Key key(const ProblemParams& p) { return {p.n, p.alpha, p.q, p.lambda}; }

  std::optional<PhaseVerdict> find(const ProblemParams& p) const {
    std::lock_guard lock(mutex_);
    const auto it = map_.find(key(p));
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void insert(const PhaseVerdict& v) {
    std::lock_guard lock(mutex_);
    map_[key(v.params)] = v;
  }
  std::vector<PhaseVerdict> entries() const {
    std::lock_guard lock(mutex_);
    std::vector<PhaseVerdict> out;
    for (const auto& [k, v] : map_) out.push_back(v);
    return out;
  }
  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return map_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<Key, PhaseVerdict> map_;
};

struct PhaseScanStats {
  std::size_t computed = 0;  // verdicts evaluated (cache misses)
  std::size_t cached = 0;
};

/// One verdict per grid point in grid order.  Points run on `jobs` worker threads;
/// failures are recorded in the verdict and the scan continues.
inline std::vector<PhaseVerdict> phase_scan(const PhaseGrid& grid, const VerdictBudget& budget,
                                            VerdictCache* cache = nullptr, unsigned jobs = 1,
                                            PhaseScanStats* stats = nullptr) {
  const auto points = grid.points();
  std::vector<PhaseVerdict> out(points.size());
  std::atomic<std::size_t> next{0}, computed{0}, hits{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const auto& p = points[i];
      if (cache) {
        if (auto hit = cache->find(p)) {
          out[i] = *hit;
          ++hits;
          continue;
        }
      }
      PhaseVerdict v;
      try {
        v = verdict_at(p, budget);
      } catch (const std::exception& e) {
        v = PhaseVerdict{};
        v.params = p;
        v.verdict = Verdict::inconclusive;
        v.error = e.what();
      }
      ++computed;
      if (cache) cache->insert(v);
      out[i] = std::move(v);
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, points.size()))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (stats) {
    stats->computed = computed;
    stats->cached = hits;
  }
  return out;
}

}  // namespace rellich
