#pragma once

// Minimizers of the reduced 1D quotients
//
//     Q(w) = E(w) / (h sum |w_i|^q)^{2/q},   E(w) = h w^T A w,
//
// by descent on the unit discrete L^q sphere.  The search direction is the
// gradient in the metric of A itself (a Sobolev gradient): at a unit-norm w
// with m = E(w) and g = |w|^{q-2} w the step is
//
//     w <- normalize(w + tau (m A^{-1} g - w)).
//
// At tau = 1 this is the nonlinear power iteration, which never increases Q;
// backtracking halves tau when a trial step would.  The Euler-Lagrange
// equation A w = m |w|^{q-2} w is the stopping criterion.

#include "rellich/emden_fowler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace rellich {

struct StepRule {
  double initial_step = 1.0;
  double backtrack = 0.5;
  double min_step = 1e-12;
};

struct SolverConfig {
  Grid1D grid{20.0, 4096};
  StepRule step_rule{};
  int max_iterations = 200000;
  double el_tolerance = 1e-6;
  int restarts = 0;  // random initializations in addition to the default Gaussian
  std::uint64_t seed = 1;

  void validate() const {
    if (!(el_tolerance > 0)) throw std::invalid_argument("el_tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (restarts < 0) throw std::invalid_argument("restarts must be nonnegative");
    if (!(step_rule.backtrack > 0 && step_rule.backtrack < 1))
      throw std::invalid_argument("backtrack factor must lie in (0, 1)");
    if (!(step_rule.initial_step > 0 && step_rule.min_step > 0))
      throw std::invalid_argument("step sizes must be positive");
  }
};

struct MinimizeResult {
  double infimum = 0;           // sphere_factor * unscaled_infimum
  double unscaled_infimum = 0;  // discrete 1D quotient without the sphere factor
  Profile1D profile;            // unit discrete L^q norm, argmax of |w| at t = 0, max w > 0
  double el_residual = 0;
  int iterations = 0;
  bool converged = false;
  double tau_scale = 0;         // multiplier of the nonlinearity at unit norm
  std::vector<double> history;  // unscaled quotient after each accepted step
  double restart_spread = 0;    // relative spread of the converged infima over restarts
  ReducedForm form;
};

class SolverNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double lq_norm(const Eigen::VectorXd& x, double q, double h) {
  double s = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), q);
  return std::pow(h * s, 1.0 / q);
}

inline Eigen::VectorXd nonlinearity(const Eigen::VectorXd& x, double q) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = std::pow(std::abs(x[i]), q - 2) * x[i];
  return g;
}

inline double residual(const DiscreteOperator& op, const Eigen::VectorXd& x, double m, double q) {
  const Eigen::VectorXd mg = m * nonlinearity(x, q);
  const double denom = mg.norm();
  if (!(denom > 0)) return std::numeric_limits<double>::infinity();
  return (op.apply(x) - mg).norm() / denom;
}

/// Linear interpolation of w onto g (zero outside the source interval).
inline Profile1D resample(const Profile1D& w, const Grid1D& g) {
  if (w.grid == g) return w;
  const Grid1D& src = w.grid;
  return Profile1D::sample(g, [&](double t) {
    const double s = (t - src.node(0)) / src.spacing();
    if (s <= 0 || s >= src.intervals()) return 0.0;
    const int i = static_cast<int>(std::floor(s));
    const double f = s - i;
    return (1 - f) * w.values[i] + f * w.values[i + 1];
  });
}

struct RunOutcome {
  Eigen::VectorXd x;
  double m = 0;
  double residual = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

inline RunOutcome run_descent(const DiscreteOperator& op, Eigen::VectorXd x, double q,
                              const SolverConfig& cfg) {
  const double h = op.grid().spacing();
  const double norm0 = lq_norm(x, q, h);
  if (!(norm0 > 0) || !std::isfinite(norm0)) throw std::invalid_argument("initial profile must be nonzero and finite");
  x /= norm0;

  RunOutcome out;
  auto ev = op.energy_evaluation(x);
  double m = ev.value;
  out.history.push_back(m);
  double step = cfg.step_rule.initial_step;
  for (int it = 0;; ++it) {
    const Eigen::VectorXd g = nonlinearity(x, q);
    const Eigen::VectorXd mg = m * g;
    const double res = (op.apply(x) - mg).norm() / mg.norm();
    out.residual = res;
    out.iterations = it;
    if (res <= cfg.el_tolerance) {
      out.converged = true;
      break;
    }
    if (it >= cfg.max_iterations) break;

    const Eigen::VectorXd dir = m * op.solve(g) - x;
    double tau = step;
    bool accepted = false;
    while (tau >= cfg.step_rule.min_step) {
      Eigen::VectorXd trial = x + tau * dir;
      trial /= lq_norm(trial, q, h);
      const auto et = op.energy_evaluation(trial);
      // nonincrease up to the rounding error of the two energy evaluations
      if (std::isfinite(et.value) && et.value <= m + ev.rounding_bound + et.rounding_bound) {
        x = std::move(trial);
        ev = et;
        m = et.value;
        accepted = true;
        break;
      }
      tau *= cfg.step_rule.backtrack;
    }
    if (!accepted) break;  // stalled at rounding level without meeting the residual target
    out.history.push_back(m);
    // let the step grow back toward the initial value after successful backtracks
    step = std::min(cfg.step_rule.initial_step, tau / cfg.step_rule.backtrack);
  }
  out.x = std::move(x);
  out.m = m;
  return out;
}

/// Shifts the argmax of |w| to the center node, flips the sign so the max is positive,
/// and renormalizes to unit L^q norm.
inline Profile1D center_profile(const Profile1D& w, double q) {
  const auto& v = w.values;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  const int shift = w.grid.center_index() - static_cast<int>(arg);
  const double sign = v[arg] < 0 ? -1.0 : 1.0;
  Profile1D out = Profile1D::zeros(w.grid);
  const int n = w.grid.size();
  for (int i = 1; i + 1 < n; ++i) {
    const int j = i - shift;
    if (j >= 0 && j < n) out.values[i] = sign * v[j];
  }
  const double norm = std::pow(discrete_lq_integral(out, q), 1.0 / q);
  for (double& x : out.values) x /= norm;
  return out;
}

inline Profile1D random_initial_profile(const Grid1D& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-0.25 * g.half_length(), 0.25 * g.half_length());
  std::uniform_real_distribution<double> width(0.5, 3.0);
  std::uniform_real_distribution<double> amp(-0.3, 0.3);
  const double c = center(rng), s = width(rng);
  const double a1 = amp(rng), a2 = amp(rng), k1 = width(rng), k2 = width(rng);
  return Profile1D::sample(g, [&](double t) {
    const double y = (t - c) / s;
    return std::exp(-y * y) * (1.0 + a1 * std::cos(k1 * y) + a2 * std::sin(k2 * y));
  });
}

}  // namespace detail

inline Profile1D default_initial_profile(const Grid1D& g) {
  return Profile1D::sample(g, [](double t) { return std::exp(-t * t); });
}

/// Relative residual |A w - m |w|^{q-2} w| / |m |w|^{q-2} w| in the Euclidean norm on interior nodes.
inline double el_residual(const ReducedForm& form, const Profile1D& w, double m) {
  const DiscreteOperator op(form.density, w.grid);
  return detail::residual(op, op.interior(w), m, form.q);
}

inline MinimizeResult minimize_quotient(const ReducedForm& form, const SolverConfig& cfg,
                                        const std::optional<Profile1D>& initial = std::nullopt) {
  if (!form.admissible()) throw InadmissibleParams("reduced form must have positive coefficients and q > 2");
  cfg.validate();
  const DiscreteOperator op(form.density, cfg.grid);

  std::vector<Profile1D> starts;
  starts.push_back(initial ? detail::resample(*initial, cfg.grid) : default_initial_profile(cfg.grid));
  std::mt19937_64 rng(cfg.seed);
  for (int k = 0; k < cfg.restarts; ++k) starts.push_back(detail::random_initial_profile(cfg.grid, rng));

  std::optional<detail::RunOutcome> best;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int total_iterations = 0;
  for (const auto& s : starts) {
    auto run = detail::run_descent(op, op.interior(s), form.q, cfg);
    total_iterations += run.iterations;
    if (run.converged) {
      lo = std::min(lo, run.m);
      hi = std::max(hi, run.m);
    }
    const bool better = !best || (run.converged && !best->converged) ||
                        (run.converged == best->converged && run.m < best->m);
    if (better) best = std::move(run);
  }

  MinimizeResult r;
  r.form = form;
  r.profile = detail::center_profile(op.embed(best->x), form.q);
  const Eigen::VectorXd x = op.interior(r.profile);
  r.unscaled_infimum = op.energy(x);
  r.infimum = form.sphere_factor * r.unscaled_infimum;
  r.el_residual = detail::residual(op, x, r.unscaled_infimum, form.q);
  r.converged = best->converged && r.el_residual <= cfg.el_tolerance;
  r.iterations = total_iterations;
  r.history = std::move(best->history);
  r.tau_scale = r.unscaled_infimum;
  r.restart_spread = (hi >= lo) ? (hi - lo) / lo : 0.0;
  return r;
}

inline MinimizeResult solve_fourth(const ReducedForm& form, const SolverConfig& cfg,
                                   const std::optional<Profile1D>& initial = std::nullopt) {
  if (form.order != FormOrder::fourth) throw std::invalid_argument("solve_fourth needs a fourth-order form");
  return minimize_quotient(form, cfg, initial);
}

inline MinimizeResult solve_second(const ReducedForm& form, const SolverConfig& cfg,
                                   const std::optional<Profile1D>& initial = std::nullopt) {
  if (form.order != FormOrder::second) throw std::invalid_argument("solve_second needs a second-order form");
  return minimize_quotient(form, cfg, initial);
}

struct ScaledSolution {
  Profile1D profile;  // solves A U = |U|^{q-2} U
  double tau = 0;
};

/// U = tau^{1/(q-2)} w with tau the multiplier of the nonlinearity at unit norm, i.e. the
/// discrete quotient without the sphere factor.  For a general norm
/// tau = m * |w|_q^{2-q}, which reduces to m when |w|_q = 1.
inline ScaledSolution scale_to_solution(const MinimizeResult& r) {
  const double q = r.form.q;
  const double norm = std::pow(discrete_lq_integral(r.profile, q), 1.0 / q);
  ScaledSolution s;
  s.tau = r.unscaled_infimum * std::pow(norm, 2.0 - q);
  const double c = std::pow(s.tau, 1.0 / (q - 2));
  s.profile = r.profile;
  for (double& v : s.profile.values) v *= c;
  return s;
}

}  // namespace rellich
