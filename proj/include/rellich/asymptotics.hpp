#pragma once

// The eps-normalized radial problem
//
//     S~rad(eps) = omega_n^{1-2/q} inf  int [eps (w''^2 + 2 dt w'^2 + d w^2) + w'^2 + h w^2]
//                                       / (int |w|^q)^{2/q}
//
// (dt, d, h the Rellich, modified Rellich and Hardy constants of the weight) and
// its eps -> 0 continuation toward the second-order ground state.  For eps = 1/lambda
// the density is eps times the fourth-order density at lambda, so
// lambda * S~rad(1/lambda) = S_rad(lambda).

#include "rellich/reduced_solvers.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rellich {

inline ReducedForm eps_form(const ProblemParams& p, double eps) {
  validate_params(p);
  if (!(eps >= 0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be nonnegative");
  const auto c = closed_form_constants(p);
  const double sf = std::pow(c.omega_n, 1.0 - 2.0 / p.q);
  if (eps == 0) return ReducedForm::second(c.h_tilde_alpha, p.q, sf);
  ReducedForm f;
  f.order = FormOrder::fourth;
  f.density = {eps, 2 * eps * c.delta_tilde_alpha + 1, eps * c.delta_alpha + c.h_tilde_alpha};
  f.q = p.q;
  f.sphere_factor = sf;
  return f;
}

inline MinimizeResult solve_eps_radial(const ProblemParams& p, double eps, const SolverConfig& cfg,
                                       const std::optional<Profile1D>& initial = std::nullopt) {
  const ReducedForm form = eps_form(p, eps);
  return eps == 0 ? solve_second(form, cfg, initial) : minimize_quotient(form, cfg, initial);
}

/// |a - b|_{H^1} / |b|_{H^1} with the discrete H^1 norm h sum w^2 + h sum (D1 w)^2.
inline double h1_relative_distance(const Profile1D& a, const Profile1D& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("profiles live on different grids");
  Profile1D diff = a;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= b.values[i];
  const auto fd = discrete_forms(diff), fb = discrete_forms(b);
  return std::sqrt((fd.value + fd.first_derivative) / (fb.value + fb.first_derivative));
}

struct ContinuationPoint {
  double eps = 0;
  double s_tilde = 0;
  double relative_gap = 0;  // (s_tilde - s_tilde(0)) / s_tilde(0)
  Profile1D profile;
  double h1_distance_to_limit = 0;
  double el_residual = 0;
  int iterations = 0;
  bool converged = false;
};

struct ContinuationRun {
  ProblemParams params;
  std::vector<double> eps_sequence;
  double s_tilde_limit = 0;  // eps = 0 value
  Profile1D limit_profile;
  bool limit_converged = false;
  std::vector<ContinuationPoint> per_eps;
  bool degraded = false;            // some solve did not converge
  bool distances_monotone = false;  // nonincreasing up to 10% slack
  bool gaps_monotone = false;       // s_tilde gaps positive and nonincreasing
};

inline ContinuationRun limiting_profile_run(const ProblemParams& p, const std::vector<double>& eps_sequence,
                                            const SolverConfig& cfg, double monotone_slack = 0.10) {
  const auto v = validate_params(p);
  if (!v.flags.q_below_first_order_critical) throw InadmissibleParams("limiting profile requires q < 2*");
  if (eps_sequence.empty()) throw std::invalid_argument("eps sequence must be nonempty");
  for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
    if (!(eps_sequence[i] >= 1e-6)) throw std::invalid_argument("eps values must be at least 1e-6");
    if (i > 0 && eps_sequence[i] > eps_sequence[i - 1])
      throw std::invalid_argument("eps sequence must be nonincreasing");
  }

  ContinuationRun run;
  run.params = p;
  run.eps_sequence = eps_sequence;
  const auto limit = solve_eps_radial(p, 0.0, cfg);
  run.s_tilde_limit = limit.infimum;
  run.limit_profile = limit.profile;
  run.limit_converged = limit.converged;
  run.degraded = !limit.converged;

  std::optional<Profile1D> warm;
  for (double eps : eps_sequence) {
    const auto r = solve_eps_radial(p, eps, cfg, warm);
    ContinuationPoint pt;
    pt.eps = eps;
    pt.s_tilde = r.infimum;
    pt.relative_gap = (r.infimum - limit.infimum) / limit.infimum;
    pt.profile = r.profile;
    pt.h1_distance_to_limit = h1_relative_distance(r.profile, limit.profile);
    pt.el_residual = r.el_residual;
    pt.iterations = r.iterations;
    pt.converged = r.converged;
    run.degraded = run.degraded || !r.converged;
    warm = r.profile;
    run.per_eps.push_back(std::move(pt));
  }

  run.distances_monotone = true;
  run.gaps_monotone = true;
  for (std::size_t i = 0; i < run.per_eps.size(); ++i) {
    const auto& cur = run.per_eps[i];
    if (!(cur.relative_gap > 0)) run.gaps_monotone = false;
    if (i == 0) continue;
    const auto& prev = run.per_eps[i - 1];
    if (cur.h1_distance_to_limit > prev.h1_distance_to_limit * (1 + monotone_slack)) run.distances_monotone = false;
    if (cur.relative_gap > prev.relative_gap) run.gaps_monotone = false;
  }
  return run;
}

}  // namespace rellich
