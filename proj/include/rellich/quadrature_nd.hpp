#pragma once

// Quadrature of the explicit n-dimensional integrals: radial integrals in the
// variable s = log r (homogeneous weights become exponentials and the
// integrands are analytic), the quotient of the extremal
// U(x) = (1+|x|^2)^{-(n-4)/2}, the A_alpha / B_alpha identities, the
// weight-shift identity, and the concentrated bump u_delta.

#include "rellich/constants.hpp"
#include "rellich/jet.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rellich {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 20-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussRule& standard() {
    static const GaussRule rule = [] {
      using G = boost::math::quadrature::gauss<double, 20>;
      GaussRule r;
      const auto& x = G::abscissa();
      const auto& w = G::weights();
      for (std::size_t i = 0; i < x.size(); ++i) {
        r.nodes.push_back(x[i]);
        r.weights.push_back(w[i]);
        if (x[i] != 0) {
          r.nodes.push_back(-x[i]);
          r.weights.push_back(w[i]);
        }
      }
      return r;
    }();
    return rule;
  }
  std::size_t size() const { return nodes.size(); }
};

template <class F>
double composite_gauss(F&& f, double a, double b, int panels) {
  const auto& rule = GaussRule::standard();
  const double width = (b - a) / panels;
  double total = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double s = 0;
    for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
    total += 0.5 * width * s;
  }
  return total;
}

struct RadialQuadSpec {
  double r_min = std::exp(-40.0);
  double r_max = std::exp(40.0);
  int node_count = 640;       // initial node budget (multiple of the panel rule size)
  int max_nodes = 1 << 18;
  double rel_tol = 1e-10;
};

struct QuadResult {
  double value = 0;
  double previous = 0;  // estimate at half the nodes
  int nodes = 0;
  bool converged = false;
  double error_estimate() const { return std::abs(value - previous); }
};

/// Refines a composite Gauss rule on [a, b] by doubling panels until successive
/// estimates agree to rel_tol.
template <class F>
QuadResult refine_gauss(F&& f, double a, double b, int initial_nodes, int max_nodes, double rel_tol) {
  const int per_panel = static_cast<int>(GaussRule::standard().size());
  int panels = std::max(1, initial_nodes / per_panel);
  QuadResult r;
  r.previous = composite_gauss(f, a, b, panels);
  while (true) {
    panels *= 2;
    r.value = composite_gauss(f, a, b, panels);
    r.nodes = panels * per_panel;
    const double diff = std::abs(r.value - r.previous);
    if (diff <= rel_tol * std::abs(r.value) || (r.value == 0 && r.previous == 0)) {
      r.converged = true;
      return r;
    }
    if (2 * r.nodes > max_nodes) return r;
    r.previous = r.value;
  }
}

/// omega_n * int_{r_min}^{r_max} f(r) r^{n-1} dr, i.e. the integral over R^n of the
/// radial function f.  Computed as omega_n * int f(e^s) e^{n s} ds.
template <class F>
QuadResult radial_integral(int n, F&& f, const RadialQuadSpec& spec = {}) {
  if (!(spec.r_min > 0 && spec.r_min < 1 && spec.r_max > 1))
    throw std::invalid_argument("radial quadrature needs r_min < 1 < r_max");
  if (spec.node_count < 256) throw std::invalid_argument("radial quadrature needs >= 256 nodes");
  const double omega = sphere_measure(n);
  auto g = [&](double s) {
    const double r = std::exp(s);
    return f(r) * std::exp(n * s);
  };
  QuadResult r = refine_gauss(g, std::log(spec.r_min), std::log(spec.r_max), spec.node_count,
                              spec.max_nodes, spec.rel_tol);
  r.value *= omega;
  r.previous *= omega;
  return r;
}

template <class F>
double radial_integral_value(int n, F&& f, const RadialQuadSpec& spec = {}) {
  const auto r = radial_integral(n, std::forward<F>(f), spec);
  if (!r.converged)
    throw QuadratureError("radial quadrature did not converge: last estimates " +
                          std::to_string(r.previous) + ", " + std::to_string(r.value));
  return r.value;
}

/// The second-order Sobolev extremal (1 + r^2)^{-(n-4)/2}.
template <class T>
T bubble(const T& r, int n) {
  using std::pow;
  return pow(T(1.0) + r * r, -0.5 * (n - 4));
}

// ---------------------------------------------------------------------------

struct QuotientOfU {
  double value = 0;             // quotient of |x|^{-alpha/2} U at (alpha, lambda)
  double s_double_star = 0;     // int |Lap U|^2 / (int U^{2**})^{2/2**}
  double laplacian_integral = 0;  // int |Lap U|^2
  double hardy_integral = 0;      // int |x|^{-4} U^2
  double lq_integral = 0;         // int U^{2**}
  double A_alpha = 0;
  double B_alpha = 0;
  double relative_error = 0;      // quadrature refinement estimate
};

inline QuotientOfU quotient_of_U(const ProblemParams& p, const RadialQuadSpec& spec = {}) {
  const auto v = validate_params(p);
  if (!v.flags.q_critical) throw std::invalid_argument("quotient_of_U requires q = 2**");
  const int n = p.n;
  const double crit = two_double_star(n);
  const auto c = closed_form_constants(p);

  const auto lap = radial_integral(n, [n](double r) {
    const double l = radial_laplacian(bubble(Jet2::variable(r), n), r, n);
    return l * l;
  }, spec);
  const auto hardy = radial_integral(n, [n](double r) {
    const double u = bubble(r, n);
    return u * u / (r * r * r * r);
  }, spec);
  const auto lq = radial_integral(n, [n, crit](double r) { return std::pow(bubble(r, n), crit); }, spec);
  if (!lap.converged || !hardy.converged || !lq.converged)
    throw QuadratureError("quotient_of_U: radial quadrature did not converge");

  QuotientOfU out;
  out.laplacian_integral = lap.value;
  out.hardy_integral = hardy.value;
  out.lq_integral = lq.value;
  out.A_alpha = c.A_alpha;
  out.B_alpha = c.B_alpha;
  const double denom = std::pow(lq.value, 2.0 / crit);
  out.s_double_star = lap.value / denom;
  out.value = (lap.value + (c.A_alpha + p.lambda * c.B_alpha) * hardy.value) / denom;
  out.relative_error = lap.error_estimate() / lap.value + hardy.error_estimate() / hardy.value +
                       lq.error_estimate() / lq.value;
  return out;
}

struct IdentityReport {
  double laplacian_lhs = 0, laplacian_rhs = 0;
  double gradient_lhs = 0, gradient_rhs = 0;
  double lq_lhs = 0, lq_rhs = 0;
  double max_relative_error = 0;
  bool passed = false;
};

inline double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

/// Checks, for u = |x|^{-alpha/2} U and q = 2**,
///   int |x|^alpha |Lap u|^2        = int |Lap U|^2 + A_alpha int |x|^{-4} U^2
///   int |x|^{alpha-2} |grad u|^2   = B_alpha int |x|^{-4} U^2
///   int |x|^{-beta} |u|^{2**}      = int U^{2**}
inline IdentityReport verify_AB_identities(int n, double alpha, const RadialQuadSpec& spec = {},
                                           double tolerance = 1e-6) {
  validate_dimension_and_weight(n, alpha);
  const double crit = two_double_star(n);
  const double beta = -n * alpha / (n - 4.0);
  const auto c = closed_form_constants(n, alpha, 0.0);
  auto u = [n, alpha](double r) {
    const Jet2 x = Jet2::variable(r);
    return pow(x, -0.5 * alpha) * bubble(x, n);
  };

  IdentityReport rep;
  rep.laplacian_lhs = radial_integral_value(n, [&](double r) {
    const double l = radial_laplacian(u(r), r, n);
    return std::pow(r, alpha) * l * l;
  }, spec);
  const double lapU = radial_integral_value(n, [n](double r) {
    const double l = radial_laplacian(bubble(Jet2::variable(r), n), r, n);
    return l * l;
  }, spec);
  const double hardy = radial_integral_value(n, [n](double r) {
    const double b = bubble(r, n);
    return b * b / (r * r * r * r);
  }, spec);
  rep.laplacian_rhs = lapU + c.A_alpha * hardy;
  rep.gradient_lhs = radial_integral_value(n, [&](double r) {
    const double d = u(r).d1;
    return std::pow(r, alpha - 2) * d * d;
  }, spec);
  rep.gradient_rhs = c.B_alpha * hardy;
  rep.lq_lhs = radial_integral_value(n, [&](double r) {
    return std::pow(r, -beta) * std::pow(std::abs(u(r).v), crit);
  }, spec);
  rep.lq_rhs = radial_integral_value(n, [&](double r) { return std::pow(bubble(r, n), crit); }, spec);

  rep.max_relative_error = std::max({relative_gap(rep.laplacian_lhs, rep.laplacian_rhs),
                                     relative_gap(rep.gradient_lhs, rep.gradient_rhs),
                                     relative_gap(rep.lq_lhs, rep.lq_rhs)});
  rep.passed = rep.max_relative_error <= tolerance;
  return rep;
}

using RadialJetFunction = std::function<Jet2(const Jet2&)>;

struct WeightShiftReport {
  double lhs = 0;
  double rhs = 0;
  double relative_error = 0;
  bool passed = false;
};

/// Integrates both sides of
///   |x|^{-alpha} |Lap(|x|^{alpha/2} w)|^2 = |Lap w|^2 + alpha^2 |x|^{-4} |x.grad w|^2
///       + (alpha^2/4)(n-2+alpha/2)^2 |x|^{-4} w^2 + 2 alpha |x|^{-2} (x.grad w) Lap w
///       + alpha^2 (n-2+alpha/2) |x|^{-4} w (x.grad w) + alpha (n-2+alpha/2) |x|^{-2} w Lap w
/// for a radial w (x.grad w = r w').
inline WeightShiftReport verify_weight_shift_identity(int n, double alpha, const RadialJetFunction& w,
                                                      const RadialQuadSpec& spec = {},
                                                      double tolerance = 1e-8) {
  validate_dimension_and_weight(n, alpha);
  const double k = n - 2 + 0.5 * alpha;
  WeightShiftReport rep;
  rep.lhs = radial_integral_value(n, [&](double r) {
    const Jet2 x = Jet2::variable(r);
    const double l = radial_laplacian(pow(x, 0.5 * alpha) * w(x), r, n);
    return std::pow(r, -alpha) * l * l;
  }, spec);
  rep.rhs = radial_integral_value(n, [&](double r) {
    const Jet2 f = w(Jet2::variable(r));
    const double lap = radial_laplacian(f, r, n);
    const double xg = r * f.d1;
    const double r2 = r * r, r4 = r2 * r2;
    return lap * lap + alpha * alpha * xg * xg / r4 + 0.25 * alpha * alpha * k * k * f.v * f.v / r4 +
           2 * alpha * xg * lap / r2 + alpha * alpha * k * f.v * xg / r4 + alpha * k * f.v * lap / r2;
  }, spec);
  rep.relative_error = relative_gap(rep.lhs, rep.rhs);
  rep.passed = rep.relative_error <= tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Concentrated bump u_delta(x) = delta^{-(n-2)/2} phi((x - x0)/delta), |x0| = 1,
// phi(y) = exp(1 - 1/(1 - |y|^2)) on the unit ball.

struct BumpSpec {
  double delta = 0.2;
  int radial_nodes = 160;
  int angular_nodes = 160;
  double rel_tol = 1e-10;
  int max_nodes = 5120;
};

template <class T>
T bump_mollifier(const T& rho) {
  using std::exp;
  const double y = value_of(rho);
  // beyond this point the value and its derivatives are below 1e-290
  if (!(std::abs(y) < 1.0) || 1.0 - y * y < 1.0 / 690.0) return T(0.0);
  return exp(T(1.0) - T(1.0) / (T(1.0) - rho * rho));
}

struct BumpEnergies {
  double gradient = 0;   // int |x|^{alpha-2} |grad u_delta|^2
  double laplacian = 0;  // int |x|^alpha |Lap u_delta|^2
  double lq = 0;         // int |x|^{-beta} |u_delta|^q
  double relative_error = 0;
};

namespace detail {

// (rho, theta) in (0,1) x (0,pi), x = x0 + delta rho omega, |x|^2 = 1 + 2 delta rho cos(theta) + (delta rho)^2,
// measure omega_{n-1} delta^n rho^{n-1} sin^{n-2}(theta).  Returns the three integrals with the
// delta-scalings of the integrands pulled out.
inline BumpEnergies bump_energies_at(const ProblemParams& p, double delta, int nodes) {
  const int n = p.n;
  const double beta = derived_exponents_generic<double>(n, p.alpha, p.q).beta;
  const double omega_sub = sphere_measure(n - 1);
  BumpEnergies e;
  auto radial = [&](double rho, double& g, double& l, double& m) {
    const Jet2 phi = bump_mollifier(Jet2::variable(rho));
    const double lap = radial_laplacian(phi, rho, n);
    auto inner = [&](double theta) {
      const double dr = delta * rho;
      const double x2 = 1 + 2 * dr * std::cos(theta) + dr * dr;
      const double jac = std::pow(std::sin(theta), n - 2);
      return std::array<double, 3>{std::pow(x2, 0.5 * (p.alpha - 2)) * jac,
                                   std::pow(x2, 0.5 * p.alpha) * jac,
                                   std::pow(x2, -0.5 * beta) * jac};
    };
    const auto& rule = GaussRule::standard();
    const int panels = std::max(1, nodes / static_cast<int>(rule.size()));
    const double width = std::numbers::pi / panels;
    std::array<double, 3> acc{0, 0, 0};
    for (int k = 0; k < panels; ++k) {
      const double mid = (k + 0.5) * width;
      for (std::size_t j = 0; j < rule.size(); ++j) {
        const auto v = inner(mid + 0.5 * width * rule.nodes[j]);
        for (int c = 0; c < 3; ++c) acc[c] += 0.5 * width * rule.weights[j] * v[c];
      }
    }
    const double rad = std::pow(rho, n - 1);
    g = acc[0] * phi.d1 * phi.d1 * rad;
    l = acc[1] * lap * lap * rad;
    m = acc[2] * std::pow(std::abs(phi.v), p.q) * rad;
  };
  const auto& rule = GaussRule::standard();
  const int panels = std::max(1, nodes / static_cast<int>(rule.size()));
  const double width = 1.0 / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * width;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      double g = 0, l = 0, m = 0;
      radial(mid + 0.5 * width * rule.nodes[j], g, l, m);
      const double w = 0.5 * width * rule.weights[j];
      e.gradient += w * g;
      e.laplacian += w * l;
      e.lq += w * m;
    }
  }
  // |grad u_delta|^2 ~ delta^{-n}, |Lap u_delta|^2 ~ delta^{-n-2}, |u_delta|^q ~ delta^{-q(n-2)/2};
  // the volume element contributes delta^n.
  e.gradient *= omega_sub;
  e.laplacian *= omega_sub * std::pow(delta, -2.0);
  e.lq *= omega_sub * std::pow(delta, n - 0.5 * p.q * (n - 2));
  return e;
}

}  // namespace detail

inline BumpEnergies bump_energies(const ProblemParams& p, const BumpSpec& spec) {
  validate_params(p);
  if (!(spec.delta > 0 && spec.delta < 0.5)) throw std::invalid_argument("bump delta must lie in (0, 1/2)");
  int nodes = std::max(spec.radial_nodes, spec.angular_nodes);
  BumpEnergies prev = detail::bump_energies_at(p, spec.delta, nodes);
  while (true) {
    nodes *= 2;
    BumpEnergies cur = detail::bump_energies_at(p, spec.delta, nodes);
    const double err = std::max({relative_gap(cur.gradient, prev.gradient),
                                 relative_gap(cur.laplacian, prev.laplacian),
                                 relative_gap(cur.lq, prev.lq)});
    cur.relative_error = err;
    if (err <= spec.rel_tol) return cur;
    if (nodes * 2 > spec.max_nodes)
      throw QuadratureError("bump quadrature did not converge (relative change " + std::to_string(err) + ")");
    prev = cur;
  }
}

/// Q~_eps(u_delta) = (eps int |x|^alpha |Lap u_delta|^2 + int |x|^{alpha-2}|grad u_delta|^2)
///                   / (int |x|^{-beta} |u_delta|^q)^{2/q}
inline double bump_quotient(const ProblemParams& p, const BumpEnergies& e, double eps = 0.0) {
  return (eps * e.laplacian + e.gradient) / std::pow(e.lq, 2.0 / p.q);
}

inline double bump_quotient(const ProblemParams& p, const BumpSpec& spec, double eps = 0.0) {
  return bump_quotient(p, bump_energies(p, spec), eps);
}

/// delta-exponent of Q~_0(u_delta) when the weights are frozen at |x| = 1.
inline double bump_scaling_exponent(int n, double q) { return (n - 2) - 2.0 * n / q; }

}  // namespace rellich
