#pragma once

// Parameter admissibility and closed-form constants of the weighted
// Rellich-Sobolev problems
//
//   S_{alpha,q}(lambda) = inf  ( int |x|^alpha |Lap u|^2 + lambda int |x|^{alpha-2} |grad u|^2 )
//                              / ( int |x|^{-beta} |u|^q )^{2/q}
//
// with beta = n - q(n-4+alpha)/2.  Everything rational is evaluated in exact
// rational arithmetic (the double inputs are converted exactly) and rounded once.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rellich {

using Rational = boost::multiprecision::cpp_rational;

/// Raised when (n, alpha, q, lambda) violate an admissibility constraint.
/// The message names the violated constraint.
class InadmissibleParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ProblemParams {
  int n = 5;
  double alpha = 0.0;
  double q = 3.0;
  double lambda = 0.0;
};

struct ParamFlags {
  bool q_subcritical = false;                 // q < 2**
  bool q_critical = false;                    // |q - 2**| <= critical_tolerance
  bool q_supercritical_full = false;          // q > 2**: only the radial problem is meaningful
  bool q_below_first_order_critical = false;  // q < 2*
};

struct ValidatedParams {
  ProblemParams params;
  ParamFlags flags;
};

inline constexpr double critical_tolerance = 1e-12;

inline double two_star(int n) { return 2.0 * n / (n - 2); }
inline double two_double_star(int n) { return 2.0 * n / (n - 4); }

/// Checks n >= 5 and 4 - n < alpha < n.  Used on its own when q is not known.
inline void validate_dimension_and_weight(int n, double alpha) {
  if (n < 5) throw InadmissibleParams("n must be at least 5");
  if (!std::isfinite(alpha) || !(alpha > 4 - n && alpha < n))
    throw InadmissibleParams("alpha must lie in (4-n, n)");
}

inline ValidatedParams validate_params(const ProblemParams& p) {
  validate_dimension_and_weight(p.n, p.alpha);
  if (!std::isfinite(p.q) || !(p.q > 2.0)) throw InadmissibleParams("q must exceed 2");
  if (!std::isfinite(p.lambda)) throw InadmissibleParams("lambda must be finite");

  ValidatedParams v{p, {}};
  const double crit = two_double_star(p.n);
  v.flags.q_critical = std::abs(p.q - crit) <= critical_tolerance;
  v.flags.q_subcritical = !v.flags.q_critical && p.q < crit;
  v.flags.q_supercritical_full = !v.flags.q_critical && p.q > crit;
  v.flags.q_below_first_order_critical = p.q < two_star(p.n);
  return v;
}

inline bool is_critical(const ProblemParams& p) {
  return std::abs(p.q - two_double_star(p.n)) <= critical_tolerance;
}

// ---------------------------------------------------------------------------
// Generic closed forms.  T is double or Rational.

template <class T>
struct DerivedExponentsT {
  T beta;
  T two_star;
  T two_double_star;
  T sigma;  // Emden-Fowler exponent (4 - n - alpha)/2
};

template <class T>
DerivedExponentsT<T> derived_exponents_generic(int n, const T& alpha, const T& q) {
  const T nn = n;
  return {nn - q * (nn - 4 + alpha) / 2, 2 * nn / (nn - 2), 2 * nn / (nn - 4),
          (4 - nn - alpha) / 2};
}

template <class T>
struct ClosedFormsT {
  T delta_alpha;        // optimal weighted Rellich constant
  T delta_tilde_alpha;  // coefficient of |w'|^2 in the reduced Laplacian form (halved)
  T h_tilde_alpha;      // weighted Hardy constant h_{alpha-2}
  T gamma_alpha_formula;
  T a_lambda;
  T b_lambda;
  T A_alpha;
  T B_alpha;
  T lambda_alpha;  // -A_alpha / B_alpha
};

template <class T>
ClosedFormsT<T> closed_forms_generic(int n, const T& alpha, const T& lambda) {
  const T nn = n;
  const T half_n2 = (nn - 2) / 2;
  const T half_a2 = (alpha - 2) / 2;
  const T p = half_n2 * half_n2;
  const T r = half_a2 * half_a2;
  const T hardy_root = (nn - 4 + alpha) / 2;
  const T gamma = (nn - alpha) * (nn - alpha) / 4;

  ClosedFormsT<T> c;
  c.delta_alpha = (p - r) * (p - r);
  c.delta_tilde_alpha = p + r;
  c.h_tilde_alpha = hardy_root * hardy_root;
  c.gamma_alpha_formula = gamma;
  c.a_lambda = p + r + lambda / 2;
  c.b_lambda = (gamma + lambda) * c.h_tilde_alpha;

  const T s = alpha * alpha / 4 - alpha;
  c.A_alpha = s * (s - (nn - 2) * (nn - 2) * (nn - 4) / (2 * (nn - 3)));
  c.B_alpha = c.h_tilde_alpha + (nn - 4) * (nn - 4) / (4 * (nn - 3));
  c.lambda_alpha = -c.A_alpha / c.B_alpha;
  return c;
}

/// c_l of the per-mode symbol: the reduced Laplacian of r^sigma w(-log r) Y_l is
/// r^{sigma-2} (D^2 + (2 - alpha) D + c_l) w with D = d/ds, s = log r.
template <class T>
T mode_constant(int n, const T& alpha, long ell) {
  const T nn = n;
  const T mu = T(ell) * T(ell + n - 2);
  return -(nn - 4 + alpha) * (nn - alpha) / 4 - mu;
}

// ---------------------------------------------------------------------------
// double-valued API (exact rational evaluation, one final rounding)

struct DerivedExponents {
  double beta = 0;
  double two_star = 0;
  double two_double_star = 0;
  double sigma = 0;
};

struct ClosedFormConstants {
  double delta_alpha = 0;
  double delta_tilde_alpha = 0;
  double h_tilde_alpha = 0;
  double gamma_alpha_formula = 0;
  bool gamma_formula_valid = false;  // the formula is guaranteed only for alpha in [0, n)
  double omega_n = 0;
  double a_lambda = 0;
  double b_lambda = 0;
  double lambda_alpha = 0;
  double A_alpha = 0;
  double B_alpha = 0;
};

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
inline double sphere_measure(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline DerivedExponents derived_exponents(const ProblemParams& p) {
  validate_params(p);
  const auto e = derived_exponents_generic<Rational>(p.n, Rational(p.alpha), Rational(p.q));
  return {to_double(e.beta), to_double(e.two_star), to_double(e.two_double_star),
          to_double(e.sigma)};
}

inline ClosedFormConstants closed_form_constants(int n, double alpha, double lambda) {
  validate_dimension_and_weight(n, alpha);
  const auto c = closed_forms_generic<Rational>(n, Rational(alpha), Rational(lambda));
  ClosedFormConstants out;
  out.delta_alpha = to_double(c.delta_alpha);
  out.delta_tilde_alpha = to_double(c.delta_tilde_alpha);
  out.h_tilde_alpha = to_double(c.h_tilde_alpha);
  out.gamma_alpha_formula = to_double(c.gamma_alpha_formula);
  out.gamma_formula_valid = alpha >= 0.0;
  out.omega_n = sphere_measure(n);
  out.a_lambda = to_double(c.a_lambda);
  out.b_lambda = to_double(c.b_lambda);
  out.lambda_alpha = to_double(c.lambda_alpha);
  out.A_alpha = to_double(c.A_alpha);
  out.B_alpha = to_double(c.B_alpha);
  return out;
}

inline ClosedFormConstants closed_form_constants(const ProblemParams& p) {
  return closed_form_constants(p.n, p.alpha, p.lambda);
}

/// lhs - rhs of the Felli-Schneider condition
///   (1/(n-1)) ((n-4+alpha)/2)^2 > 1/(q-2) - 1/(q+2).
/// Only meaningful for q <= 2*.
inline double felli_schneider_margin(const ProblemParams& p) {
  validate_params(p);
  if (p.q > two_star(p.n) + critical_tolerance)
    throw std::domain_error("Felli-Schneider condition requires q <= 2*");
  const Rational alpha(p.alpha), q(p.q);
  const Rational root = (Rational(p.n) - 4 + alpha) / 2;
  const Rational lhs = root * root / (p.n - 1);
  const Rational rhs = 1 / (q - 2) - 1 / (q + 2);
  return to_double(lhs - rhs);
}

inline bool felli_schneider_holds(const ProblemParams& p) {
  validate_params(p);
  if (p.q > two_star(p.n) + critical_tolerance)
    throw std::domain_error("Felli-Schneider condition requires q <= 2*");
  const Rational alpha(p.alpha), q(p.q);
  const Rational root = (Rational(p.n) - 4 + alpha) / 2;
  return root * root / (p.n - 1) > 1 / (q - 2) - 1 / (q + 2);
}

// ---------------------------------------------------------------------------
// gamma_alpha by spherical-harmonic / Fourier reduction.
//
// Mode l, frequency xi, s = xi^2:
//   f_l(s) = [ (s - c_l)^2 + (alpha-2)^2 s ] / [ s + h_tilde + mu_l ].

struct ModeMinimum {
  long ell = 0;
  double value = 0;
  double xi_squared = 0;
};

/// Minimum over s >= 0 of ((s - c)^2 + kappa s) / (s + d), d > 0.
inline ModeMinimum minimize_mode_symbol(double c, double kappa, double d) {
  auto f = [&](double s) { return ((s - c) * (s - c) + kappa * s) / (s + d); };
  ModeMinimum best{0, f(0.0), 0.0};
  // f'(s) = 0  <=>  s^2 + 2 d s + (kappa d - 2 c d - c^2) = 0
  const double disc = (d + c) * (d + c) - kappa * d;
  if (disc >= 0) {
    const double s = -d + std::sqrt(disc);
    if (s > 0) {
      const double v = f(s);
      if (v < best.value) best = {0, v, s};
    }
  }
  return best;
}

struct GammaScan {
  double value = 0;           // inf over modes 0..mode_cap
  long attaining_mode = 0;
  double radial_value = 0;    // l = 0 only
  std::vector<ModeMinimum> per_mode;
  bool cap_warning = false;   // infimum sits at l = mode_cap
  bool monotone_tail = true;  // per-mode minima nondecreasing over the last quarter of modes
  double formula = 0;
  bool formula_valid = false;
  bool disagrees_with_formula = false;
};

inline GammaScan gamma_alpha_numeric(int n, double alpha, long mode_cap = 64,
                                     double tolerance = 1e-12) {
  validate_dimension_and_weight(n, alpha);
  if (mode_cap < 8) throw std::invalid_argument("mode_cap must be at least 8");

  const auto consts = closed_form_constants(n, alpha, 0.0);
  const double kappa = (alpha - 2) * (alpha - 2);

  GammaScan scan;
  scan.formula = consts.gamma_alpha_formula;
  scan.formula_valid = consts.gamma_formula_valid;
  scan.per_mode.reserve(mode_cap + 1);
  scan.value = std::numeric_limits<double>::infinity();
  for (long ell = 0; ell <= mode_cap; ++ell) {
    const double mu = double(ell) * double(ell + n - 2);
    const double c = mode_constant<double>(n, alpha, ell);
    auto m = minimize_mode_symbol(c, kappa, consts.h_tilde_alpha + mu);
    m.ell = ell;
    scan.per_mode.push_back(m);
    scan.value = std::min(scan.value, m.value);
  }
  // lowest mode within tolerance of the infimum
  for (const auto& m : scan.per_mode) {
    if (m.value <= scan.value + tolerance * std::abs(scan.value)) {
      scan.attaining_mode = m.ell;
      break;
    }
  }
  scan.radial_value = scan.per_mode.front().value;
  scan.cap_warning = scan.attaining_mode == mode_cap;
  const long tail_start = mode_cap - mode_cap / 4;
  for (long ell = tail_start + 1; ell <= mode_cap; ++ell)
    if (scan.per_mode[ell].value < scan.per_mode[ell - 1].value) scan.monotone_tail = false;
  scan.disagrees_with_formula =
      std::abs(scan.value - scan.formula) > 1e-8 * std::max(1.0, scan.formula);
  return scan;
}

inline GammaScan gamma_alpha_numeric(const ProblemParams& p, long mode_cap = 64,
                                     double tolerance = 1e-12) {
  return gamma_alpha_numeric(p.n, p.alpha, mode_cap, tolerance);
}

}  // namespace rellich
