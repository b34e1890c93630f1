#pragma once

// Emden-Fowler reduction u(x) = |x|^{(4-n-alpha)/2} w(-log|x|) and the discrete
// 1D quotient machinery shared by the solvers.
//
// Grid functions live on t_i = -L + i h, i = 0..N, and are extended by zero
// outside [-L, L].  The discrete energy of a density
//
//     c2 |w''|^2 + c1 |w'|^2 + c0 |w|^2
//
// is the lattice energy of that zero extension:
//
//     E(w) = h [ c2 sum_{i=0}^{N} (D2 w)_i^2 + c1 sum_{edges} (D1 w)_{i+1/2}^2 + c0 sum_i w_i^2 ]
//
// with the 3-point second difference at nodes and the first difference on
// edges (a central difference at the half nodes).  Both quadratures are
// second-order accurate, and E(w) = h w^T A w with A symmetric pentadiagonal.

#include "rellich/constants.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rellich {

class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double half_length, int intervals) : half_length_(half_length), intervals_(intervals) {
    if (!(half_length > 0)) throw std::invalid_argument("grid half length must be positive");
    if (intervals < 64 || intervals % 2 != 0)
      throw std::invalid_argument("grid point count N must be even and at least 64");
  }

  double half_length() const { return half_length_; }
  int intervals() const { return intervals_; }
  int size() const { return intervals_ + 1; }
  double spacing() const { return 2.0 * half_length_ / intervals_; }
  double node(int i) const { return -half_length_ + i * spacing(); }
  int center_index() const { return intervals_ / 2; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double half_length_ = 20.0;
  int intervals_ = 4096;
};

struct Profile1D {
  Grid1D grid;
  std::vector<double> values;  // size N + 1

  static Profile1D zeros(const Grid1D& g) { return {g, std::vector<double>(g.size(), 0.0)}; }

  /// Samples f at the nodes and clamps both endpoints to zero.
  template <class F>
  static Profile1D sample(const Grid1D& g, F&& f) {
    Profile1D p = zeros(g);
    for (int i = 1; i < g.intervals(); ++i) p.values[i] = f(g.node(i));
    return p;
  }
};

/// Coefficients of c2 |w''|^2 + c1 |w'|^2 + c0 |w|^2.
struct EnergyDensity {
  double c2 = 0;
  double c1 = 0;
  double c0 = 0;
};

enum class FormOrder { second, fourth };

/// Reduced 1D quotient
///   sphere_factor * int(density) / (int |w|^q)^{2/q}.
struct ReducedForm {
  FormOrder order = FormOrder::fourth;
  EnergyDensity density;
  double q = 3;
  double sphere_factor = 1;

  static ReducedForm fourth(double a, double b, double q, double sphere_factor = 1.0) {
    return {FormOrder::fourth, {1.0, 2.0 * a, b}, q, sphere_factor};
  }
  static ReducedForm second(double h, double q, double sphere_factor = 1.0) {
    return {FormOrder::second, {0.0, 1.0, h}, q, sphere_factor};
  }

  // (a, b) of w''^2 + 2a w'^2 + b w^2, or h of w'^2 + h w^2
  double a() const { return density.c1 / (2.0 * (density.c2 > 0 ? density.c2 : 1.0)); }
  double b() const { return density.c0 / (density.c2 > 0 ? density.c2 : 1.0); }
  double h() const { return density.c0 / density.c1; }

  bool admissible() const {
    if (!(q > 2)) return false;
    if (order == FormOrder::second) return density.c2 == 0 && density.c1 > 0 && density.c0 > 0;
    return density.c2 > 0 && density.c1 > 0 && density.c0 > 0;
  }
};

inline ReducedForm reduce_fourth_order(const ProblemParams& p) {
  validate_params(p);
  const auto c = closed_form_constants(p);
  if (!(p.lambda > -c.gamma_alpha_formula) || !(c.b_lambda > 0))
    throw InadmissibleParams("lambda must exceed -(n-alpha)^2/4 for the radial problem");
  return ReducedForm::fourth(c.a_lambda, c.b_lambda, p.q, std::pow(c.omega_n, (p.q - 2) / p.q));
}

inline ReducedForm reduce_second_order(const ProblemParams& p) {
  validate_params(p);
  const auto c = closed_form_constants(p);
  return ReducedForm::second(c.h_tilde_alpha, p.q, std::pow(c.omega_n, 1.0 - 2.0 / p.q));
}

/// h_tilde_alpha -> 0 as alpha -> 4-n; the second-order form degenerates there.
inline bool second_order_degenerate(const ReducedForm& f, double threshold = 1e-8) {
  return f.order == FormOrder::second && f.density.c0 < threshold;
}

/// Slowest exponential decay rate of solutions of c2 w'''' - c1 w'' + c0 w = 0.
inline double min_decay_rate(const EnergyDensity& d) {
  if (d.c2 == 0) return std::sqrt(d.c0 / d.c1);
  const std::complex<double> disc = std::sqrt(std::complex<double>(d.c1 * d.c1 - 4 * d.c2 * d.c0));
  double rate = std::numeric_limits<double>::infinity();
  for (const auto& k2 : {(d.c1 + disc) / (2 * d.c2), (d.c1 - disc) / (2 * d.c2)}) {
    const double re = std::sqrt(k2).real();
    if (re > 0) rate = std::min(rate, re);
  }
  return rate;
}

inline double default_half_length(const ReducedForm& f) {
  return std::max(20.0, 40.0 / min_decay_rate(f.density));
}

// ---------------------------------------------------------------------------
// Emden-Fowler transform on log-spaced nodes r_i = exp(-t_i)

inline double ef_sigma(const ProblemParams& p) { return 0.5 * (4.0 - p.n - p.alpha); }

/// w_i = r_i^{-sigma} u(r_i).  Endpoints are not clamped.
inline Profile1D ef_transform_radial(const std::vector<double>& u_at_nodes, const Grid1D& g,
                                     const ProblemParams& p) {
  if (static_cast<int>(u_at_nodes.size()) != g.size())
    throw std::invalid_argument("radial samples must match the grid size");
  const double sigma = ef_sigma(p);
  Profile1D w = Profile1D::zeros(g);
  for (int i = 0; i < g.size(); ++i) w.values[i] = std::exp(sigma * g.node(i)) * u_at_nodes[i];
  return w;
}

/// u(r_i) = r_i^{sigma} w_i
inline std::vector<double> ef_inverse_radial(const Profile1D& w, const ProblemParams& p) {
  const double sigma = ef_sigma(p);
  std::vector<double> u(w.values.size());
  for (int i = 0; i < w.grid.size(); ++i) u[i] = w.values[i] / std::exp(sigma * w.grid.node(i));
  return u;
}

// ---------------------------------------------------------------------------
// Discrete forms

struct DiscreteForms {
  double second_derivative = 0;  // h sum (D2 w)^2
  double first_derivative = 0;   // h sum (D1 w)^2
  double value = 0;              // h sum w^2
};

inline DiscreteForms discrete_forms(const Profile1D& w) {
  const auto& v = w.values;
  const int n = static_cast<int>(v.size());
  const double h = w.grid.spacing();
  auto at = [&](int i) { return (i < 0 || i >= n) ? 0.0 : v[i]; };
  DiscreteForms f;
  for (int i = -1; i <= n; ++i) {
    const double d2 = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h);
    f.second_derivative += d2 * d2;
  }
  for (double x : v) f.value += x * x;
  for (int i = -1; i < n; ++i) {
    const double d1 = (at(i + 1) - at(i)) / h;
    f.first_derivative += d1 * d1;
  }
  f.second_derivative *= h;
  f.first_derivative *= h;
  f.value *= h;
  return f;
}

inline double discrete_energy(const EnergyDensity& d, const Profile1D& w) {
  const auto f = discrete_forms(w);
  return d.c2 * f.second_derivative + d.c1 * f.first_derivative + d.c0 * f.value;
}

/// h sum |w_i|^q (trapezoidal; the clamped endpoints carry no mass)
inline double discrete_lq_integral(const Profile1D& w, double q) {
  double s = 0;
  for (double x : w.values) s += std::pow(std::abs(x), q);
  return s * w.grid.spacing();
}

inline double discrete_quotient(const ReducedForm& form, const Profile1D& w) {
  const double denom = discrete_lq_integral(w, form.q);
  if (!(denom > 0)) throw std::domain_error("quotient of the zero profile is undefined");
  return form.sphere_factor * discrete_energy(form.density, w) / std::pow(denom, 2.0 / form.q);
}

/// Matrix A of E(w) = h w^T A w restricted to the interior nodes 1..N-1.
class DiscreteOperator {
 public:
  using Matrix = Eigen::SparseMatrix<double>;
  using Vector = Eigen::VectorXd;

  DiscreteOperator(const EnergyDensity& d, const Grid1D& g) : grid_(g), density_(d) {
    const int m = g.intervals() - 1;
    const double h = g.spacing();
    const double s2 = d.c2 / (h * h * h * h);
    const double s1 = d.c1 / (h * h);
    // D2^T D2 over nodes 0..N of the zero extension: stencil (1, -4, 6, -4, 1)
    // D1^T D1 over edges: stencil (-1, 2, -1)
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(5 * m);
    for (int i = 0; i < m; ++i) {
      t.emplace_back(i, i, 6.0 * s2 + 2.0 * s1 + d.c0);
      if (i + 1 < m) {
        t.emplace_back(i, i + 1, -4.0 * s2 - s1);
        t.emplace_back(i + 1, i, -4.0 * s2 - s1);
      }
      if (i + 2 < m) {
        t.emplace_back(i, i + 2, s2);
        t.emplace_back(i + 2, i, s2);
      }
    }
    matrix_.resize(m, m);
    matrix_.setFromTriplets(t.begin(), t.end());
  }

  const Grid1D& grid() const { return grid_; }
  const EnergyDensity& density() const { return density_; }
  const Matrix& matrix() const { return matrix_; }

  Vector interior(const Profile1D& w) const {
    return Eigen::Map<const Vector>(w.values.data() + 1, grid_.intervals() - 1);
  }
  Profile1D embed(const Vector& x) const {
    Profile1D w = Profile1D::zeros(grid_);
    Eigen::Map<Vector>(w.values.data() + 1, grid_.intervals() - 1) = x;
    return w;
  }

  Vector apply(const Vector& x) const { return matrix_ * x; }

  struct EnergyEvaluation {
    double value = 0;
    double rounding_bound = 0;  // first-order bound on the floating-point error of value
  };

  /// h x^T A x, summed as squares of differences (the stencil form x^T (A x)
  /// loses about 1/h^4 relative accuracy to cancellation).
  EnergyEvaluation energy_evaluation(const Vector& x) const {
    const Eigen::Index m = x.size();
    const double h = grid_.spacing();
    auto at = [&](Eigen::Index i) { return (i < 0 || i >= m) ? 0.0 : x[i]; };
    const double eps = std::numeric_limits<double>::epsilon();
    double s2 = 0, b2 = 0, s1 = 0, b1 = 0, s0 = 0;
    for (Eigen::Index i = -1; i <= m; ++i) {
      const double d2 = at(i + 1) - 2.0 * at(i) + at(i - 1);
      s2 += d2 * d2;
      b2 += std::abs(d2) * (std::abs(at(i + 1)) + 2.0 * std::abs(at(i)) + std::abs(at(i - 1)));
    }
    for (Eigen::Index i = -1; i < m; ++i) {
      const double d1 = at(i + 1) - at(i);
      s1 += d1 * d1;
      b1 += std::abs(d1) * (std::abs(at(i + 1)) + std::abs(at(i)));
    }
    for (Eigen::Index i = 0; i < m; ++i) s0 += x[i] * x[i];
    const double w2 = density_.c2 / (h * h * h), w1 = density_.c1 / h, w0 = density_.c0 * h;
    EnergyEvaluation e;
    e.value = w2 * s2 + w1 * s1 + w0 * s0;
    e.rounding_bound = 8 * eps * (std::abs(w2) * (b2 + s2) + std::abs(w1) * (b1 + s1) + std::abs(w0) * s0 +
                                  std::abs(e.value) * static_cast<double>(m));
    return e;
  }

  double energy(const Vector& x) const { return energy_evaluation(x).value; }

  Vector solve(const Vector& rhs) const {
    if (!factorized_) factorize();
    return llt_.solve(rhs);
  }

 private:
  void factorize() const {
    llt_.compute(matrix_);
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("discrete operator is not positive definite");
    factorized_ = true;
  }

  Grid1D grid_;
  EnergyDensity density_;
  Matrix matrix_;
  mutable Eigen::SimplicialLDLT<Matrix> llt_;
  mutable bool factorized_ = false;
};

// ---------------------------------------------------------------------------
// Profile text format:
//   # rellich-profile L=<L> N=<N> [n=<n> alpha=<alpha> q=<q> lambda=<lambda>]
//   <t_i> <w_i>          (N+1 lines, 17 significant digits)

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_profile(std::ostream& os, const Profile1D& w,
                          const std::optional<ProblemParams>& params = std::nullopt) {
  os << "# rellich-profile L=" << format_double(w.grid.half_length())
     << " N=" << w.grid.intervals();
  if (params) {
    os << " n=" << params->n << " alpha=" << format_double(params->alpha)
       << " q=" << format_double(params->q) << " lambda=" << format_double(params->lambda);
  }
  os << '\n';
  for (int i = 0; i < w.grid.size(); ++i)
    os << format_double(w.grid.node(i)) << ' ' << format_double(w.values[i]) << '\n';
}

struct ProfileFile {
  Profile1D profile;
  std::optional<ProblemParams> params;
};

inline ProfileFile read_profile(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# rellich-profile", 0) != 0)
    throw std::runtime_error("missing rellich-profile header");
  std::istringstream hs(header.substr(17));
  double L = 0;
  int N = 0;
  ProblemParams p;
  int found = 0;
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed header token: " + tok);
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "L") L = std::stod(val);
    else if (key == "N") N = std::stoi(val);
    else if (key == "n") { p.n = std::stoi(val); ++found; }
    else if (key == "alpha") { p.alpha = std::stod(val); ++found; }
    else if (key == "q") { p.q = std::stod(val); ++found; }
    else if (key == "lambda") { p.lambda = std::stod(val); ++found; }
    else throw std::runtime_error("unknown header key: " + key);
  }
  ProfileFile out{Profile1D::zeros(Grid1D(L, N)), std::nullopt};
  if (found == 4) out.params = p;
  for (int i = 0; i <= N; ++i) {
    double t = 0, v = 0;
    if (!(is >> t >> v)) throw std::runtime_error("truncated profile data");
    out.profile.values[i] = v;
  }
  return out;
}

}  // namespace rellich
