#pragma once

// Second-order forward-mode jets: (f, f', f'') of a scalar function of one
// variable.  Radial test functions are written once as templates and evaluated
// either on double or on Jet2 to get exact derivatives for Laplacians.

#include <cmath>

namespace rellich {

struct Jet2 {
  double v = 0;
  double d1 = 0;
  double d2 = 0;

  constexpr Jet2() = default;
  constexpr Jet2(double value) : v(value) {}  // NOLINT: constants promote implicitly
  constexpr Jet2(double value, double first, double second) : v(value), d1(first), d2(second) {}

  static constexpr Jet2 variable(double x) { return {x, 1.0, 0.0}; }

  Jet2& operator+=(const Jet2& o) { v += o.v; d1 += o.d1; d2 += o.d2; return *this; }
  Jet2& operator-=(const Jet2& o) { v -= o.v; d1 -= o.d1; d2 -= o.d2; return *this; }
  Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
  Jet2& operator/=(const Jet2& o) { return *this = *this / o; }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator-(const Jet2& a) { return {-a.v, -a.d1, -a.d2}; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2};
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    const double q1 = (a.d1 - q * b.d1) * inv;
    const double q2 = (a.d2 - 2 * q1 * b.d1 - q * b.d2) * inv;
    return {q, q1, q2};
  }
};

// Chain rule for g(f) with g, g', g'' evaluated at f.v
inline Jet2 compose(const Jet2& f, double g, double g1, double g2) {
  return {g, g1 * f.d1, g2 * f.d1 * f.d1 + g1 * f.d2};
}

inline Jet2 exp(const Jet2& f) {
  const double e = std::exp(f.v);
  return compose(f, e, e, e);
}

inline Jet2 log(const Jet2& f) { return compose(f, std::log(f.v), 1 / f.v, -1 / (f.v * f.v)); }

inline Jet2 pow(const Jet2& f, double p) {
  if (p == 0) return {1.0, 0.0, 0.0};
  const double g = std::pow(f.v, p);
  const double g1 = p * std::pow(f.v, p - 1);
  const double g2 = p * (p - 1) * std::pow(f.v, p - 2);
  return compose(f, g, g1, g2);
}

inline Jet2 sqrt(const Jet2& f) { return pow(f, 0.5); }

inline Jet2 cos(const Jet2& f) {
  return compose(f, std::cos(f.v), -std::sin(f.v), -std::cos(f.v));
}

inline Jet2 abs(const Jet2& f) { return f.v < 0 ? -f : f; }

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.v; }

/// Radial Laplacian f'' + (n-1) f'/r from the jet of f at r.
inline double radial_laplacian(const Jet2& f, double r, int n) { return f.d2 + (n - 1) * f.d1 / r; }

}  // namespace rellich
