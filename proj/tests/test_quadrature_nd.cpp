#include "generators.hpp"

#include "rellich/quadrature_nd.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <numbers>

using namespace rellich;
using rellich::testing::relative_error;

TEST(GaussRule, IntegratesPolynomialsExactly) {
  const auto& rule = GaussRule::standard();
  EXPECT_EQ(rule.size(), 20u);
  double w = 0, x38 = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    w += rule.weights[i];
    x38 += rule.weights[i] * std::pow(rule.nodes[i], 38);
  }
  EXPECT_NEAR(w, 2.0, 1e-14);
  EXPECT_NEAR(x38, 2.0 / 39.0, 1e-14);
}

TEST(RadialIntegral, HardyMomentOfBubble) {
  // int |x|^{-4} U^2 over R^5 = omega_5 int_0^inf dr / (1 + r^2)
  const double v = radial_integral_value(5, [](double r) {
    const double b = bubble(r, 5);
    return b * b / (r * r * r * r);
  });
  EXPECT_LE(relative_error(v, sphere_measure(5) * std::numbers::pi / 2), 1e-9);
}

TEST(RadialIntegral, CriticalMomentOfBubble) {
  // int U^10 over R^5 = omega_5 B(5/2, 5/2) / 2
  const double v = radial_integral_value(5, [](double r) { return std::pow(bubble(r, 5), 10.0); });
  EXPECT_LE(relative_error(v, sphere_measure(5) * boost::math::beta(2.5, 2.5) / 2), 1e-9);
}

TEST(RadialIntegral, BubbleSolvesCriticalEquation) {
  // Lap^2 U = 105 U^9 in R^5, so int |Lap U|^2 = 105 int U^10
  const double lap = radial_integral_value(5, [](double r) {
    const double l = radial_laplacian(bubble(Jet2::variable(r), 5), r, 5);
    return l * l;
  });
  const double lq = radial_integral_value(5, [](double r) { return std::pow(bubble(r, 5), 10.0); });
  EXPECT_LE(relative_error(lap, 105 * lq), 1e-9);
}

TEST(RadialIntegral, ZeroIntegrandConverges) {
  const auto r = radial_integral(6, [](double) { return 0.0; });
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.value, 0.0);
}

TEST(RadialIntegral, RejectsSmallNodeBudget) {
  RadialQuadSpec spec;
  spec.node_count = 100;
  EXPECT_THROW(radial_integral(5, [](double) { return 1.0; }, spec), std::invalid_argument);
}

TEST(RadialIntegral, NonConvergenceIsReported) {
  RadialQuadSpec spec;
  spec.max_nodes = 1280;
  spec.rel_tol = 1e-15;
  const auto f = [](double r) { return std::cos(1e3 * r) * std::exp(-r); };
  EXPECT_FALSE(radial_integral(5, f, spec).converged);
  EXPECT_THROW(radial_integral_value(5, f, spec), QuadratureError);
}

TEST(QuotientOfU, UnweightedMatchesSobolevQuotient) {
  const auto r = quotient_of_U({5, 0.0, 10.0, 0.0});
  EXPECT_DOUBLE_EQ(r.A_alpha, 0.0);
  EXPECT_LE(relative_error(r.value, r.s_double_star), 1e-14);
  // S** = 105 (int U^10)^{4/5}
  EXPECT_LE(relative_error(r.s_double_star, 105 * std::pow(r.lq_integral, 0.8)), 1e-9);
  EXPECT_LE(r.relative_error, 1e-8);
}

TEST(QuotientOfU, LambdaEntersThroughHardyCoefficient) {
  const auto r0 = quotient_of_U({5, 0.0, 10.0, 0.0});
  const auto r1 = quotient_of_U({5, 0.0, 10.0, 1.0});
  EXPECT_DOUBLE_EQ(r1.B_alpha, 3.0 / 8.0);
  const double shift = (3.0 / 8.0) * r0.hardy_integral / std::pow(r0.lq_integral, 0.2);
  EXPECT_LE(relative_error(r1.value - r0.value, shift), 1e-9);
}

TEST(QuotientOfU, RequiresCriticalExponent) {
  EXPECT_THROW(quotient_of_U({5, 0.0, 4.0, 0.0}), std::invalid_argument);
}

TEST(Constants, HardyCoefficientVanishesAtBothEndsOfRange) {
  EXPECT_DOUBLE_EQ(closed_form_constants(5, 0.0, 0.0).A_alpha, 0.0);
  EXPECT_DOUBLE_EQ(closed_form_constants(5, 4.0, 0.0).A_alpha, 0.0);
}

TEST(ABIdentities, HoldOnAdmissibleGrid) {
  int checked = 0;
  for (int n = 5; n <= 7; ++n) {
    for (int alpha = -2; alpha <= 3; ++alpha) {
      if (alpha <= 4 - n) continue;
      const auto rep = verify_AB_identities(n, alpha);
      EXPECT_TRUE(rep.passed) << "n=" << n << " alpha=" << alpha << " err=" << rep.max_relative_error;
      EXPECT_LE(rep.max_relative_error, 1e-6);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 15);
}

TEST(ABIdentities, RejectInadmissibleWeight) {
  EXPECT_THROW(verify_AB_identities(5, -1.0), std::invalid_argument);
}

TEST(WeightShift, HoldsForGaussianAndRing) {
  const RadialJetFunction gaussian = [](const Jet2& r) { return exp(-(r * r)); };
  const RadialJetFunction ring = [](const Jet2& r) { return r * r * exp(-(r * r)); };
  for (int n : {5, 6, 8}) {
    for (double alpha : {-0.5, 1.0, 2.5}) {
      if (alpha <= 4 - n) continue;
      for (const auto* w : {&gaussian, &ring}) {
        const auto rep = verify_weight_shift_identity(n, alpha, *w);
        EXPECT_TRUE(rep.passed) << "n=" << n << " alpha=" << alpha << " err=" << rep.relative_error;
      }
    }
  }
}

TEST(Bump, MollifierIsCompactlySupported) {
  EXPECT_EQ(bump_mollifier(1.0), 0.0);
  EXPECT_EQ(bump_mollifier(1.5), 0.0);
  EXPECT_GT(bump_mollifier(0.5), 0.0);
  EXPECT_TRUE(std::isfinite(bump_mollifier(0.99999)));
}

TEST(Bump, QuotientDecreasesWithPredictedRate) {
  const ProblemParams p{5, 0.0, 4.0, 0.0};
  EXPECT_DOUBLE_EQ(bump_scaling_exponent(5, 4.0), 0.5);
  std::vector<double> values;
  for (double delta : {0.4, 0.2, 0.1}) {
    BumpSpec spec;
    spec.delta = delta;
    const auto e = bump_energies(p, spec);
    EXPECT_LE(e.relative_error, 1e-6);
    values.push_back(bump_quotient(p, e));
  }
  EXPECT_GT(values[0], values[1]);
  EXPECT_GT(values[1], values[2]);
  const double slope = std::log(values[1] / values[2]) / std::log(2.0);
  EXPECT_NEAR(slope, 0.5, 0.05);
}

TEST(Bump, EnergiesScaleWithDelta) {
  const ProblemParams p{5, 0.0, 4.0, 0.0};
  BumpSpec a, b;
  a.delta = 0.1;
  b.delta = 0.05;
  const auto ea = bump_energies(p, a), eb = bump_energies(p, b);
  // normalized shell bumps: Laplacian energy ~ delta^{-2}, L^q integral ~ delta^{-1}
  EXPECT_NEAR(eb.laplacian / ea.laplacian, 4.0, 0.4);
  EXPECT_NEAR(eb.lq / ea.lq, 2.0, 0.2);
}
