#include "generators.hpp"

#include "rellich/symmetry_breaking.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace rellich;
using rellich::testing::ParamGenerator;

namespace {

bool fired(const PhaseVerdict& v, Criterion c) {
  return std::find(v.criteria_fired.begin(), v.criteria_fired.end(), c) != v.criteria_fired.end();
}

}  // namespace

TEST(Names, VerdictsAndCriteria) {
  EXPECT_STREQ(to_string(Verdict::radial_breaks_certified), "radial_breaks_certified");
  EXPECT_STREQ(to_string(Verdict::no_breaking_evidence), "no_breaking_evidence");
  EXPECT_STREQ(to_string(Verdict::inconclusive), "inconclusive");
  EXPECT_STREQ(to_string(Criterion::FS_condition), "FS_condition");
  EXPECT_STREQ(to_string(Criterion::critical_nonattainment), "critical_nonattainment");
}

TEST(CriticalBound, UnweightedBoundIsSobolevConstant) {
  const auto b = critical_upper_bound({5, 0.0, 10.0, 0.0});
  EXPECT_FALSE(b.strictly_below);
  EXPECT_NEAR(b.value, b.s_double_star, 1e-12 * b.value);
}

TEST(CriticalBound, BelowThresholdDropsUnderSobolevConstant) {
  const auto b = critical_upper_bound({5, 2.0, 10.0, -1.4});
  EXPECT_NEAR(b.lambda_alpha, -26.0 / 19.0, 1e-14);
  EXPECT_TRUE(b.strictly_below);
  EXPECT_LT(b.value, b.s_double_star);
  const auto above = critical_upper_bound({5, 2.0, 10.0, -1.3});
  EXPECT_FALSE(above.strictly_below);
  EXPECT_GT(above.value, above.s_double_star);
}

TEST(CriticalBound, RequiresCriticalExponent) {
  EXPECT_THROW(critical_upper_bound({5, 0.0, 6.0, 0.0}), std::invalid_argument);
}

TEST(Verdict, CriticalUnweightedPositiveLambdaIsCertified) {
  const auto v = verdict_at({5, 0.0, 10.0, 1.0});
  EXPECT_EQ(v.verdict, Verdict::radial_breaks_certified);
  EXPECT_TRUE(fired(v, Criterion::critical_nonattainment));
  ASSERT_TRUE(v.margin && v.tolerance);
  EXPECT_GT(*v.margin, 3 * *v.tolerance);
}

TEST(Verdict, CriticalUnweightedZeroLambdaIsNotCertified) {
  const auto v = verdict_at({5, 0.0, 10.0, 0.0});
  EXPECT_NE(v.verdict, Verdict::radial_breaks_certified);
}

TEST(Verdict, ThresholdAloneDoesNotCertify) {
  const auto v = verdict_at({5, 2.0, 10.0, -1.4});
  EXPECT_TRUE(fired(v, Criterion::lambda_alpha_threshold));
  EXPECT_FALSE(fired(v, Criterion::upper_bound_vs_radial));
  EXPECT_EQ(v.verdict, Verdict::no_breaking_evidence);
  ASSERT_TRUE(v.s_radial && v.s_upper_bound);
  EXPECT_LT(*v.s_radial, *v.s_upper_bound);
}

TEST(Verdict, SubcriticalLargeLambdaIsCertifiedByBump) {
  const auto v = verdict_at({5, 0.0, 4.0, 1e6});
  EXPECT_EQ(v.verdict, Verdict::radial_breaks_certified);
  EXPECT_TRUE(fired(v, Criterion::upper_bound_vs_radial));
  ASSERT_TRUE(v.bump_delta.has_value());
  EXPECT_LT(*v.bump_delta, 0.1);
}

TEST(Verdict, SubcriticalModerateLambdaIsNotCertified) {
  const auto v = verdict_at({5, 0.0, 4.0, 1.0});
  EXPECT_NE(v.verdict, Verdict::radial_breaks_certified);
  ASSERT_TRUE(v.margin.has_value());
  EXPECT_LT(*v.margin, 0.0);
}

TEST(Verdict, LowExponentUsesQualitativeCondition) {
  const auto yes = verdict_at({5, 3.0, 3.0, 0.0});
  EXPECT_EQ(yes.verdict, Verdict::breaks_for_large_lambda);
  EXPECT_TRUE(fired(yes, Criterion::FS_condition));
  const auto no = verdict_at({5, 0.0, 3.0, 0.0});
  EXPECT_EQ(no.verdict, Verdict::no_breaking_evidence);
  EXPECT_TRUE(no.criteria_fired.empty());
}

TEST(Verdict, SupercriticalIsInconclusive) {
  EXPECT_EQ(verdict_at({5, 0.0, 12.0, 1.0}).verdict, Verdict::inconclusive);
}

TEST(Verdict, RejectsNonCoerciveLambda) {
  EXPECT_THROW(verdict_at({5, 0.0, 4.0, -7.0}), InadmissibleParams);
}

TEST(VerdictProperty, CertificationAlwaysCarriesMargin) {
  ParamGenerator gen(31);
  for (int k = 0; k < 6; ++k) {
    const double alpha = gen.uniform(-0.5, 3.0);
    const auto v = verdict_at({5, alpha, 10.0, gen.uniform(-1.0, 3.0)});
    if (v.verdict == Verdict::radial_breaks_certified) {
      ASSERT_TRUE(v.margin && v.tolerance);
      EXPECT_GT(*v.margin, 3 * *v.tolerance);
      EXPECT_FALSE(v.criteria_fired.empty());
    }
  }
}

TEST(VerdictProperty, LowExponentNeverCertifiesNumerically) {
  ParamGenerator gen(32);
  for (int k = 0; k < 200; ++k) {
    const int n = gen.dimension(5, 10);
    const double alpha = gen.alpha(n, 0.01);
    const double q = gen.uniform(2.05, two_star(n));
    const auto v = verdict_at({n, alpha, q, gen.lambda(n, alpha)});
    EXPECT_NE(v.verdict, Verdict::radial_breaks_certified);
    EXPECT_EQ(v.verdict == Verdict::breaks_for_large_lambda, felli_schneider_holds(v.params));
  }
}

TEST(VerdictProperty, CriticalMarginGrowsWithLambda) {
  double previous = -INFINITY;
  for (double lambda : {0.25, 1.0, 4.0}) {
    const auto v = verdict_at({5, 0.0, 10.0, lambda});
    ASSERT_TRUE(v.margin.has_value());
    EXPECT_GT(*v.margin, previous);
    previous = *v.margin;
  }
}

TEST(Chain, UnweightedChainIsIdentity) {
  const ProblemParams p{5, 0.0, 10.0, 1.0};
  const auto s = semicontinuity_chain(p, closed_form_constants(p).gamma_alpha_formula, 117.9649);
  EXPECT_DOUBLE_EQ(s.tau_alpha, 1.0);
  EXPECT_DOUBLE_EQ(s.eps_alpha, 0.0);
  EXPECT_DOUBLE_EQ(s.K_alpha, 1.0);
  EXPECT_DOUBLE_EQ(s.theta_q, 1.0);
  EXPECT_NEAR(s.radial_lower_bound, 117.9649, 1e-10);
}

TEST(Chain, LowerBoundStaysBelowRadialInfimum) {
  SolverConfig cfg;
  const double reference = solve_fourth(reduce_fourth_order({5, 0.0, 10.0, 1.0}), cfg).infimum;
  for (double q : {10.0, 6.0}) {
    const ProblemParams p{5, 0.1, q, 1.0};
    const auto s = semicontinuity_chain(p, closed_form_constants(p).gamma_alpha_formula, reference);
    const auto r = solve_fourth(reduce_fourth_order(p), cfg);
    ASSERT_TRUE(r.converged);
    EXPECT_LE(s.radial_lower_bound, r.infimum) << "q=" << q;
  }
}

TEST(Chain, RejectsBadInputs) {
  EXPECT_THROW(semicontinuity_chain({5, 0.0, 10.0, -1.0}, 6.25, 1.0), std::invalid_argument);
  EXPECT_THROW(semicontinuity_chain({5, 0.0, 10.0, 1.0}, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(semicontinuity_chain({5, 0.0, 11.0, 1.0}, 6.25, 1.0), std::invalid_argument);
}

TEST(PhaseScan, EmptyGridGivesNoVerdicts) {
  PhaseGrid grid;
  grid.alphas = {0.0};
  grid.qs = {};
  grid.lambdas = {1.0};
  EXPECT_TRUE(phase_scan(grid, {}).empty());
}

TEST(PhaseScan, ParallelScanIsDeterministicAndCached) {
  PhaseGrid grid;
  grid.alphas = {0.0, 3.0};
  grid.qs = {3.0, 10.0};
  grid.lambdas = {0.0, 1.0};
  VerdictCache cache;
  PhaseScanStats first, second;
  const auto serial = phase_scan(grid, {}, nullptr, 1);
  const auto parallel = phase_scan(grid, {}, &cache, 4, &first);
  ASSERT_EQ(serial.size(), 8u);
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].verdict, parallel[i].verdict);
    EXPECT_EQ(serial[i].params.alpha, parallel[i].params.alpha);
    EXPECT_EQ(serial[i].s_radial, parallel[i].s_radial);
    EXPECT_EQ(serial[i].margin, parallel[i].margin);
  }
  EXPECT_EQ(first.computed, 8u);
  const auto again = phase_scan(grid, {}, &cache, 4, &second);
  EXPECT_EQ(second.computed, 0u);
  EXPECT_EQ(second.cached, 8u);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(again[i].margin, serial[i].margin);
}
