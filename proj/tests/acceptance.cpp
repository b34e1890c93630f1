// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "generators.hpp"

#include "rellich/rellich.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace rellich;
using rellich::testing::ParamGenerator;
using rellich::testing::relative_error;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome constant_identities() {
  ParamGenerator gen(1);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    const int n = gen.dimension(5, 10);
    const double alpha = gen.alpha(n);
    const double lambda = gen.lambda(n, alpha);
    // a^2 - b cancels catastrophically near lambda = (n-2)(alpha-2); evaluate it exactly
    const Rational ra(alpha), rl(lambda);
    const auto e = closed_forms_generic<Rational>(n, ra, rl);
    const Rational half_gap = Rational(n - 2) * (ra - 2) / 2 - rl / 2;
    const auto c = closed_form_constants(n, alpha, lambda);
    worst = std::max({worst,
                      relative_error(to_double(e.a_lambda * e.a_lambda - e.b_lambda), to_double(half_gap * half_gap)),
                      relative_error(c.b_lambda, c.delta_alpha + lambda * c.h_tilde_alpha)});
  }
  return {worst <= 1e-12, "max rel err " + fmt(worst)};
}

Outcome mode_symbol() {
  int checked = 0, failed = 0;
  for (int n : {5, 6, 7})
    for (int k = 1;; ++k) {
      const Rational alpha = Rational(4 - n) + Rational(k, 20);
      if (alpha >= n) break;
      const auto c = closed_forms_generic<Rational>(n, alpha, Rational(0));
      const Rational c0 = mode_constant<Rational>(n, alpha, 0);
      if (c0 * c0 != c.delta_alpha || -2 * c0 + (alpha - 2) * (alpha - 2) != 2 * c.delta_tilde_alpha) ++failed;
      ++checked;
    }
  return {failed == 0, std::to_string(checked) + " exact checks, " + std::to_string(failed) + " failed"};
}

Outcome gamma_scan() {
  double worst_min = 0, worst_radial = 0;
  for (int n : {5, 6, 7}) {
    for (double alpha : {0.0, 1.0, 2.0, 3.0}) {
      const auto s = gamma_alpha_numeric(n, alpha);
      worst_min = std::max(worst_min, relative_error(s.value, 0.25 * (n - alpha) * (n - alpha)));
    }
    for (int k = 1;; ++k) {
      const double alpha = 4 - n + 0.05 * k;
      if (alpha >= n - 1e-9) break;
      const auto s = gamma_alpha_numeric(n, alpha);
      worst_radial = std::max(worst_radial, relative_error(s.radial_value, 0.25 * (n - alpha) * (n - alpha)));
    }
  }
  return {worst_min <= 1e-8 && worst_radial <= 1e-10,
          "mode-scan err " + fmt(worst_min) + ", radial-mode err " + fmt(worst_radial)};
}

Outcome second_order_oracle() {
  SolverConfig cfg;
  cfg.grid = Grid1D(40.0, 4096);
  const auto r = solve_second(ReducedForm::second(0.25, 3.0), cfg);
  const double exact = std::cbrt(9.0 / 40.0);
  const double err = relative_error(r.unscaled_infimum, exact);
  const auto s = scale_to_solution(r);
  double sup = 0;
  for (int i = 0; i < s.profile.grid.size(); ++i) {
    const double t = s.profile.grid.node(i);
    const double sech = 1 / std::cosh(t / 4);
    sup = std::max(sup, std::abs(s.profile.values[i] - 0.375 * sech * sech));
  }
  return {r.converged && err <= 1e-4 && sup <= 1e-3,
          "infimum " + fmt(r.unscaled_infimum) + " rel err " + fmt(err) + ", sup err " + fmt(sup)};
}

Outcome cross_pipeline() {
  const ProblemParams p{5, 0.0, 10.0, 0.0};
  const auto r = solve_fourth(reduce_fourth_order(p), {});
  const auto u = quotient_of_U(p);
  const double err = relative_error(r.infimum, u.value);
  return {r.converged && err <= 1e-3 && r.el_residual <= 1e-6,
          "S_rad " + fmt(r.infimum) + " vs " + fmt(u.value) + " rel err " + fmt(err) + ", residual " +
              fmt(r.el_residual)};
}

Outcome lambda_alpha_pattern() {
  int failed = 0, checked = 0;
  for (int n = 5; n <= 10; ++n) {
    for (int k = 1;; ++k) {
      const Rational alpha = Rational(4 - n) + Rational(k, 20);
      if (alpha >= n) break;
      const auto c = closed_forms_generic<Rational>(n, alpha, Rational(0));
      const Rational floor = -(n - alpha) * (n - alpha) / 4;
      bool ok;
      if (alpha == 0 || alpha == 4) ok = c.lambda_alpha == 0;
      else if (alpha < 0 || alpha > 4) ok = c.lambda_alpha > 0;
      else ok = c.lambda_alpha < 0 && c.lambda_alpha > floor;
      failed += !ok;
      ++checked;
    }
  }
  return {failed == 0, std::to_string(checked) + " weights, " + std::to_string(failed) + " failed"};
}

Outcome emden_fowler_forms() {
  const ProblemParams p{5, 1.0, 3.0, 0.0};
  const auto c = closed_form_constants(p);
  const double sigma = ef_sigma(p), beta = derived_exponents(p).beta;
  const Grid1D grid(20.0, 4096);
  const std::vector<std::function<Jet2(const Jet2&)>> profiles{
      [](const Jet2& t) { return exp(-(t * t) / 16.0); },
      [](const Jet2& t) { return exp(-((t - 3.0) * (t - 3.0)) / 20.0); },
      [](const Jet2& t) { return (1.0 + t * t / 10.0) * exp(-(t * t) / 18.0); }};
  double worst = 0;
  for (const auto& w : profiles) {
    const auto prof = Profile1D::sample(grid, [&](double t) { return w(Jet2(t)).v; });
    const auto f = discrete_forms(prof);
    auto u = [&](double r) {
      const Jet2 x = Jet2::variable(r);
      return pow(x, sigma) * w(-log(x));
    };
    const double lap = radial_integral_value(p.n, [&](double r) {
      const double l = radial_laplacian(u(r), r, p.n);
      return std::pow(r, p.alpha) * l * l;
    });
    const double grad = radial_integral_value(p.n, [&](double r) {
      const double d = u(r).d1;
      return std::pow(r, p.alpha - 2) * d * d;
    });
    const double lq = radial_integral_value(
        p.n, [&](double r) { return std::pow(r, -beta) * std::pow(std::abs(u(r).v), p.q); });
    worst = std::max(
        {worst,
         relative_error(lap, c.omega_n * (f.second_derivative + 2 * c.delta_tilde_alpha * f.first_derivative +
                                          c.delta_alpha * f.value)),
         relative_error(grad, c.omega_n * (f.first_derivative + c.h_tilde_alpha * f.value)),
         relative_error(lq, c.omega_n * discrete_lq_integral(prof, p.q))});
  }
  return {worst <= 1e-6, "max rel err " + fmt(worst)};
}

Outcome weight_identities() {
  double worst_ab = 0, worst_shift = 0;
  bool all = true;
  for (int n = 5; n <= 7; ++n)
    for (int alpha = -2; alpha <= 3; ++alpha) {
      if (alpha <= 4 - n) continue;
      const auto rep = verify_AB_identities(n, alpha);
      all = all && rep.passed;
      worst_ab = std::max(worst_ab, rep.max_relative_error);
    }
  const RadialJetFunction gaussian = [](const Jet2& r) { return exp(-(r * r)); };
  const RadialJetFunction ring = [](const Jet2& r) { return r * r * exp(-(r * r)); };
  for (int n : {5, 6, 8})
    for (double alpha : {-0.5, 1.0, 2.5}) {
      if (alpha <= 4 - n) continue;
      for (const auto* w : {&gaussian, &ring}) {
        const auto rep = verify_weight_shift_identity(n, alpha, *w);
        all = all && rep.passed;
        worst_shift = std::max(worst_shift, rep.relative_error);
      }
    }
  return {all && worst_ab <= 1e-6 && worst_shift <= 1e-8,
          "A/B err " + fmt(worst_ab) + ", weight-shift err " + fmt(worst_shift)};
}

Outcome monotone_and_invariant() {
  double previous = -INFINITY;
  bool monotone = true, converged = true;
  std::string values;
  for (double lambda : {-1.0, 0.0, 1.0, 5.0}) {
    const auto r = solve_fourth(reduce_fourth_order({5, 0.0, 4.0, lambda}), {});
    converged = converged && r.converged;
    monotone = monotone && r.infimum >= previous;
    previous = r.infimum;
    values += (values.empty() ? "" : " ") + fmt(r.infimum);
  }
  ParamGenerator gen(9);
  const Grid1D g(20.0, 2048);
  double worst_shift = 0, worst_scale = 0;
  for (int k = 0; k < 50; ++k) {
    const auto form = ReducedForm::fourth(gen.uniform(0.1, 10), gen.uniform(0.1, 10), gen.uniform(2.1, 12));
    const double width = gen.uniform(0.5, 2);
    const int shift = static_cast<int>(gen.uniform(-300, 300));
    auto gauss = [&](double c) {
      return Profile1D::sample(g, [&](double t) { return std::exp(-(t - c) * (t - c) / (width * width)); });
    };
    const auto w = gauss(0.0);
    const double base = discrete_quotient(form, w);
    worst_shift = std::max(worst_shift, relative_error(discrete_quotient(form, gauss(shift * g.spacing())), base));
    Profile1D cw = w;
    const double c = (k % 2 ? -1 : 1) * gen.uniform(0.01, 100);
    for (auto& x : cw.values) x *= c;
    worst_scale = std::max(worst_scale, relative_error(discrete_quotient(form, cw), base));
  }
  return {converged && monotone && worst_shift <= 1e-10 && worst_scale <= 1e-12,
          "S_rad(-1,0,1,5) = " + values + ", translation err " + fmt(worst_shift) + ", scaling err " +
              fmt(worst_scale)};
}

Outcome critical_breaking() {
  const auto v = verdict_at({5, 0.0, 10.0, 1.0});
  const bool ok = v.verdict == Verdict::radial_breaks_certified && v.margin && v.tolerance &&
                  *v.margin > 3 * *v.tolerance;
  return {ok, std::string("verdict ") + to_string(v.verdict) + ", S_rad " + fmt(v.s_radial.value_or(NAN)) +
                  ", upper " + fmt(v.s_upper_bound.value_or(NAN)) + ", margin " + fmt(v.margin.value_or(NAN)) +
                  ", tol " + fmt(v.tolerance.value_or(NAN))};
}

Outcome bump_decay() {
  const ProblemParams p{5, 0.0, 4.0, 0.0};
  const std::vector<double> deltas{0.4, 0.2, 0.1};
  std::vector<double> values;
  for (double d : deltas) {
    BumpSpec spec;
    spec.delta = d;
    values.push_back(bump_quotient(p, spec));
  }
  const bool decreasing = values[0] > values[1] && values[1] > values[2];
  // least-squares slope of log Q against log delta over equally spaced log deltas
  const double slope = std::log(values[0] / values[2]) / std::log(deltas[0] / deltas[2]);
  const double expected = bump_scaling_exponent(5, 4.0);
  return {decreasing && std::abs(slope - expected) <= 0.1 * expected,
          "Q = " + fmt(values[0]) + " " + fmt(values[1]) + " " + fmt(values[2]) + ", slope " + fmt(slope) +
              " vs " + fmt(expected)};
}

Outcome limiting_profile() {
  const ProblemParams p{5, 0.0, 3.0, 0.0};
  SolverConfig cfg;
  cfg.grid = Grid1D(80.0, 8192);
  const auto run = limiting_profile_run(p, {1.0, 0.1, 0.01, 0.001}, cfg);
  auto oracle = Profile1D::sample(cfg.grid, [](double t) {
    const double s = 1 / std::cosh(t / 4);
    return 0.375 * s * s;
  });
  const double norm = std::pow(discrete_lq_integral(oracle, p.q), 1 / p.q);
  for (auto& v : oracle.values) v /= norm;
  const auto& last = run.per_eps.back();
  const double dist = h1_relative_distance(last.profile, oracle);
  return {!run.degraded && run.gaps_monotone && last.relative_gap <= 1e-2 && dist <= 0.05,
          "final gap " + fmt(last.relative_gap) + ", H1 distance to oracle " + fmt(dist) +
              (run.gaps_monotone ? ", gaps decreasing" : ", gaps NOT decreasing")};
}

Outcome normalization() {
  double worst = 0;
  for (double lambda : {1.0, 10.0, 100.0}) {
    const ProblemParams p{5, 0.0, 4.0, lambda};
    const auto full = solve_fourth(reduce_fourth_order(p), {});
    const auto eps = solve_eps_radial(p, 1 / lambda, {});
    worst = std::max(worst, relative_error(lambda * eps.infimum, full.infimum));
  }
  return {worst <= 1e-10, "max rel err " + fmt(worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rellich_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = RELLICH_CLI_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string scan = "phase-scan --n 5 --alphas 0,3 --qs 3,10 --lambdas 0,1 --no-cache --jobs 4 --out ";
  const std::string verify = "verify --seed 7 --jobs 4 --out ";
  const int c1 = run(verify + (dir / "verify1.json").string());
  const int c2 = run(verify + (dir / "verify2.json").string());
  const int c3 = run(scan + (dir / "scan1.json").string());
  const int c4 = run(scan + (dir / "scan2.json").string());
  const auto v1 = slurp(dir / "verify1.json"), v2 = slurp(dir / "verify2.json");
  const auto s1 = slurp(dir / "scan1.json"), s2 = slurp(dir / "scan2.json");
  const bool ok = c3 == 0 && c4 == 0 && c1 == c2 && !v1.empty() && !s1.empty() && v1 == v2 && s1 == s2;
  fs::remove_all(dir);
  return {ok, std::string("verify payloads ") + (v1 == v2 ? "identical" : "differ") + " (exit " +
                  std::to_string(c1) + "), phase-scan payloads " + (s1 == s2 ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"A1 constant identities", constant_identities},
      {"A2 mode-symbol consistency", mode_symbol},
      {"A3 gamma_alpha", gamma_scan},
      {"A4 second-order oracle", second_order_oracle},
      {"A5 cross-pipeline S**", cross_pipeline},
      {"A6 lambda_alpha pattern", lambda_alpha_pattern},
      {"A7 Emden-Fowler form cross-checks", emden_fowler_forms},
      {"A8 weight identities", weight_identities},
      {"A9 monotonicity and invariances", monotone_and_invariant},
      {"A10 critical symmetry breaking", critical_breaking},
      {"A11 bump decay", bump_decay},
      {"A12 limiting profile", limiting_profile},
      {"A13 normalization relation", normalization},
      {"A14 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt(secs) << " s]"
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
