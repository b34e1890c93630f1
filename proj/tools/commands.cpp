#include "commands.hpp"

#include "digest.hpp"
#include "json_text.hpp"
#include "run_cache.hpp"
#include "serialize.hpp"

#include "rellich/rellich.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace rellich::cli {

std::vector<double> parse_values(const std::string& spec) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
      throw std::invalid_argument("malformed number '" + s + "' in '" + spec + "'");
    return v;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw std::invalid_argument("range must be a:b:step, got '" + spec + "'");
    const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
    if (!(step > 0) || b < a) throw std::invalid_argument("range needs a <= b and step > 0: '" + spec + "'");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 100000) throw std::invalid_argument("range has too many points: '" + spec + "'");
    for (long k = 0; k < count; ++k) out.push_back(a + k * step);
    return out;
  }
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(number(part));
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

namespace {

struct CommonOptions {
  std::string out;
  std::string format = "json";
  std::string cache_dir;
  bool no_cache = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string gnuplot;
  std::string profile_out;
};

struct ParamOptions {
  int n = 5;
  double alpha = 0;
  std::optional<double> q;
  double lambda = 0;

  ProblemParams params(double default_q) const { return {n, alpha, q.value_or(default_q), lambda}; }
};

struct SolveOptions {
  int N = 4096;
  std::optional<double> L;
  double el_tol = 1e-6;
  int max_iters = 200000;
  int restarts = 0;
  std::uint64_t seed = 1;

  SolverConfig config(double default_half_length) const {
    SolverConfig c;
    c.grid = Grid1D(L.value_or(default_half_length), N);
    c.el_tolerance = el_tol;
    c.max_iterations = max_iters;
    c.restarts = restarts;
    c.seed = seed;
    c.validate();
    return c;
  }
};

struct Outcome {
  std::string payload;
  int status = exit_ok;
  Json envelope_extra = Json::object();
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void write_profile_file(const std::string& path, const Profile1D& w, const ProblemParams& p) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_profile(f, w, p);
}

void write_gnuplot_profiles(const std::string& prefix, const std::vector<std::pair<std::string, Profile1D>>& series) {
  std::string data;
  const auto& grid = series.front().second.grid;
  for (int i = 0; i < grid.size(); ++i) {
    data += format_double(grid.node(i));
    for (const auto& s : series) data += ' ' + format_double(s.second.values[i]);
    data += '\n';
  }
  write_text_file(prefix + ".dat", data);
  std::string script = "set xlabel 't'\nset ylabel 'w(t)'\nplot ";
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (k) script += ", \\\n     ";
    script += "'" + prefix + ".dat' using 1:" + std::to_string(k + 2) + " with lines title '" + series[k].first + "'";
  }
  write_text_file(prefix + ".gp", script + "\n");
}

/// Cache lookup, computation, payload file and stdout envelope shared by all commands.
int execute(const std::string& command, const Json& inputs, const CommonOptions& common,
            const std::function<Outcome()>& compute, bool csv, std::ostream& out, std::ostream& err) {
  const std::string digest = params_digest(command, inputs);
  const bool side_outputs = !common.gnuplot.empty() || !common.profile_out.empty();
  const bool use_cache = !common.no_cache && !side_outputs;
  std::optional<RunCache> cache;
  if (!common.no_cache) cache.emplace(common.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(common.cache_dir));

  Outcome result;
  bool cached = false;
  if (use_cache) {
    if (auto rec = cache->load(digest)) {
      result.payload = rec->outputs;
      cached = true;
    }
  }
  if (!cached) {
    result = compute();
    if (cache && result.status == exit_ok) cache->store(command, digest, result.payload);
  }
  if (!common.out.empty()) write_text_file(common.out, result.payload);

  if (csv) {
    out << result.payload;
    err << "cached: " << (cached ? "true" : "false") << "  params_digest: " << digest << '\n';
  } else {
    std::string env = "{\n  \"cached\": " + std::string(cached ? "true" : "false") +
                      ",\n  \"params_digest\": \"" + digest + "\"";
    if (!cached)
      for (const auto& [k, v] : result.envelope_extra.items()) env += ",\n  " + Json(k).dump() + ": " + to_json_text(v, -1);
    env += ",\n  \"result\": ";
    // indent the payload one level
    std::string body;
    for (char c : result.payload) {
      body += c;
      if (c == '\n') body += "  ";
    }
    out << env << body << "\n}\n";
  }
  if (result.status == exit_not_converged) err << command << ": solver did not converge; results are flagged\n";
  return result.status;
}

// ---------------------------------------------------------------------------

Outcome constants_payload(const ParamOptions& po) {
  validate_dimension_and_weight(po.n, po.alpha);
  Json j;
  j["n"] = po.n;
  j["alpha"] = po.alpha;
  j["q"] = po.q ? Json(*po.q) : Json(nullptr);
  j["lambda"] = po.lambda;
  j["two_star"] = two_star(po.n);
  j["two_double_star"] = two_double_star(po.n);
  j["sigma"] = 0.5 * (4.0 - po.n - po.alpha);
  if (po.q) {
    const ProblemParams p = po.params(0);
    const auto v = validate_params(p);
    j["beta"] = derived_exponents(p).beta;
    j["flags"] = to_json(v.flags);
  }
  const auto c = closed_form_constants(po.n, po.alpha, po.lambda);
  j["delta_alpha"] = c.delta_alpha;
  j["delta_tilde_alpha"] = c.delta_tilde_alpha;
  j["h_tilde_alpha"] = c.h_tilde_alpha;
  j["gamma_alpha_formula"] = c.gamma_alpha_formula;
  j["gamma_formula_valid"] = c.gamma_formula_valid;
  j["omega_n"] = c.omega_n;
  j["a_lambda"] = c.a_lambda;
  j["b_lambda"] = c.b_lambda;
  j["lambda_alpha"] = c.lambda_alpha;
  j["A_alpha"] = c.A_alpha;
  j["B_alpha"] = c.B_alpha;
  if (po.q && *po.q <= two_star(po.n)) {
    j["felli_schneider"] = felli_schneider_holds(po.params(0));
    j["felli_schneider_margin"] = felli_schneider_margin(po.params(0));
  } else {
    j["felli_schneider"] = nullptr;
  }
  return {to_json_text(j), exit_ok, Json::object()};
}

Outcome solve_payload(const ProblemParams& p, const ReducedForm& form, const SolverConfig& cfg,
                      const CommonOptions& common, bool fourth) {
  const auto r = fourth ? solve_fourth(form, cfg) : solve_second(form, cfg);
  Json j = to_json(p);
  j[fourth ? "s_radial" : "s_tilde_zero"] = r.infimum;
  j["form"] = fourth ? Json{{"a", form.a()}, {"b", form.b()}, {"q", form.q}}
                     : Json{{"h", form.h()}, {"q", form.q}};
  j.update(to_json(r));
  if (!common.profile_out.empty()) write_profile_file(common.profile_out, r.profile, p);
  if (!common.gnuplot.empty()) write_gnuplot_profiles(common.gnuplot, {{"ground state", r.profile}});
  return {to_json_text(j), r.converged ? exit_ok : exit_not_converged, Json::object()};
}

Outcome phase_scan_payload(const PhaseGrid& grid, const VerdictBudget& budget, const CommonOptions& common,
                           bool csv) {
  VerdictCache memo;
  std::optional<RunCache> cache;
  std::vector<std::string> digests;
  auto point_digest = [&](const ProblemParams& p) {
    return params_digest("verdict", Json{{"params", to_json(p)}, {"budget", to_json(budget)}});
  };
  if (!common.no_cache) {
    cache.emplace(common.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(common.cache_dir));
    for (const auto& p : grid.points())
      if (auto rec = cache->load(point_digest(p))) memo.insert(verdict_from_json(Json::parse(rec->outputs)));
  }
  PhaseScanStats stats;
  const auto verdicts = phase_scan(grid, budget, &memo, common.jobs, &stats);
  if (cache)
    for (const auto& v : verdicts)
      if (v.error.empty()) cache->store("verdict", point_digest(v.params), to_json_text(to_json(v)));

  if (!common.gnuplot.empty()) {
    std::string data;
    for (const auto& v : verdicts)
      data += format_double(v.params.alpha) + ' ' + format_double(v.params.q) + ' ' +
              format_double(v.params.lambda) + ' ' + std::to_string(static_cast<int>(v.verdict)) + '\n';
    write_text_file(common.gnuplot + ".dat", data);
    write_text_file(common.gnuplot + ".gp",
                    "set xlabel 'alpha'\nset ylabel 'q'\nset cblabel 'verdict (0 certified, 1 large lambda, "
                    "2 no evidence, 3 inconclusive)'\nplot '" +
                        common.gnuplot + ".dat' using 1:2:4 with points pt 7 palette notitle\n");
  }

  Outcome o;
  if (csv) {
    o.payload = verdicts_to_csv(verdicts);
  } else {
    Json arr = Json::array();
    for (const auto& v : verdicts) arr.push_back(to_json(v));
    o.payload = to_json_text(Json{{"n", grid.n}, {"points", arr}});
  }
  o.envelope_extra = Json{{"new_evaluations", stats.computed}, {"cached_points", stats.cached}};
  return o;
}

// ---------------------------------------------------------------------------
// verify: invariant suite

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0;      // worst observed error
  double tolerance = 0;
  std::string detail;
};

double rel(double a, double b) { return relative_gap(a, b); }

// 1D soliton of -w'' + h w = w^{q-1}: A sech^{2/(q-2)}(B t); infimum (int W^q)^{1-2/q}
struct Soliton {
  double amplitude, rate, lq_integral, infimum;
  explicit Soliton(double h, double q) {
    rate = 0.5 * (q - 2) * std::sqrt(h);
    amplitude = std::pow(0.5 * q * h, 1.0 / (q - 2));
    const double k = 2 * q / (q - 2);
    const double sech_k = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * k) / std::tgamma(0.5 * (k + 1)) / rate;
    lq_integral = std::pow(amplitude, q) * sech_k;
    infimum = std::pow(lq_integral, 1 - 2 / q);
  }
  double normalized(double t, double q) const {
    return amplitude * std::pow(1 / std::cosh(rate * t), 2 / (q - 2)) / std::pow(lq_integral, 1 / q);
  }
};

std::vector<std::function<CheckResult()>> verify_checks(std::uint64_t seed) {
  std::vector<std::function<CheckResult()>> checks;

  checks.push_back([seed] {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dim(5, 10);
    std::uniform_real_distribution<double> unit(0, 1);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
      const int n = dim(rng);
      const double alpha = (4 - n) + 1e-3 + unit(rng) * (2 * n - 4 - 2e-3);
      const double lambda = -0.25 * (n - alpha) * (n - alpha) + unit(rng) * 50;
      // a^2 - b cancels catastrophically near lambda = (n-2)(alpha-2); evaluate it exactly
      const Rational ra(alpha), rl(lambda);
      const auto e = closed_forms_generic<Rational>(n, ra, rl);
      const Rational half_gap = Rational(n - 2) * (ra - 2) / 2 - rl / 2;
      const auto c = closed_form_constants(n, alpha, lambda);
      worst = std::max({worst, rel(to_double(e.a_lambda * e.a_lambda - e.b_lambda), to_double(half_gap * half_gap)),
                        rel(c.b_lambda, c.delta_alpha + lambda * c.h_tilde_alpha)});
    }
    return CheckResult{"identity a^2-b and b = delta + lambda h", worst <= 1e-12, worst, 1e-12, "1000 samples"};
  });

  checks.push_back([] {
    bool ok = true;
    int count = 0;
    for (int n : {5, 6, 7})
      for (int k = 1;; ++k) {
        const Rational alpha = Rational(4 - n) + Rational(k, 20);
        if (alpha >= n) break;
        const auto c = closed_forms_generic<Rational>(n, alpha, Rational(3, 2));
        const Rational c0 = mode_constant<Rational>(n, alpha, 0);
        ok = ok && c0 * c0 == c.delta_alpha && -2 * c0 + (alpha - 2) * (alpha - 2) == 2 * c.delta_tilde_alpha &&
             c.a_lambda == c.delta_tilde_alpha + Rational(3, 4) &&
             c.b_lambda == c.delta_alpha + Rational(3, 2) * c.h_tilde_alpha;
        ++count;
      }
    return CheckResult{"mode symbol and reduced coefficients (exact)", ok, ok ? 0.0 : 1.0, 0.0,
                       std::to_string(count) + " rational points"};
  });

  checks.push_back([] {
    bool ok = true;
    for (int n = 5; n <= 10; ++n)
      for (int k = 1;; ++k) {
        const Rational alpha = Rational(4 - n) + Rational(k, 20);
        if (alpha >= n) break;
        const auto c = closed_forms_generic<Rational>(n, alpha, Rational(0));
        const Rational& l = c.lambda_alpha;
        if (alpha == 0 || alpha == 4) ok = ok && l == 0;
        else if (alpha < 0 || alpha > 4) ok = ok && l > 0;
        else ok = ok && l < 0 && l > -c.gamma_alpha_formula;
      }
    return CheckResult{"lambda_alpha sign pattern", ok, ok ? 0.0 : 1.0, 0.0, "n = 5..10, step 0.05"};
  });

  checks.push_back([] {
    double worst = 0;
    for (int n : {5, 6, 7})
      for (double a : {0.0, 1.0, 2.0, 3.0}) {
        const auto g = gamma_alpha_numeric(n, a);
        worst = std::max({worst, std::abs(g.value - g.formula), std::abs(g.radial_value - g.formula)});
      }
    return CheckResult{"gamma_alpha mode scan", worst <= 1e-8, worst, 1e-8, "alpha in {0,1,2,3}, n in {5,6,7}"};
  });

  checks.push_back([] {
    const ProblemParams p{5, 1.0, 3.0, 0.0};
    const auto c = closed_form_constants(p);
    const Grid1D grid(20.0, 4096);
    const double sigma = ef_sigma(p);
    auto w = [](auto t) { return exp(-(t * t) / 16.0); };
    const Profile1D prof = Profile1D::sample(grid, [&](double t) { return w(Jet2(t)).v; });
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
    const double lq = radial_integral_value(p.n, [&](double r) {
      return std::pow(r, -derived_exponents(p).beta) * std::pow(std::abs(u(r).v), p.q);
    });
    const double worst = std::max(
        {rel(lap, c.omega_n * (f.second_derivative + 2 * c.delta_tilde_alpha * f.first_derivative +
                               c.delta_alpha * f.value)),
         rel(grad, c.omega_n * (f.first_derivative + c.h_tilde_alpha * f.value)),
         rel(lq, c.omega_n * discrete_lq_integral(prof, p.q))});
    return CheckResult{"Emden-Fowler forms vs n-dimensional quadrature", worst <= 1e-6, worst, 1e-6,
                       "n=5, alpha=1, w=exp(-t^2/16)"};
  });

  checks.push_back([] {
    double worst = 0;
    for (int n : {5, 6, 7})
      for (double a : {-2.0, -1.0, 0.0, 1.0, 2.0, 3.0}) {
        if (a <= 4 - n) continue;
        worst = std::max(worst, verify_AB_identities(n, a).max_relative_error);
      }
    return CheckResult{"A_alpha / B_alpha identities", worst <= 1e-6, worst, 1e-6, "n in {5,6,7}"};
  });

  checks.push_back([] {
    const auto ring = verify_weight_shift_identity(5, 2.0, [](const Jet2& r) {
      const Jet2 l = log(r);
      return exp(-(l * l));
    });
    const auto bump = verify_weight_shift_identity(6, -1.0, [](const Jet2& r) {
      return bump_mollifier((r - 1.0) / 0.5);
    });
    const double worst = std::max(ring.relative_error, bump.relative_error);
    return CheckResult{"weight-shift identity", worst <= 1e-8, worst, 1e-8, "Gaussian ring and bump"};
  });

  checks.push_back([] {
    double worst_value = 0, worst_sup = 0;
    SolverConfig cfg;
    cfg.grid = Grid1D(40.0, 4096);
    for (auto [h, q] : {std::pair{0.25, 3.0}, std::pair{1.0, 4.0}, std::pair{1.0, 6.0}}) {
      const auto r = solve_second(ReducedForm::second(h, q), cfg);
      const Soliton s(h, q);
      worst_value = std::max(worst_value, rel(r.unscaled_infimum, s.infimum));
      for (int i = 0; i < cfg.grid.size(); ++i)
        worst_sup = std::max(worst_sup, std::abs(r.profile.values[i] - s.normalized(cfg.grid.node(i), q)));
    }
    const bool ok = worst_value <= 1e-4 && worst_sup <= 1e-3;
    return CheckResult{"second-order soliton oracles", ok, worst_value, 1e-4,
                       "sup-norm profile error " + format_double(worst_sup) + " (tolerance 1e-3)"};
  });

  checks.push_back([] {
    const ProblemParams p{5, 0.0, 10.0, 0.0};
    SolverConfig cfg;
    cfg.grid = Grid1D(20.0, 4096);
    const auto r = solve_fourth(reduce_fourth_order(p), cfg);
    const auto u = quotient_of_U(p);
    const double e = rel(r.infimum, u.value);
    const bool ok = e <= 1e-3 && r.el_residual <= 1e-6;
    return CheckResult{"radial solve vs extremal quotient (critical)", ok, e, 1e-3,
                       "residual " + format_double(r.el_residual)};
  });

  checks.push_back([] {
    double worst = 0;
    SolverConfig cfg;
    for (double l : {1.0, 10.0, 100.0}) {
      const ProblemParams p{5, 0.0, 4.0, l};
      const double a = solve_eps_radial(p, 1 / l, cfg).infimum * l;
      const double b = solve_fourth(reduce_fourth_order(p), cfg).infimum;
      worst = std::max(worst, rel(a, b));
    }
    return CheckResult{"eps normalization relation", worst <= 1e-10, worst, 1e-10, "lambda in {1,10,100}"};
  });

  return checks;
}

Outcome verify_payload(const CommonOptions& common, std::uint64_t seed, std::ostream& out) {
  const auto checks = verify_checks(seed);
  std::vector<CheckResult> results(checks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < checks.size(); i = next++) {
      try {
        results[i] = checks[i]();
      } catch (const std::exception& e) {
        results[i] = CheckResult{"check " + std::to_string(i), false, 0, 0, e.what()};
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(common.jobs, static_cast<unsigned>(checks.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool all = true;
  Json arr = Json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  (error " << format_double(r.value) << ", tolerance "
        << format_double(r.tolerance) << "; " << r.detail << ")\n";
    arr.push_back(Json{{"name", r.name}, {"passed", r.passed}, {"error", r.value},
                       {"tolerance", r.tolerance}, {"detail", r.detail}});
  }
  return {to_json_text(Json{{"all_passed", all}, {"checks", arr}}), all ? exit_ok : exit_not_converged,
          Json::object()};
}

// ---------------------------------------------------------------------------

void add_params(CLI::App* cmd, ParamOptions& po, bool with_q, bool with_lambda) {
  cmd->add_option("--n", po.n, "dimension (>= 5)")->required();
  cmd->add_option("--alpha", po.alpha, "weight exponent, 4-n < alpha < n")->required();
  if (with_q) cmd->add_option("--q", po.q, "nonlinearity exponent (> 2)");
  if (with_lambda) cmd->add_option("--lambda", po.lambda, "coupling parameter");
}

void add_solver(CLI::App* cmd, SolveOptions& so) {
  cmd->add_option("--N", so.N, "grid intervals (even, >= 64)");
  cmd->add_option("--L", so.L, "grid half length (default from the decay rate)");
  cmd->add_option("--el-tol", so.el_tol, "Euler-Lagrange residual tolerance");
  cmd->add_option("--max-iters", so.max_iters, "iteration budget per start");
  cmd->add_option("--restarts", so.restarts, "extra random initializations");
  cmd->add_option("--seed", so.seed, "seed for random initializations");
}

void add_common(CLI::App* cmd, CommonOptions& co, bool formats) {
  cmd->add_option("--out", co.out, "write the result payload to this file");
  if (formats) cmd->add_option("--format", co.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--cache", co.cache_dir, "cache directory (default $RELLICH_CACHE or ./cache)");
  cmd->add_flag("--no-cache", co.no_cache, "neither read nor write the cache");
  cmd->add_option("--jobs", co.jobs, "worker threads");
}

Json solver_inputs(const ProblemParams& p, const SolverConfig& c) {
  return Json{{"params", to_json(p)}, {"solver", to_json(c)}};
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted Rellich-Sobolev constants, radial ground states and symmetry-breaking verdicts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", artifact_version());

  CommonOptions common;
  ParamOptions po;
  SolveOptions so;
  std::function<int()> action;

  auto* constants = app.add_subcommand("constants", "closed-form constants and parameter checks");
  add_params(constants, po, true, true);
  add_common(constants, common, false);
  constants->callback([&] {
    action = [&] {
      Json inputs{{"n", po.n}, {"alpha", po.alpha}, {"q", po.q ? Json(*po.q) : Json(nullptr)}, {"lambda", po.lambda}};
      return execute("constants", inputs, common, [&] { return constants_payload(po); }, false, out, err);
    };
  });

  auto* solve_radial = app.add_subcommand("solve-radial", "radial fourth-order ground state S_rad");
  add_params(solve_radial, po, true, true);
  add_solver(solve_radial, so);
  add_common(solve_radial, common, false);
  solve_radial->add_option("--profile-out", common.profile_out, "write the ground-state profile");
  solve_radial->add_option("--gnuplot", common.gnuplot, "write PREFIX.gp and PREFIX.dat");
  solve_radial->get_option("--q")->required();
  solve_radial->callback([&] {
    action = [&] {
      const ProblemParams p = po.params(0);
      const ReducedForm form = reduce_fourth_order(p);
      const SolverConfig cfg = so.config(default_half_length(form));
      return execute("solve-radial", solver_inputs(p, cfg), common,
                     [&] { return solve_payload(p, form, cfg, common, true); }, false, out, err);
    };
  });

  auto* solve_lower = app.add_subcommand("solve-lower", "second-order (lower-order) radial ground state");
  add_params(solve_lower, po, true, false);
  add_solver(solve_lower, so);
  add_common(solve_lower, common, false);
  solve_lower->add_option("--profile-out", common.profile_out, "write the ground-state profile");
  solve_lower->add_option("--gnuplot", common.gnuplot, "write PREFIX.gp and PREFIX.dat");
  solve_lower->get_option("--q")->required();
  solve_lower->callback([&] {
    action = [&] {
      const ProblemParams p = po.params(0);
      const ReducedForm form = reduce_second_order(p);
      if (second_order_degenerate(form)) err << "warning: Hardy constant is nearly zero; the form degenerates\n";
      const SolverConfig cfg = so.config(default_half_length(form));
      return execute("solve-lower", solver_inputs(p, cfg), common,
                     [&] { return solve_payload(p, form, cfg, common, false); }, false, out, err);
    };
  });

  long mode_cap = 64;
  double gamma_tol = 1e-12;
  auto* gamma = app.add_subcommand("gamma", "numeric gamma_alpha by spherical-harmonic mode scan");
  add_params(gamma, po, false, false);
  add_common(gamma, common, false);
  gamma->add_option("--mode-cap", mode_cap, "highest spherical-harmonic degree (>= 8)");
  gamma->add_option("--tolerance", gamma_tol, "relative tolerance for the attaining mode");
  gamma->callback([&] {
    action = [&] {
      Json inputs{{"n", po.n}, {"alpha", po.alpha}, {"mode_cap", mode_cap}, {"tolerance", gamma_tol}};
      return execute("gamma", inputs, common, [&] {
        Json j{{"n", po.n}, {"alpha", po.alpha}};
        j.update(to_json(gamma_alpha_numeric(po.n, po.alpha, mode_cap, gamma_tol)));
        return Outcome{to_json_text(j), exit_ok, Json::object()};
      }, false, out, err);
    };
  });

  auto* quotient_u = app.add_subcommand("quotient-u", "quotient of the critical extremal at q = 2**");
  add_params(quotient_u, po, false, true);
  add_common(quotient_u, common, false);
  quotient_u->callback([&] {
    action = [&] {
      const ProblemParams p = po.params(two_double_star(po.n));
      return execute("quotient-u", Json{{"params", to_json(p)}}, common, [&] {
        Json j = to_json(p);
        j.update(to_json(quotient_of_U(p)));
        return Outcome{to_json_text(j), exit_ok, Json::object()};
      }, false, out, err);
    };
  });

  std::string alpha_spec = "0", q_spec, lambda_spec = "1";
  auto* scan = app.add_subcommand("phase-scan", "symmetry-breaking verdicts over an (alpha, q, lambda) grid");
  scan->add_option("--n", po.n, "dimension")->required();
  scan->add_option("--alpha-range,--alphas", alpha_spec, "a:b:step or comma list");
  scan->add_option("--q-range,--qs", q_spec, "a:b:step or comma list")->required();
  scan->add_option("--lambda-range,--lambdas", lambda_spec, "a:b:step or comma list");
  add_solver(scan, so);
  add_common(scan, common, true);
  scan->add_option("--gnuplot", common.gnuplot, "write PREFIX.gp and PREFIX.dat");
  scan->callback([&] {
    action = [&] {
      PhaseGrid grid{po.n, parse_values(alpha_spec), parse_values(q_spec), parse_values(lambda_spec)};
      VerdictBudget budget;
      budget.solver = so.config(so.L.value_or(20.0));
      const bool csv = common.format == "csv";
      Json inputs{{"n", grid.n}, {"alphas", grid.alphas}, {"qs", grid.qs}, {"lambdas", grid.lambdas},
                  {"budget", to_json(budget)}, {"format", common.format}};
      return execute("phase-scan", inputs, common,
                     [&] { return phase_scan_payload(grid, budget, common, csv); }, csv, out, err);
    };
  });

  std::string eps_spec = "1,0.1,0.01,0.001";
  auto* limit = app.add_subcommand("limit-profile", "eps -> 0 continuation toward the lower-order ground state");
  add_params(limit, po, true, false);
  limit->get_option("--q")->required();
  limit->add_option("--eps-list", eps_spec, "nonincreasing eps values (>= 1e-6)");
  add_solver(limit, so);
  add_common(limit, common, false);
  limit->add_option("--profile-out", common.profile_out, "write PREFIX_limit.txt and PREFIX_eps<k>.txt");
  limit->add_option("--gnuplot", common.gnuplot, "write PREFIX.gp and PREFIX.dat");
  limit->callback([&] {
    action = [&] {
      const ProblemParams p = po.params(0);
      const auto eps = parse_values(eps_spec);
      const SolverConfig cfg = so.config(default_half_length(eps_form(p, 0.0)));
      Json inputs = solver_inputs(p, cfg);
      inputs["eps"] = eps;
      return execute("limit-profile", inputs, common, [&] {
        const auto run = limiting_profile_run(p, eps, cfg);
        if (!common.profile_out.empty()) {
          write_profile_file(common.profile_out + "_limit.txt", run.limit_profile, p);
          for (std::size_t k = 0; k < run.per_eps.size(); ++k)
            write_profile_file(common.profile_out + "_eps" + std::to_string(k) + ".txt", run.per_eps[k].profile, p);
        }
        if (!common.gnuplot.empty()) {
          std::vector<std::pair<std::string, Profile1D>> series{{"eps = 0", run.limit_profile}};
          for (const auto& pt : run.per_eps) series.emplace_back("eps = " + format_double(pt.eps), pt.profile);
          write_gnuplot_profiles(common.gnuplot, series);
        }
        return Outcome{to_json_text(to_json(run)), run.degraded ? exit_not_converged : exit_ok, Json::object()};
      }, false, out, err);
    };
  });

  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "run the invariant suite; exit 0 iff every check passes");
  verify->add_option("--seed", verify_seed, "seed for sampled identities");
  verify->add_option("--out", common.out, "write the JSON report to this file");
  verify->add_option("--jobs", common.jobs, "worker threads");
  verify->callback([&] {
    action = [&] {
      const auto o = verify_payload(common, verify_seed, out);
      if (!common.out.empty()) write_text_file(common.out, o.payload);
      return o.status;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_bad_arguments;
  }

  try {
    return action ? action() : exit_bad_arguments;
  } catch (const CacheCorruption& e) {
    err << "cache corruption: " << e.what() << '\n';
    return exit_cache_corrupt;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_arguments;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_arguments;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_not_converged;
  }
}

}  // namespace rellich::cli
