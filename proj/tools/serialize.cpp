#include "serialize.hpp"

#include <cstdio>
#include <stdexcept>

namespace rellich::cli {
namespace {

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string csv_number(const std::optional<double>& x) {
  if (!x) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *x);
  return buf;
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::radial_breaks_certified, Verdict::breaks_for_large_lambda,
                    Verdict::no_breaking_evidence, Verdict::inconclusive})
    if (s == to_string(v)) return v;
  throw std::runtime_error("unknown verdict: " + s);
}

Criterion criterion_from_string(const std::string& s) {
  for (Criterion c : {Criterion::FS_condition, Criterion::lambda_alpha_threshold,
                      Criterion::upper_bound_vs_radial, Criterion::critical_nonattainment})
    if (s == to_string(c)) return c;
  throw std::runtime_error("unknown criterion: " + s);
}

}  // namespace

Json to_json(const ProblemParams& p) {
  return Json{{"n", p.n}, {"alpha", p.alpha}, {"q", p.q}, {"lambda", p.lambda}};
}

Json to_json(const SolverConfig& c) {
  return Json{{"L", c.grid.half_length()},
              {"N", c.grid.intervals()},
              {"initial_step", c.step_rule.initial_step},
              {"backtrack", c.step_rule.backtrack},
              {"min_step", c.step_rule.min_step},
              {"max_iterations", c.max_iterations},
              {"el_tolerance", c.el_tolerance},
              {"restarts", c.restarts},
              {"seed", c.seed}};
}

Json to_json(const VerdictBudget& b) {
  return Json{{"solver", to_json(b.solver)},
              {"radial_quadrature",
               {{"r_min", b.quadrature.r_min},
                {"r_max", b.quadrature.r_max},
                {"node_count", b.quadrature.node_count},
                {"max_nodes", b.quadrature.max_nodes},
                {"rel_tol", b.quadrature.rel_tol}}},
              {"bump",
               {{"radial_nodes", b.bump.radial_nodes},
                {"angular_nodes", b.bump.angular_nodes},
                {"rel_tol", b.bump.rel_tol},
                {"max_nodes", b.bump.max_nodes},
                {"first_delta", b.first_delta},
                {"min_delta_steps", b.min_delta_steps},
                {"max_delta_steps", b.max_delta_steps}}},
              {"margin_factor", b.margin_factor}};
}

Json to_json(const ParamFlags& f) {
  return Json{{"q_subcritical", f.q_subcritical},
              {"q_critical", f.q_critical},
              {"q_supercritical_full", f.q_supercritical_full},
              {"q_below_first_order_critical", f.q_below_first_order_critical}};
}

Json to_json(const MinimizeResult& r) {
  return Json{{"infimum", r.infimum},
              {"unscaled_infimum", r.unscaled_infimum},
              {"sphere_factor", r.form.sphere_factor},
              {"el_residual", r.el_residual},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"tau_scale", r.tau_scale},
              {"restart_spread", r.restart_spread},
              {"L", r.profile.grid.half_length()},
              {"N", r.profile.grid.intervals()}};
}

Json to_json(const GammaScan& g) {
  Json modes = Json::array();
  for (const auto& m : g.per_mode)
    modes.push_back(Json{{"ell", m.ell}, {"value", m.value}, {"xi_squared", m.xi_squared}});
  return Json{{"gamma_numeric", g.value},
              {"attaining_mode", g.attaining_mode},
              {"gamma_radial", g.radial_value},
              {"gamma_alpha_formula", g.formula},
              {"formula_valid", g.formula_valid},
              {"disagrees_with_formula", g.disagrees_with_formula},
              {"cap_warning", g.cap_warning},
              {"monotone_tail", g.monotone_tail},
              {"per_mode", modes}};
}

Json to_json(const QuotientOfU& u) {
  return Json{{"quotient", u.value},
              {"s_double_star", u.s_double_star},
              {"laplacian_integral", u.laplacian_integral},
              {"hardy_integral", u.hardy_integral},
              {"lq_integral", u.lq_integral},
              {"A_alpha", u.A_alpha},
              {"B_alpha", u.B_alpha},
              {"relative_error", u.relative_error}};
}

Json to_json(const PhaseVerdict& v) {
  Json criteria = Json::array();
  for (auto c : v.criteria_fired) criteria.push_back(to_string(c));
  Json j = to_json(v.params);
  j["verdict"] = to_string(v.verdict);
  j["criteria"] = criteria;
  j["s_upper"] = optional_number(v.s_upper_bound);
  j["s_radial"] = optional_number(v.s_radial);
  j["margin"] = optional_number(v.margin);
  j["tolerance"] = optional_number(v.tolerance);
  j["bump_delta"] = optional_number(v.bump_delta);
  j["error"] = v.error;
  return j;
}

PhaseVerdict verdict_from_json(const Json& j) {
  PhaseVerdict v;
  v.params = {j.at("n").get<int>(), j.at("alpha").get<double>(), j.at("q").get<double>(),
              j.at("lambda").get<double>()};
  v.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  for (const auto& c : j.at("criteria")) v.criteria_fired.push_back(criterion_from_string(c.get<std::string>()));
  v.s_upper_bound = read_optional(j, "s_upper");
  v.s_radial = read_optional(j, "s_radial");
  v.margin = read_optional(j, "margin");
  v.tolerance = read_optional(j, "tolerance");
  v.bump_delta = read_optional(j, "bump_delta");
  v.error = j.value("error", std::string());
  return v;
}

Json to_json(const ContinuationRun& run) {
  Json points = Json::array();
  for (const auto& p : run.per_eps)
    points.push_back(Json{{"eps", p.eps},
                          {"s_tilde", p.s_tilde},
                          {"relative_gap", p.relative_gap},
                          {"h1_distance_to_limit", p.h1_distance_to_limit},
                          {"el_residual", p.el_residual},
                          {"iterations", p.iterations},
                          {"converged", p.converged}});
  return Json{{"params", to_json(run.params)},
              {"s_tilde_limit", run.s_tilde_limit},
              {"limit_converged", run.limit_converged},
              {"degraded", run.degraded},
              {"distances_monotone", run.distances_monotone},
              {"gaps_monotone", run.gaps_monotone},
              {"per_eps", points}};
}

std::string verdicts_to_csv(const std::vector<PhaseVerdict>& verdicts) {
  std::string out = "n,alpha,q,lambda,verdict,criteria,s_upper,s_radial,margin\n";
  for (const auto& v : verdicts) {
    std::string criteria;
    for (auto c : v.criteria_fired) {
      if (!criteria.empty()) criteria += ';';
      criteria += to_string(c);
    }
    out += std::to_string(v.params.n) + ',' + csv_number(v.params.alpha) + ',' + csv_number(v.params.q) + ',' +
           csv_number(v.params.lambda) + ',' + to_string(v.verdict) + ',' + criteria + ',' +
           csv_number(v.s_upper_bound) + ',' + csv_number(v.s_radial) + ',' + csv_number(v.margin) + '\n';
  }
  return out;
}

}  // namespace rellich::cli
