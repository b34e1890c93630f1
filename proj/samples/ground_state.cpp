// Radial ground state of the critical problem in dimension 5 and the
// symmetry-breaking check at lambda = 1.

#include "rellich/rellich.hpp"

#include <cstdio>

int main() {
  using namespace rellich;

  const ProblemParams critical{5, 0.0, two_double_star(5), 0.0};
  const auto c = closed_form_constants(critical);
  std::printf("delta_alpha = %.6f  h_tilde = %.6f  lambda_alpha = %.6f\n", c.delta_alpha, c.h_tilde_alpha,
              c.lambda_alpha);

  SolverConfig cfg;
  cfg.grid = Grid1D(20.0, 4096);
  const auto radial = solve_fourth(reduce_fourth_order(critical), cfg);
  const auto extremal = quotient_of_U(critical);
  std::printf("S_rad = %.8f (residual %.2e, %d iterations)\n", radial.infimum, radial.el_residual,
              radial.iterations);
  std::printf("quotient of the extremal = %.8f\n", extremal.value);

  const auto v = verdict_at({5, 0.0, two_double_star(5), 1.0});
  std::printf("lambda = 1: %s, margin %.4f (tolerance %.2e)\n", to_string(v.verdict), v.margin.value_or(0),
              v.tolerance.value_or(0));
  return 0;
}
