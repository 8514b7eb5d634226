// Solves the 1D benchmark on a few levels and prints the optimal costs.

#include <cmath>
#include <iomanip>
#include <iostream>

#include "mlot/mlot.hpp"

int main() {
  const mlot::Problem problem = mlot::make_problem("ex1");
  mlot::MultilevelParams params;
  params.level_min = 3;
  params.level_max = 7;

  const auto levels = mlot::multilevel_solve(problem.input(mlot::CostFunction::power(2.0)), params);
  std::cout << std::setprecision(10);
  for (const auto& level : levels) {
    std::cout << "level " << level.report.level << "  |A| = " << level.report.active_cardinality
              << "  cost = " << level.solution.objective
              << "  error = " << std::abs(level.solution.objective - problem.exact->optimal_cost)
              << '\n';
  }
}
