#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

// Damped least-squares engine (Levenberg-Marquardt with gain-ratio
// damping control). Jacobians are numeric central differences with
// step max(1e-8, 1e-8*|p|), so callers should scale parameters to
// roughly O(1)..O(1e5).

namespace tunres::fitcore {

struct FitProblem {
  std::function<std::vector<double>(const std::vector<double>&)> residual;
  std::vector<double> initial;
  std::vector<double> lower;  // empty = unbounded
  std::vector<double> upper;
  int max_iterations = 200;
  double step_tol = 1e-12;
  double grad_tol = 1e-12;
  double cost_tol = 1e-14;
};

struct FitResult {
  std::vector<double> params;
  std::vector<double> covariance;  // row-major n x n, chi2-scaled
  std::vector<double> sigma;       // sqrt(diag(covariance))
  double cost = 0.0;               // 0.5 * ||r||^2 at the solution
  int iterations = 0;
  bool converged = false;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FitResult solve(const FitProblem& problem);

}  // namespace tunres::fitcore
