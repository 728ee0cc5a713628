#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "tunres/fitcore.hpp"

using tunres::fitcore::FitProblem;
using tunres::fitcore::FitResult;
using tunres::fitcore::solve;

TEST_CASE("linear least squares solved essentially in one step") {
  // r = A x - b with A = [[1,1],[1,2],[1,3]], b = [6, 0, 0].
  FitProblem p;
  p.residual = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] + x[1] - 6.0, x[0] + 2.0 * x[1],
                               x[0] + 3.0 * x[1]};
  };
  p.initial = {0.0, 0.0};
  FitResult r = solve(p);
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  // Normal equations give x = (8, -3).
  CHECK(r.params[0] == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(r.params[1] == doctest::Approx(-3.0).epsilon(1e-9));
}

TEST_CASE("rosenbrock valley from the standard start") {
  FitProblem p;
  p.residual = [](const std::vector<double>& x) {
    return std::vector<double>{10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]};
  };
  p.initial = {-1.2, 1.0};
  p.max_iterations = 500;
  FitResult r = solve(p);
  CHECK(r.converged);
  CHECK(std::abs(r.params[0] - 1.0) < 1e-8);
  CHECK(std::abs(r.params[1] - 1.0) < 1e-8);
}

TEST_CASE("zero residual at the initial point returns immediately") {
  FitProblem p;
  p.residual = [](const std::vector<double>& x) {
    return std::vector<double>{0.0, 0.0};
  };
  p.initial = {3.0, 4.0};
  FitResult r = solve(p);
  CHECK(r.converged);
  CHECK(r.cost == 0.0);
  CHECK(r.params[0] == 3.0);
  CHECK(r.params[1] == 4.0);
}

TEST_CASE("bounds are respected exactly") {
  FitProblem p;
  p.residual = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] - 10.0};
  };
  p.initial = {0.5};
  p.lower = {0.0};
  p.upper = {2.0};
  FitResult r = solve(p);
  CHECK(r.params[0] == 2.0);
}

TEST_CASE("residual reordering leaves the solution unchanged") {
  auto make = [](bool flipped) {
    FitProblem p;
    p.residual = [flipped](const std::vector<double>& x) {
      std::vector<double> r{x[0] * x[0] - 2.0, x[0] - 1.3};
      if (flipped) std::swap(r[0], r[1]);
      return r;
    };
    p.initial = {1.0};
    return p;
  };
  double a = solve(make(false)).params[0];
  double b = solve(make(true)).params[0];
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("sigma comes from the chi2-scaled covariance diagonal") {
  // Fit a constant to scattered data; sigma of the mean is s/sqrt(n).
  std::vector<double> y{1.0, 2.0, 3.0, 4.0, 5.0};
  FitProblem p;
  p.residual = [&](const std::vector<double>& x) {
    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = x[0] - y[i];
    return r;
  };
  p.initial = {0.0};
  FitResult r = solve(p);
  CHECK(r.params[0] == doctest::Approx(3.0).epsilon(1e-9));
  // Sample sd = sqrt(2.5), sigma of mean = sqrt(2.5/5).
  CHECK(r.sigma[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
}

TEST_CASE("error cases") {
  FitProblem p;
  p.residual = [](const std::vector<double>& x) {
    return std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
  };
  p.initial = {1.0};
  CHECK_THROWS_AS(solve(p), tunres::fitcore::FitError);

  FitProblem q;
  q.residual = [](const std::vector<double>& x) {
    return std::vector<double>{x[0]};
  };
  q.initial = {5.0};
  q.lower = {0.0};
  q.upper = {1.0};
  CHECK_THROWS_AS(solve(q), tunres::fitcore::FitError);
}
