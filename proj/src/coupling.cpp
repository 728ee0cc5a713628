#include "tunres/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tunres/fitcore.hpp"

namespace tunres::coupling {

void CrossingData::validate() const {
  if (gate_v.size() != f_plus.size() || gate_v.size() != f_minus.size())
    throw std::invalid_argument("crossing data: column size mismatch");
  for (std::size_t i = 0; i < gate_v.size(); ++i)
    if (f_plus[i] < f_minus[i])
      throw std::invalid_argument("crossing data: f_plus below f_minus");
}

std::pair<double, double> branch_frequencies(const CrossingModel& model,
                                             double v) {
  if (model.g_2pi < 0.0)
    throw std::domain_error("branch_frequencies: g_2pi must be >= 0");
  double kappa = model.coefficient == Coefficient::half ? 0.5 : 0.25;
  double f2 = model.f1 + model.slope * (v - model.v_cross);
  double mean = 0.5 * (model.f1 + f2);
  double det = model.f1 - f2;
  double root = std::sqrt(model.g_2pi * model.g_2pi + kappa * det * det);
  return {mean + root, mean - root};
}

CrossingFit fit_crossing(const CrossingData& data, Coefficient coefficient) {
  data.validate();
  const std::size_t n = data.gate_v.size();
  if (n < 4)
    throw std::invalid_argument("fit_crossing: need >= 4 rows");

  // Initial guesses from the data shape: the crossing sits at the
  // minimum splitting; g is half of it; the slope comes from the span
  // of the moving branch.
  std::size_t i_min = 0;
  double dmin = data.f_plus[0] - data.f_minus[0];
  for (std::size_t i = 1; i < n; ++i) {
    double d = data.f_plus[i] - data.f_minus[i];
    if (d < dmin) {
      dmin = d;
      i_min = i;
    }
  }
  double v0 = data.gate_v[i_min];
  double f1_0 = 0.5 * (data.f_plus[i_min] + data.f_minus[i_min]);
  double g0 = 0.5 * dmin;
  // Moving-branch slope from the endpoint sums: f+ + f- = f1 + f2, so
  // the sum changes at the rate of f2 alone.
  double v_lo = data.gate_v.front(), v_hi = data.gate_v.back();
  double sum_lo = data.f_plus.front() + data.f_minus.front();
  double sum_hi = data.f_plus.back() + data.f_minus.back();
  double slope0 = (v_hi != v_lo) ? (sum_hi - sum_lo) / (v_hi - v_lo) : 1.0;
  if (slope0 == 0.0) slope0 = 1.0;

  bool one_sided = i_min == 0 || i_min == n - 1;

  CrossingModel guess{f1_0, slope0, v0, std::max(g0, 1.0),
                      coefficient};
  // Parameters scaled: f1 [GHz], slope [GHz/V], v_cross [V], g [GHz].
  fitcore::FitProblem prob;
  prob.residual = [&](const std::vector<double>& p) {
    CrossingModel m{p[0] * 1e9, p[1] * 1e9, p[2], std::abs(p[3]) * 1e9,
                    coefficient};
    std::vector<double> r(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      auto [fp, fm] = branch_frequencies(m, data.gate_v[i]);
      r[i] = (fp - data.f_plus[i]) / 1e9;
      r[n + i] = (fm - data.f_minus[i]) / 1e9;
    }
    return r;
  };
  prob.initial = {guess.f1 / 1e9, guess.slope / 1e9, guess.v_cross,
                  guess.g_2pi / 1e9};
  fitcore::FitResult res = fitcore::solve(prob);
  if (!res.converged) throw fitcore::FitError("fit_crossing: no convergence");

  CrossingFit out;
  out.model = CrossingModel{res.params[0] * 1e9, res.params[1] * 1e9,
                            res.params[2], std::abs(res.params[3]) * 1e9,
                            coefficient};
  out.f1_sigma = res.sigma[0] * 1e9;
  out.slope_sigma = res.sigma[1] * 1e9;
  out.v_cross_sigma = res.sigma[2];
  out.g_sigma = res.sigma[3] * 1e9;
  out.one_sided = one_sided;
  if (one_sided) {
    // Data on one side only pins g poorly; inflate the reported
    // uncertainty so downstream consumers see the conditioning.
    out.g_sigma = std::max(out.g_sigma, out.model.g_2pi);
  }
  std::vector<double> r = prob.residual(res.params);
  out.residuals_hz.resize(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) out.residuals_hz[i] = r[i] * 1e9;
  return out;
}

DetuningMetrics detuning_metrics(const CrossingData& data) {
  data.validate();
  const std::size_t n = data.gate_v.size();
  if (n < 2)
    throw std::invalid_argument("detuning_metrics: need >= 2 rows");

  DetuningMetrics out;
  out.delta.resize(n);
  std::size_t i_min = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.delta[i] = std::abs(data.f_plus[i] - data.f_minus[i]);
    if (out.delta[i] < out.delta[i_min]) i_min = i;
  }
  out.min_delta = out.delta[i_min];

  // Side classification by the sum f+ + f- = f1 + f2 relative to its
  // value at the minimum splitting (where f2 = f1): larger sum means
  // f2 > f1.
  double sum_min = data.f_plus[i_min] + data.f_minus[i_min];
  double high = 0.0, low = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = data.f_plus[i] + data.f_minus[i];
    if (sum > sum_min) high = std::max(high, out.delta[i]);
    if (sum < sum_min) low = std::max(low, out.delta[i]);
  }
  // A symmetric or one-sided table falls back to the overall extremes.
  double dmax = *std::max_element(out.delta.begin(), out.delta.end());
  if (high == 0.0) high = dmax;
  if (low == 0.0) low = dmax;
  out.on_off_high_side = high / out.min_delta;
  out.on_off_low_side = low / out.min_delta;
  return out;
}

}  // namespace tunres::coupling
