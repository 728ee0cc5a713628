#include "tunres/fitcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tunres::fitcore {
namespace {

// Solves (A + lambda diag(A)) x = b for symmetric positive definite A
// via Cholesky. Returns false if the factorization breaks down.
bool solve_damped(const std::vector<double>& a, std::vector<double> diag_scale,
                  double lambda, const std::vector<double>& b,
                  std::vector<double>& x, std::size_t n) {
  std::vector<double> m(a);
  for (std::size_t i = 0; i < n; ++i) {
    m[i * n + i] += lambda * std::max(diag_scale[i], 1e-30);
  }
  // Cholesky factorization in place (lower triangle).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= m[i * n + k] * m[j * n + k];
      if (i == j) {
        if (s <= 0.0) return false;
        m[i * n + i] = std::sqrt(s);
      } else {
        m[i * n + j] = s / m[j * n + j];
      }
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= m[i * n + k] * x[k];
    x[i] = s / m[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= m[k * n + ii] * x[k];
    x[ii] = s / m[ii * n + ii];
  }
  return true;
}

// Inverse of symmetric positive definite A, with escalating ridge if the
// factorization fails (near-singular covariance).
std::vector<double> spd_inverse(std::vector<double> a, std::size_t n) {
  double ridge = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<double> inv(n * n, 0.0);
    std::vector<double> col(n), e(n, 0.0);
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      e.assign(n, 0.0);
      e[j] = 1.0;
      std::vector<double> ones(n, 1.0);
      ok = solve_damped(a, ones, ridge, e, col, n);
      if (ok) {
        for (std::size_t i = 0; i < n; ++i) inv[i * n + j] = col[i];
      }
    }
    if (ok) {
      // Symmetrize against round-off.
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
          double v = 0.5 * (inv[i * n + j] + inv[j * n + i]);
          inv[i * n + j] = inv[j * n + i] = v;
        }
      return inv;
    }
    double maxdiag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      maxdiag = std::max(maxdiag, std::abs(a[i * n + i]));
    ridge = (ridge == 0.0) ? 1e-12 * std::max(maxdiag, 1.0) : ridge * 100.0;
  }
  return std::vector<double>(n * n, 0.0);
}

void project(std::vector<double>& p, const std::vector<double>& lo,
             const std::vector<double>& hi) {
  if (!lo.empty())
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(p[i], lo[i]);
  if (!hi.empty())
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::min(p[i], hi[i]);
}

double cost_of(const std::vector<double>& r) {
  double c = 0.0;
  for (double v : r) c += v * v;
  return 0.5 * c;
}

bool all_finite(const std::vector<double>& r) {
  return std::all_of(r.begin(), r.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace

FitResult solve(const FitProblem& problem) {
  const std::size_t n = problem.initial.size();
  if (n == 0) throw FitError("fitcore: empty parameter vector");
  if (!problem.residual) throw FitError("fitcore: no residual function");
  if (!problem.lower.empty() && problem.lower.size() != n)
    throw FitError("fitcore: bound size mismatch");
  if (!problem.upper.empty() && problem.upper.size() != n)
    throw FitError("fitcore: bound size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    double lo = problem.lower.empty() ? -std::numeric_limits<double>::infinity()
                                      : problem.lower[i];
    double hi = problem.upper.empty() ? std::numeric_limits<double>::infinity()
                                      : problem.upper[i];
    if (lo > hi) throw FitError("fitcore: lower bound above upper bound");
    if (problem.initial[i] < lo || problem.initial[i] > hi)
      throw FitError("fitcore: initial point outside bounds");
  }

  std::vector<double> p = problem.initial;
  std::vector<double> r = problem.residual(p);
  if (!all_finite(r)) throw FitError("fitcore: non-finite residual at start");
  const std::size_t m = r.size();
  if (m == 0) throw FitError("fitcore: empty residual");
  double cost = cost_of(r);

  FitResult out;
  out.params = p;
  out.cost = cost;
  out.covariance.assign(n * n, 0.0);
  out.sigma.assign(n, 0.0);

  if (cost == 0.0) {
    out.converged = true;
    return out;
  }

  auto jacobian = [&](const std::vector<double>& at,
                      std::vector<double>& jac) {
    // Central differences, step = max(1e-8, 1e-8 |p_i|), clipped at
    // bounds by falling back to one-sided differences.
    jac.assign(m * n, 0.0);
    std::vector<double> pp(at), pm(at);
    for (std::size_t j = 0; j < n; ++j) {
      double h = std::max(1e-8, 1e-8 * std::abs(at[j]));
      pp = at;
      pm = at;
      pp[j] += h;
      pm[j] -= h;
      project(pp, problem.lower, problem.upper);
      project(pm, problem.lower, problem.upper);
      double dh = pp[j] - pm[j];
      if (dh == 0.0) continue;
      std::vector<double> rp = problem.residual(pp);
      std::vector<double> rm = problem.residual(pm);
      if (rp.size() != m || rm.size() != m)
        throw FitError("fitcore: residual size changed");
      for (std::size_t i = 0; i < m; ++i)
        jac[i * n + j] = (rp[i] - rm[i]) / dh;
    }
  };

  std::vector<double> jac, jtj(n * n), jtr(n), diag(n), step, trial_p,
      trial_r;
  double lambda = -1.0;  // initialized from the first JtJ diagonal
  double nu = 2.0;
  bool converged = false;
  int iter = 0;

  for (; iter < problem.max_iterations; ++iter) {
    jacobian(p, jac);
    std::fill(jtj.begin(), jtj.end(), 0.0);
    std::fill(jtr.begin(), jtr.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t a = 0; a < n; ++a) {
        double ja = jac[i * n + a];
        jtr[a] += ja * r[i];
        for (std::size_t b = 0; b <= a; ++b)
          jtj[a * n + b] += ja * jac[i * n + b];
      }
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) jtj[a * n + b] = jtj[b * n + a];
    for (std::size_t a = 0; a < n; ++a) diag[a] = jtj[a * n + a];

    double gmax = 0.0;
    for (double g : jtr) gmax = std::max(gmax, std::abs(g));
    if (gmax < problem.grad_tol) {
      converged = true;
      break;
    }
    // Small initial damping keeps near-linear problems one-step exact;
    // the gain-ratio rule inflates it quickly when the model is poor.
    if (lambda < 0.0) lambda = 1e-6;

    std::vector<double> neg_g(n);
    for (std::size_t a = 0; a < n; ++a) neg_g[a] = -jtr[a];

    bool accepted = false;
    for (int inner = 0; inner < 32 && !accepted; ++inner) {
      if (!solve_damped(jtj, diag, lambda, neg_g, step, n)) {
        lambda *= nu;
        nu *= 2.0;
        continue;
      }
      trial_p = p;
      for (std::size_t a = 0; a < n; ++a) trial_p[a] += step[a];
      project(trial_p, problem.lower, problem.upper);

      double step_norm = 0.0, p_norm = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        double ds = trial_p[a] - p[a];
        step_norm += ds * ds;
        p_norm += p[a] * p[a];
      }
      if (std::sqrt(step_norm) <
          problem.step_tol * (std::sqrt(p_norm) + problem.step_tol)) {
        converged = true;
        accepted = true;
        break;
      }

      trial_r = problem.residual(trial_p);
      if (trial_r.size() != m)
        throw FitError("fitcore: residual size changed");
      if (!all_finite(trial_r)) {
        lambda *= nu;
        nu *= 2.0;
        continue;
      }
      double trial_cost = cost_of(trial_r);

      // Gain ratio: actual reduction over the reduction predicted by the
      // linearized model.
      double predicted = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        double ds = trial_p[a] - p[a];
        predicted += ds * (lambda * std::max(diag[a], 1e-30) * ds - jtr[a]);
      }
      predicted *= 0.5;
      double actual = cost - trial_cost;
      double rho = (predicted > 0.0) ? actual / predicted : (actual > 0 ? 1.0 : -1.0);

      if (rho > 0.0 && trial_cost <= cost) {
        double rel_drop = (cost - trial_cost) / std::max(cost, 1e-300);
        p = trial_p;
        r = trial_r;
        cost = trial_cost;
        double shrink = 1.0 - std::pow(2.0 * rho - 1.0, 3);
        lambda *= std::max(1.0 / 3.0, shrink);
        nu = 2.0;
        accepted = true;
        if (rel_drop < problem.cost_tol && iter > 0) converged = true;
      } else {
        lambda *= nu;
        nu *= 2.0;
      }
    }
    if (!accepted) converged = true;  // stalled: at a local minimum
    if (converged) break;
  }

  out.params = p;
  out.cost = cost;
  out.iterations = iter;
  out.converged = converged;

  // Covariance: (J^T J)^-1 scaled by reduced chi-square.
  jacobian(p, jac);
  std::fill(jtj.begin(), jtj.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b <= a; ++b)
        jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) jtj[a * n + b] = jtj[b * n + a];
  out.covariance = spd_inverse(jtj, n);
  double scale = (m > n) ? 2.0 * cost / static_cast<double>(m - n) : 1.0;
  for (double& v : out.covariance) v *= scale;
  for (std::size_t a = 0; a < n; ++a)
    out.sigma[a] = std::sqrt(std::max(out.covariance[a * n + a], 0.0));
  return out;
}

}  // namespace tunres::fitcore
