#include "tunres/em_model.hpp"

#include <cmath>
#include <stdexcept>

#include "tunres/constants.hpp"
#include "tunres/fitcore.hpp"

namespace tunres::em_model {

using constants::c_light;
using constants::k_boltzmann_ev;
using constants::pi;

void CpwGeometry::validate() const {
  if (!(center_width > 0.0) || !(gap > 0.0) || !(length > 0.0))
    throw std::domain_error("cpw geometry: lengths must be positive");
  if (!(substrate_eps_r >= 1.0))
    throw std::domain_error("cpw geometry: eps_r must be >= 1");
}

double elliptic_k(double k) {
  if (!(k >= 0.0) || k >= 1.0)
    throw std::domain_error("elliptic_k: modulus must be in [0, 1)");
  // AGM: K(k) = pi / (2 * AGM(1, k')).
  double a = 1.0;
  double b = std::sqrt(1.0 - k * k);
  for (int i = 0; i < 64; ++i) {
    double an = 0.5 * (a + b);
    double bn = std::sqrt(a * b);
    if (std::abs(a - b) < 1e-12 * a) break;
    a = an;
    b = bn;
  }
  return pi / (a + b);
}

CpwElectrical cpw_electricals(const CpwGeometry& geom, double f0) {
  geom.validate();
  if (!(f0 > 0.0)) throw std::domain_error("cpw_electricals: f0 must be > 0");

  double k = geom.center_width / (geom.center_width + 2.0 * geom.gap);
  double kp = std::sqrt(1.0 - k * k);
  double eps_eff = 0.5 * (geom.substrate_eps_r + 1.0);
  double z0 = 30.0 * pi / std::sqrt(eps_eff) * elliptic_k(kp) / elliptic_k(k);

  double w0 = 2.0 * pi * f0;
  double c0 = pi / (4.0 * z0 * w0);
  double l0 = 1.0 / (w0 * w0 * c0);
  return {z0, eps_eff, c0, l0, f0};
}

double quarter_wave_f0(const CpwGeometry& geom, double eps_eff) {
  if (!(geom.length > 0.0))
    throw std::domain_error("quarter_wave_f0: length must be > 0");
  if (!(eps_eff >= 1.0))
    throw std::domain_error("quarter_wave_f0: eps_eff must be >= 1");
  return c_light / (4.0 * geom.length * std::sqrt(eps_eff));
}

double kinetic_fraction(double f_meas, double f_design) {
  if (!(f_meas > 0.0) || !(f_design > 0.0))
    throw std::domain_error("kinetic_fraction: frequencies must be > 0");
  if (f_meas > f_design)
    throw std::domain_error("kinetic_fraction: f_meas above f_design");
  double r = f_meas / f_design;
  return 1.0 - r * r;
}

KineticFilm lk_decompose(double alpha_k, const CpwElectrical& cpw,
                         const CpwGeometry& geom) {
  if (!(alpha_k >= 0.0) || alpha_k >= 1.0)
    throw std::domain_error("lk_decompose: alpha_k must be in [0, 1)");
  geom.validate();
  double lk_total = alpha_k * cpw.l0 / (1.0 - alpha_k);
  double n_squares = geom.length / geom.center_width;
  return {alpha_k, lk_total, lk_total / n_squares, 0.0, 0.0};
}

double two_fluid_shift(double t, double tc, double alpha_k) {
  if (!(tc > 0.0)) throw std::domain_error("two_fluid_shift: tc must be > 0");
  if (t < 0.0 || t >= tc)
    throw std::domain_error("two_fluid_shift: T must be in [0, tc)");
  double x = t / tc;
  double x4 = x * x * x * x;
  return -0.5 * alpha_k / (1.0 - x4) + 0.5 * alpha_k;
}

TcFit fit_tc(std::span<const double> temps, std::span<const double> shifts,
             double alpha_k) {
  if (temps.size() != shifts.size())
    throw std::invalid_argument("fit_tc: size mismatch");
  if (temps.size() < 3) throw std::invalid_argument("fit_tc: need >= 3 points");
  double t_max = temps[0], t_min = temps[0];
  for (double t : temps) {
    t_max = std::max(t_max, t);
    t_min = std::min(t_min, t);
  }
  if (t_max == t_min)
    throw fitcore::FitError("fit_tc: degenerate data, all T equal");

  fitcore::FitProblem prob;
  prob.residual = [&](const std::vector<double>& p) {
    double tc = p[0];
    std::vector<double> r(temps.size());
    for (std::size_t i = 0; i < temps.size(); ++i) {
      double x = temps[i] / tc;
      double x4 = x * x * x * x;
      // The model form stays evaluable past tc during line search;
      // points at or beyond tc blow up and get rejected naturally.
      double model = (x4 >= 1.0)
                         ? -1e6 * (x4 - 1.0 + 1.0)
                         : -0.5 * alpha_k / (1.0 - x4) + 0.5 * alpha_k;
      r[i] = model - shifts[i];
    }
    return r;
  };
  prob.initial = {1.05 * t_max};
  prob.lower = {t_max * (1.0 + 1e-9)};
  prob.upper = {t_max * 1e3};

  fitcore::FitResult res = fitcore::solve(prob);
  if (!res.converged) throw fitcore::FitError("fit_tc: did not converge");
  double tc = res.params[0];
  double tc_sigma = res.sigma[0];
  return {tc, tc_sigma, 1.75 * k_boltzmann_ev * tc,
          1.75 * k_boltzmann_ev * tc_sigma};
}

}  // namespace tunres::em_model
