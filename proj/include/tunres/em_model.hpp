#pragma once

#include <span>
#include <vector>

// CPW design electricals from zero-thickness conformal mapping and
// kinetic-inductance thermometry (two-fluid frequency shift).

namespace tunres::em_model {

struct CpwGeometry {
  double center_width;     // m
  double gap;              // m
  double length;           // m
  double substrate_eps_r;  // relative permittivity

  void validate() const;  // throws std::domain_error
};

struct CpwElectrical {
  double z0;       // ohm
  double eps_eff;  // dimensionless
  double c0;       // F
  double l0;       // H
  double f0;       // Hz
};

struct KineticFilm {
  double alpha_k;        // fraction of total inductance
  double lk_total;       // H
  double lk_per_square;  // H
  double tc = 0.0;       // K, 0 if not fitted
  double gap0 = 0.0;     // eV, 1.75 k_B Tc
};

struct TcFit {
  double tc;            // K
  double tc_sigma;      // K
  double gap0_ev;       // eV
  double gap0_sigma_ev; // eV
};

// Complete elliptic integral of the first kind, modulus k in [0, 1).
// AGM iteration, relative tolerance 1e-12.
double elliptic_k(double k);

// Z0 and eps_eff from the conformal map with k = w/(w+2s);
// C0 = pi/(4 Z0 w0), L0 = 1/(w0^2 C0).
CpwElectrical cpw_electricals(const CpwGeometry& geom, double f0);

// Quarter-wave frequency c/(4 l sqrt(eps_eff)).
double quarter_wave_f0(const CpwGeometry& geom, double eps_eff);

// alpha_K = 1 - (f_meas/f_design)^2. Requires 0 < f_meas <= f_design.
double kinetic_fraction(double f_meas, double f_design);

// lk_total = alpha L0/(1-alpha); per-square value divides by
// length/center_width (center conductor squares only).
KineticFilm lk_decompose(double alpha_k, const CpwElectrical& cpw,
                         const CpwGeometry& geom);

// Two-fluid fractional shift, Eq. of the form
// df/f = -alpha/2 / (1 - (T/Tc)^4) + alpha/2. Requires 0 <= T < tc.
double two_fluid_shift(double t, double tc, double alpha_k);

// Least-squares Tc from (T, df/f) points at fixed alpha_K.
TcFit fit_tc(std::span<const double> temps, std::span<const double> shifts,
             double alpha_k);

}  // namespace tunres::em_model
