#pragma once

#include <complex>
#include <optional>
#include <vector>

// Notch-type S21 forward model and circle-fit parameter extraction.

namespace tunres::spectro {

struct TraceMeta {
  std::optional<double> power_dbm;
  std::optional<double> gate_v;
  std::optional<double> temp_k;
};

struct ComplexTrace {
  std::vector<double> freq;                 // Hz, strictly ascending
  std::vector<std::complex<double>> s21;
  TraceMeta meta;

  void validate() const;  // throws std::invalid_argument
};

struct NotchModel {
  double f_r;         // Hz
  double q_l;         // loaded Q
  double q_ext_mag;   // |Q_ext|
  double phi = 0.0;   // impedance-mismatch angle, rad
  double amp = 1.0;   // baseline amplitude
  double phase0 = 0.0;  // baseline phase, rad
  double delay = 0.0;   // cable delay, s
};

struct ResonanceFit {
  NotchModel model;
  double q_int = 0.0;
  // 1-sigma uncertainties
  double f_r_sigma = 0.0;
  double q_l_sigma = 0.0;
  double q_ext_sigma = 0.0;
  double q_int_sigma = 0.0;
  double phi_sigma = 0.0;
  double residual_rms = 0.0;
  bool delay_fixed = false;  // span < 3 linewidths, delay pinned to 0
};

std::complex<double> notch_s21(const NotchModel& model, double f);

// Pipeline: delay removal (outer-10% phase slope + circularity
// refinement), algebraic circle fit, phase-vs-frequency fit, baseline
// anchor, then a full-model least-squares polish for uncertainties.
// Traces longer than 4001 points are bin-averaged before fitting.
ResonanceFit circle_fit(const ComplexTrace& trace);

// <n> = 2/(hbar w_r^2) * Q_L^2/|Q_ext| * P_in(W); p_in in dBm.
double photon_number(double p_in_dbm, const ResonanceFit& fit);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace tunres::spectro
