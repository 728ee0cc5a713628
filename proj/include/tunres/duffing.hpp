#pragma once

#include <utility>
#include <vector>

#include "tunres/spectro.hpp"

// Steady-state Duffing engine in reduced units: the response energy u
// at reduced detuning Omega = 2 Q_L (f_r - f)/f_r under relative drive
// p = P/P_C solves u [ (Omega - u)^2 + 1 ] = p * 8/(3 sqrt(3)).
// The fold first appears at Omega = sqrt(3), p = 1.

namespace tunres::duffing {

struct DuffingParams {
  double f_r;       // Hz, linear resonant frequency
  double q_l;       // loaded Q, > 1
  double p_c_dbm;   // critical power
};

struct ReducedPoint {
  double omega;
  double p_rel;
};

enum class Regime { above, below };
enum class Eq2Exponent { three_halves, printed_two_thirds };
enum class SweepDirection { forward, backward };

struct SweepModel {
  DuffingParams params;
  double q_ext_mag;
  double phi = 0.0;
  double amp = 1.0;
};

struct FbResult {
  double f_b;       // Hz
  double strength;  // max |d|S21|/df| (per grid step)
  bool jump;        // discontinuity detected
};

struct PcExtraction {
  double p_c_dbm;
  bool bifurcated;     // false: no discontinuity anywhere in the stack
  bool edge_warning;   // extracted P_C at the power-grid boundary
  std::vector<double> powers_dbm;
  std::vector<double> f_b;          // median-filtered across power
  std::vector<bool> jump;
};

// Real positive roots of the reduced cubic, ascending (double roots
// reported twice).
std::vector<double> steady_amplitudes(double omega, double p_rel);

// Fold powers (p_lower, p_upper)/P_C from the double-root condition
// 3u^2 - 4 Omega u + Omega^2 + 1 = 0. Requires omega > sqrt(3).
std::pair<double, double> bifurcation_locus(double omega);

// Above: P/P_C = Omega^3/(12 sqrt(3)) [1 + 9/Omega^2 -/+ (1-3/Omega^2)^e]
// with e = 3/2 (default) or the printed 2/3; returns (lower, upper).
// Below: P/P_C = Omega sqrt(3)/2 - 1/2 (single value, returned twice).
std::pair<double, double> universal_curve(
    double omega, Regime regime,
    Eq2Exponent exponent = Eq2Exponent::three_halves);

// Hysteretic swept response: at each frequency keep the stable branch
// connected to the previous point, jumping at folds. Frequencies must
// ascend; backward sweeps are traversed from the top.
std::vector<std::complex<double>> sweep(const SweepModel& model,
                                        const std::vector<double>& freqs,
                                        double p_dbm,
                                        SweepDirection dir =
                                            SweepDirection::forward);

// f_B = frequency of maximum -d|S21|/df. Jump traces use the raw
// forward-difference argmax; smooth traces a windowed slope estimate.
FbResult extract_fb(const std::vector<double>& freqs,
                    const std::vector<double>& mag);

FbResult extract_fb(const spectro::ComplexTrace& trace);

// Critical power from a uniformly power-stepped stack: per-power max
// susceptibility, median-3 smoothed, then the earlier of the cross-power
// derivative argmax and the first sustained threshold crossing.
PcExtraction extract_pc(const std::vector<spectro::ComplexTrace>& stack);

ReducedPoint rescale(double f_b, double p_dbm, const DuffingParams& params);

}  // namespace tunres::duffing
