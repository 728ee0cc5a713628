#pragma once

#include <utility>
#include <vector>

// Two-oscillator avoided-crossing model, crossing fit, and detuning /
// on-off ratio metrics.

namespace tunres::coupling {

// The branch splitting uses f+- = (f1+f2)/2 +- sqrt((g/2pi)^2 +
// kappa (f1-f2)^2). The source equation prints kappa = 1/2; the
// textbook coupled-oscillator form has kappa = 1/4. Both are provided.
enum class Coefficient { half, quarter };

struct CrossingModel {
  double f1;       // Hz, fixed mode
  double slope;    // Hz/V, tunable mode df2/dV
  double v_cross;  // V where f2 = f1
  double g_2pi;    // Hz, coupling strength
  Coefficient coefficient = Coefficient::half;
};

struct CrossingData {
  std::vector<double> gate_v;
  std::vector<double> f_plus;   // Hz
  std::vector<double> f_minus;  // Hz

  void validate() const;
};

struct CrossingFit {
  CrossingModel model;
  double f1_sigma = 0.0;
  double slope_sigma = 0.0;
  double v_cross_sigma = 0.0;
  double g_sigma = 0.0;
  bool one_sided = false;  // data does not span the crossing
  std::vector<double> residuals_hz;  // f+ rows then f- rows
};

struct DetuningMetrics {
  std::vector<double> delta;  // |f+ - f-| per row
  double min_delta;
  double on_off_high_side;  // reference on the f2 > f1 side
  double on_off_low_side;   // reference on the f2 < f1 side
};

std::pair<double, double> branch_frequencies(const CrossingModel& model,
                                             double v);

CrossingFit fit_crossing(const CrossingData& data,
                         Coefficient coefficient = Coefficient::half);

// On/off ratio = Delta at the far reference voltage / min Delta, taken
// separately on each side of the minimum.
DetuningMetrics detuning_metrics(const CrossingData& data);

}  // namespace tunres::coupling
