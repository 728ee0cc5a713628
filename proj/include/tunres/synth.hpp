#pragma once

#include <cstdint>
#include <vector>

#include "tunres/coupling.hpp"
#include "tunres/duffing.hpp"
#include "tunres/spectro.hpp"

// Deterministic synthetic-data factory.
//
// PRNG: 64-bit counter-based. Sample i of stream (seed, tag) is
// splitmix64(splitmix64(seed ^ tag) + i) mapped to (0,1); Gaussians via
// Box-Muller on consecutive counters. Identical (seed, tag) gives
// byte-identical output on any platform.

namespace tunres::synth {

struct NoiseSpec {
  std::uint64_t seed = 0;
  double sigma = 0.0;  // per-quadrature, relative to baseline amplitude
};

struct FrequencyGrid {
  double center;  // Hz
  double span;    // Hz
  int points;
};

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t tag = 0);
  double uniform();   // (0, 1)
  double gaussian();  // standard normal
 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::vector<double> linspace(double lo, double hi, int n);

spectro::ComplexTrace synth_notch(const spectro::NotchModel& model,
                                  const std::vector<double>& freqs,
                                  const NoiseSpec& noise,
                                  spectro::TraceMeta meta = {});

// One trace per power (ascending, uniform step); per-trace noise streams
// derived from the power index.
std::vector<spectro::ComplexTrace> synth_duffing_stack(
    const duffing::SweepModel& model, double p_min_dbm, double p_max_dbm,
    double p_step_db, const FrequencyGrid& grid, const NoiseSpec& noise);

// Branch frequencies on a voltage grid; sigma_hz additive Gaussian on
// both branches.
coupling::CrossingData synth_crossing(const coupling::CrossingModel& model,
                                      const std::vector<double>& gate_v,
                                      std::uint64_t seed, double sigma_hz);

// Two-fluid fractional shifts on a temperature grid; noise sigma is
// relative to the full-scale |shift|.
std::vector<double> synth_tsweep(double tc, double alpha_k,
                                 const std::vector<double>& temps,
                                 const NoiseSpec& noise);

}  // namespace tunres::synth
