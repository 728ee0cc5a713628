#include "tunres/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "tunres/constants.hpp"
#include "tunres/em_model.hpp"

namespace tunres::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t tag)
    : key_(splitmix64(seed ^ splitmix64(tag))) {}

double CounterRng::uniform() {
  std::uint64_t bits = splitmix64(key_ + counter_++);
  // 53-bit mantissa mapped to (0, 1); never exactly 0 or 1.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * constants::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("linspace: need >= 2 points");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return out;
}

spectro::ComplexTrace synth_notch(const spectro::NotchModel& model,
                                  const std::vector<double>& freqs,
                                  const NoiseSpec& noise,
                                  spectro::TraceMeta meta) {
  if (noise.sigma < 0.0)
    throw std::invalid_argument("synth_notch: sigma must be >= 0");
  spectro::ComplexTrace out;
  out.freq = freqs;
  out.s21.resize(freqs.size());
  out.meta = meta;
  CounterRng rng(noise.seed);
  double s = noise.sigma * model.amp;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    std::complex<double> v = spectro::notch_s21(model, freqs[i]);
    if (s > 0.0) v += std::complex<double>(s * rng.gaussian(), s * rng.gaussian());
    out.s21[i] = v;
  }
  out.validate();
  return out;
}

std::vector<spectro::ComplexTrace> synth_duffing_stack(
    const duffing::SweepModel& model, double p_min_dbm, double p_max_dbm,
    double p_step_db, const FrequencyGrid& grid, const NoiseSpec& noise) {
  if (!(p_step_db > 0.0) || !(p_max_dbm >= p_min_dbm))
    throw std::invalid_argument("synth_duffing_stack: bad power grid");
  if (grid.points < 16)
    throw std::invalid_argument("synth_duffing_stack: need >= 16 points");

  std::vector<double> freqs = linspace(grid.center - 0.5 * grid.span,
                                       grid.center + 0.5 * grid.span,
                                       grid.points);
  int nsteps =
      static_cast<int>(std::floor((p_max_dbm - p_min_dbm) / p_step_db + 1e-9)) +
      1;
  std::vector<spectro::ComplexTrace> stack;
  stack.reserve(nsteps);
  double s = noise.sigma * model.amp;
  for (int k = 0; k < nsteps; ++k) {
    double p = p_min_dbm + k * p_step_db;
    spectro::ComplexTrace tr;
    tr.freq = freqs;
    tr.s21 = duffing::sweep(model, freqs, p);
    tr.meta.power_dbm = p;
    CounterRng rng(noise.seed, static_cast<std::uint64_t>(k) + 1);
    if (s > 0.0)
      for (auto& v : tr.s21)
        v += std::complex<double>(s * rng.gaussian(), s * rng.gaussian());
    stack.push_back(std::move(tr));
  }
  return stack;
}

coupling::CrossingData synth_crossing(const coupling::CrossingModel& model,
                                      const std::vector<double>& gate_v,
                                      std::uint64_t seed, double sigma_hz) {
  coupling::CrossingData out;
  out.gate_v = gate_v;
  out.f_plus.resize(gate_v.size());
  out.f_minus.resize(gate_v.size());
  CounterRng rng(seed, 0xc105511);
  for (std::size_t i = 0; i < gate_v.size(); ++i) {
    auto [fp, fm] = coupling::branch_frequencies(model, gate_v[i]);
    if (sigma_hz > 0.0) {
      fp += sigma_hz * rng.gaussian();
      fm += sigma_hz * rng.gaussian();
    }
    out.f_plus[i] = std::max(fp, fm);
    out.f_minus[i] = std::min(fp, fm);
  }
  return out;
}

std::vector<double> synth_tsweep(double tc, double alpha_k,
                                 const std::vector<double>& temps,
                                 const NoiseSpec& noise) {
  std::vector<double> shifts(temps.size());
  double full_scale = 0.0;
  for (std::size_t i = 0; i < temps.size(); ++i) {
    shifts[i] = em_model::two_fluid_shift(temps[i], tc, alpha_k);
    full_scale = std::max(full_scale, std::abs(shifts[i]));
  }
  if (noise.sigma > 0.0) {
    CounterRng rng(noise.seed, 0x75f1d);
    double s = noise.sigma * full_scale;
    for (auto& v : shifts) v += s * rng.gaussian();
  }
  return shifts;
}

}  // namespace tunres::synth
