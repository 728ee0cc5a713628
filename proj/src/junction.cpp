#include "tunres/junction.hpp"

#include <cmath>
#include <stdexcept>

#include "tunres/constants.hpp"

namespace tunres::junction {

using constants::pi;
using constants::reduced_flux_quantum;

JunctionState lj_from_ic(double ic) {
  if (!(ic > 0.0)) throw std::domain_error("lj_from_ic: ic must be > 0");
  return {reduced_flux_quantum / ic, ic};
}

JunctionState ic_from_lj(double lj) {
  if (!(lj > 0.0)) throw std::domain_error("ic_from_lj: lj must be > 0");
  return {lj, reduced_flux_quantum / lj};
}

double loaded_f0(const TunableResonator& res) {
  if (!(res.cpw.f0 > 0.0) || !(res.cpw.l0 > 0.0))
    throw std::domain_error("loaded_f0: invalid cpw electricals");
  if (res.lk_total < 0.0)
    throw std::domain_error("loaded_f0: lk_total must be >= 0");
  return res.cpw.f0 * std::sqrt(res.cpw.l0 / (res.cpw.l0 + res.lk_total));
}

namespace {

// Bisection for a sign change of g on (lo, hi]; g(hi) > 0 expected.
double bisect(double lo, double hi, const auto& g) {
  double glo = g(lo);
  double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if (glo * ghi > 0.0)
    throw std::runtime_error("junction solver: no root in bracket [" +
                             std::to_string(lo) + ", " + std::to_string(hi) +
                             "]");
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (gm == 0.0) return mid;
    if (glo * gm < 0.0) {
      hi = mid;
      ghi = gm;
    } else {
      lo = mid;
      glo = gm;
    }
    if (hi - lo < 1e-12 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double tunable_frequency(const TunableResonator& res) {
  if (res.junction_position != 0.0)
    throw std::domain_error(
        "tunable_frequency: junction_position must be 0; "
        "use positioned_frequency");
  if (res.lj < 0.0)
    throw std::domain_error("tunable_frequency: lj must be >= 0");
  double f0p = loaded_f0(res);
  if (res.lj == 0.0) return f0p;

  double w0p = 2.0 * pi * f0p;
  double z0 = res.cpw.z0;
  double lj = res.lj;
  // tan(beta l) - Z0/(w LJ) with beta l = (pi/2) w/w0'. Negative at
  // w -> 0+, positive at w0' (tan -> +inf side), single root below the
  // first tan pole.
  auto g = [&](double w) {
    return std::tan(0.5 * pi * w / w0p) - z0 / (w * lj);
  };
  double w = bisect(1e-6 * w0p, w0p * (1.0 - 1e-15), g);
  return w / (2.0 * pi);
}

double lj_from_frequency(const TunableResonator& res, double f_target) {
  double f0p = loaded_f0(res);
  if (!(f_target > 0.0))
    throw std::domain_error("lj_from_frequency: f_target must be > 0");
  if (f_target > f0p)
    throw std::domain_error(
        "lj_from_frequency: f_target above the zero-inductance frequency");
  if (f_target == f0p) return 0.0;

  TunableResonator trial = res;
  trial.junction_position = 0.0;
  auto f_of = [&](double lj) {
    trial.lj = lj;
    return tunable_frequency(trial);
  };
  // f(LJ) is strictly decreasing; expand the upper bracket until it
  // drops below the target.
  double hi = 1e-9;
  while (f_of(hi) > f_target) {
    hi *= 2.0;
    if (hi > 1.0)
      throw std::runtime_error("lj_from_frequency: bracket expansion failed");
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (f_of(mid) > f_target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double participation(double lj, double l0, double lk) {
  if (lj < 0.0 || l0 < 0.0 || lk < 0.0)
    throw std::domain_error("participation: inductances must be >= 0");
  double total = lj + l0 + lk;
  if (!(total > 0.0))
    throw std::domain_error("participation: total inductance must be > 0");
  return lj / total;
}

double positioned_frequency(const TunableResonator& res) {
  double d = res.junction_position;
  if (d < 0.0 || d >= 0.95)
    throw std::domain_error(
        "positioned_frequency: junction_position must be in [0, 0.95)");
  if (d == 0.0) {
    TunableResonator at_ground = res;
    at_ground.junction_position = 0.0;
    return tunable_frequency(at_ground);
  }
  if (res.lj < 0.0)
    throw std::domain_error("positioned_frequency: lj must be >= 0");

  double f0p = loaded_f0(res);
  if (res.lj == 0.0) return f0p;

  double w0p = 2.0 * pi * f0p;
  double z0 = res.cpw.z0;
  double lj = res.lj;
  // Input impedance looking from the coupled (open) end must diverge at
  // resonance; the root condition below is the finite form:
  // Z0 = (w LJ + Z0 tan(beta d l)) tan(beta (1-d) l), beta l = (pi/2) w/w0'.
  auto g = [&](double w) {
    double bl = 0.5 * pi * w / w0p;
    return (w * lj + z0 * std::tan(bl * d)) * std::tan(bl * (1.0 - d)) - z0;
  };
  double w = bisect(1e-6 * w0p, w0p * (1.0 - 1e-15), g);
  return w / (2.0 * pi);
}

}  // namespace tunres::junction
