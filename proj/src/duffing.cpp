#include "tunres/duffing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tunres/constants.hpp"

namespace tunres::duffing {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
// Reduced drive^2 at the critical point: u_c [(sqrt(3)-u_c)^2+1] with
// u_c = 2/sqrt(3).
constexpr double kDriveCrit = 8.0 / (3.0 * kSqrt3);

double cubic_value(double u, double omega, double drive) {
  double d = omega - u;
  return u * (d * d + 1.0) - drive;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (hi + v[mid - 1]);
}

// Scaled median absolute deviation (consistent with a Gaussian sigma).
double mad_of(const std::vector<double>& v, double med) {
  std::vector<double> a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i] - med);
  return 1.4826 * median_of(std::move(a));
}

// 1-D median filter with edge replication.
std::vector<double> median_filter(const std::vector<double>& v, int size) {
  const int n = static_cast<int>(v.size());
  const int half = size / 2;
  std::vector<double> out(n);
  std::vector<double> win;
  for (int i = 0; i < n; ++i) {
    win.clear();
    for (int j = i - half; j <= i + half; ++j)
      win.push_back(v[std::clamp(j, 0, n - 1)]);
    out[i] = median_of(win);
  }
  return out;
}

}  // namespace

std::vector<double> steady_amplitudes(double omega, double p_rel) {
  if (p_rel < 0.0)
    throw std::domain_error("steady_amplitudes: p_rel must be >= 0");
  if (p_rel == 0.0) return {0.0};

  const double drive = p_rel * kDriveCrit;
  // u^3 - 2 omega u^2 + (omega^2 + 1) u - drive = 0, depressed with
  // u = t + 2 omega / 3.
  const double shift = 2.0 * omega / 3.0;
  const double p = 1.0 - omega * omega / 3.0;
  const double q = cubic_value(shift, omega, drive);

  std::vector<double> roots;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0.0) {
    double s = std::sqrt(disc);
    double t = std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s);
    roots.push_back(t + shift);
  } else {
    double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    double phase = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots.push_back(m * std::cos(phase - 2.0 * constants::pi * k / 3.0) +
                      shift);
  }

  // One Newton step per root against the undepressed cubic; skipped
  // near folds where the derivative vanishes and the step would hop
  // between roots.
  for (double& u : roots) {
    double fd = (omega - u) * (omega - u) + 1.0 - 2.0 * u * (omega - u);
    if (std::abs(fd) > 1e-300) {
      double delta = cubic_value(u, omega, drive) / fd;
      if (std::abs(delta) < 1e-3 * (1.0 + std::abs(u))) u -= delta;
    }
    if (u < 0.0) u = 0.0;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::pair<double, double> bifurcation_locus(double omega) {
  if (!(omega > kSqrt3))
    throw std::domain_error("bifurcation_locus: omega must exceed sqrt(3)");
  double s = std::sqrt(omega * omega - 3.0);
  double u_plus = (2.0 * omega + s) / 3.0;
  double u_minus = (2.0 * omega - s) / 3.0;
  auto p_of = [&](double u) { return cubic_value(u, omega, 0.0) / kDriveCrit; };
  return {p_of(u_plus), p_of(u_minus)};
}

std::pair<double, double> universal_curve(double omega, Regime regime,
                                          Eq2Exponent exponent) {
  if (regime == Regime::below) {
    if (omega < 1.0 / kSqrt3 - 1e-12 || omega > kSqrt3 + 1e-12)
      throw std::domain_error(
          "universal_curve: below-critical branch needs omega in "
          "[1/sqrt(3), sqrt(3)]");
    double p = omega * kSqrt3 / 2.0 - 0.5;
    return {p, p};
  }
  if (!(omega > kSqrt3))
    throw std::domain_error(
        "universal_curve: above-critical branch needs omega > sqrt(3)");
  double e = exponent == Eq2Exponent::three_halves ? 1.5 : 2.0 / 3.0;
  double base = omega * omega * omega / (12.0 * kSqrt3);
  double inner = std::pow(1.0 - 3.0 / (omega * omega), e);
  double common = 1.0 + 9.0 / (omega * omega);
  return {base * (common - inner), base * (common + inner)};
}

std::vector<std::complex<double>> sweep(const SweepModel& model,
                                        const std::vector<double>& freqs,
                                        double p_dbm, SweepDirection dir) {
  const auto& par = model.params;
  if (!(par.q_l > 1.0))
    throw std::domain_error("sweep: q_l must exceed 1");
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (!(freqs[i] > freqs[i - 1]))
      throw std::invalid_argument("sweep: freqs must be strictly ascending");

  const double p_rel = std::pow(10.0, (p_dbm - par.p_c_dbm) / 10.0);
  const std::size_t n = freqs.size();
  std::vector<std::complex<double>> out(n);
  const std::complex<double> i_unit(0.0, 1.0);
  const std::complex<double> dip =
      (par.q_l / model.q_ext_mag) * std::exp(i_unit * model.phi);

  double u_prev = 0.0;
  bool first = true;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t k = dir == SweepDirection::forward ? step : n - 1 - step;
    double omega_d = 2.0 * par.q_l * (par.f_r - freqs[k]) / par.f_r;
    std::vector<double> roots = steady_amplitudes(omega_d, p_rel);
    // Outermost roots are the stable branches; the middle one never is.
    double lo = roots.front();
    double hi = roots.back();
    double u;
    if (first) {
      u = lo;
      first = false;
    } else if (roots.size() >= 3) {
      u = std::abs(lo - u_prev) <= std::abs(hi - u_prev) ? lo : hi;
    } else {
      u = lo;
    }
    u_prev = u;
    out[k] = model.amp * (1.0 - dip / (1.0 - i_unit * (omega_d - u)));
  }
  return out;
}

FbResult extract_fb(const std::vector<double>& freqs,
                    const std::vector<double>& mag) {
  const std::size_t n = freqs.size();
  if (n != mag.size()) throw std::invalid_argument("extract_fb: size mismatch");
  if (n < 3) throw std::invalid_argument("extract_fb: need >= 3 points");

  bool increasing = true, decreasing = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (mag[i] > mag[i - 1]) decreasing = false;
    if (mag[i] < mag[i - 1]) increasing = false;
  }
  if (increasing || decreasing)
    throw std::runtime_error("extract_fb: trace is monotone, no dip");

  // Downward slope per step; f_B tracks the steepest descent.
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    d[i] = -(mag[i + 1] - mag[i]) / (freqs[i + 1] - freqs[i]);
  double dmax = *std::max_element(d.begin(), d.end());
  std::size_t i_raw =
      std::max_element(d.begin(), d.end()) - d.begin();

  double med = median_of(d);
  double mad = mad_of(d, med) + 1e-300;
  // A branch jump concentrates its whole amplitude change in one step;
  // the largest noise step over ~1000 samples sits near 4 sigma, so 6
  // robust sigmas separates the two populations.
  bool jump = dmax > med + 6.0 * mad;
  if (jump) return {freqs[i_raw], dmax, true};

  // Smooth regime: cubic Savitzky-Golay derivative over a 61-point
  // window (the cubic term cancels the curvature-asymmetry bias a plain
  // windowed slope picks up on a resonance dip), edges excluded.
  const int w = 61;
  const int half = w / 2;
  double s2 = 0.0, s4 = 0.0, s6 = 0.0;
  for (int x = -half; x <= half; ++x) {
    double x2 = static_cast<double>(x) * x;
    s2 += x2;
    s4 += x2 * x2;
    s6 += x2 * x2 * x2;
  }
  const double det = s2 * s6 - s4 * s4;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t i_best = n / 2;
  if (n > static_cast<std::size_t>(2 * w)) {
    for (std::size_t i = w; i + w < n; ++i) {
      double sx = 0.0, sx3 = 0.0;
      for (int x = -half; x <= half; ++x) {
        sx += x * mag[i + x];
        sx3 += static_cast<double>(x) * x * x * mag[i + x];
      }
      double slope = -((s6 * sx - s4 * sx3) / det) /
                     ((freqs.back() - freqs.front()) / (n - 1));
      if (slope > best) {
        best = slope;
        i_best = i;
      }
    }
  } else {
    i_best = i_raw;
    best = dmax;
  }
  return {freqs[i_best], dmax, false};
}

FbResult extract_fb(const spectro::ComplexTrace& trace) {
  std::vector<double> mag(trace.s21.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(trace.s21[i]);
  return extract_fb(trace.freq, mag);
}

PcExtraction extract_pc(const std::vector<spectro::ComplexTrace>& stack) {
  const std::size_t np = stack.size();
  if (np < 3) throw std::invalid_argument("extract_pc: need >= 3 power steps");

  std::vector<double> powers(np);
  for (std::size_t k = 0; k < np; ++k) {
    if (!stack[k].meta.power_dbm)
      throw std::invalid_argument("extract_pc: trace missing power_dbm");
    powers[k] = *stack[k].meta.power_dbm;
  }
  double step = powers[1] - powers[0];
  if (!(step > 0.0))
    throw std::invalid_argument("extract_pc: powers must ascend");
  for (std::size_t k = 1; k < np; ++k)
    if (std::abs(powers[k] - powers[k - 1] - step) > 1e-6 * std::abs(step))
      throw std::invalid_argument("extract_pc: power grid must be uniform");

  PcExtraction out;
  out.powers_dbm = powers;
  out.f_b.resize(np);
  out.jump.resize(np);
  std::vector<double> smax(np);
  for (std::size_t k = 0; k < np; ++k) {
    FbResult fb = extract_fb(stack[k]);
    out.f_b[k] = fb.f_b;
    out.jump[k] = fb.jump;
    smax[k] = fb.strength;
  }
  out.bifurcated =
      std::any_of(out.jump.begin(), out.jump.end(), [](bool b) { return b; });

  // Smooths the f_B estimates across power on a run of smooth traces:
  // median despikes, then a local linear fit against linear power
  // averages the jitter. Below onset f_B is linear in drive power to
  // leading order, so the fit is close to unbiased even with a wide
  // window, unlike a boxcar on the curved dBm axis.
  auto smooth_run = [&](std::size_t lo, std::size_t hi) {
    if (hi - lo <= 15) return;
    std::vector<double> run(out.f_b.begin() + lo, out.f_b.begin() + hi);
    std::vector<double> filtered = median_filter(run, 9);
    const int m = static_cast<int>(filtered.size());
    for (int i = 0; i < m; ++i) {
      int a = std::max(0, i - 30);
      int b = std::min(m - 1, i + 30);
      double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
      int n = b - a + 1;
      for (int j = a; j <= b; ++j) {
        double t = std::pow(10.0, powers[lo + j] / 10.0);
        st += t;
        sy += filtered[j];
        stt += t * t;
        sty += t * filtered[j];
      }
      double den = n * stt - st * st;
      double slope = (n * sty - st * sy) / den;
      double icept = (sy - slope * st) / n;
      out.f_b[lo + i] =
          icept + slope * std::pow(10.0, powers[lo + i] / 10.0);
    }
  };

  if (!out.bifurcated) {
    smooth_run(0, np);
    out.p_c_dbm = std::numeric_limits<double>::quiet_NaN();
    out.edge_warning = false;
    return out;
  }

  // Critical power: smoothed max-susceptibility curve, then the earlier
  // of the cross-power derivative argmax and the first sustained
  // crossing of the noise floor.
  std::vector<double> m = median_filter(smax, 3);
  std::size_t i_arg = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < np; ++k) {
    double dm = m[k + 1] - m[k];
    if (dm > best) {
      best = dm;
      i_arg = k + 1;
    }
  }
  double p_arg = powers[i_arg];

  std::size_t nfloor = std::max<std::size_t>(3, np / 5);
  std::vector<double> nf(smax.begin(), smax.begin() + nfloor);
  double med = median_of(nf);
  // The per-trace strength is a max over ~1000 noise steps and so sits
  // in a narrow band on the linear side; a modest excursion sustained
  // over two powers already marks the onset. A high threshold instead
  // waits for the jump to grow well out of the noise and lands late.
  double thr = med + 4.0 * mad_of(nf, med);
  double p_det = p_arg;
  for (std::size_t k = 0; k + 1 < np; ++k)
    if (m[k] > thr && m[k + 1] > thr) {
      p_det = powers[k];
      break;
    }

  out.p_c_dbm = std::min(p_arg, p_det);
  std::size_t i_pc = static_cast<std::size_t>(
      std::lround((out.p_c_dbm - powers[0]) / step));
  out.edge_warning = i_pc < 5 || i_pc + 5 >= np;

  // Bifurcation onset is a single power threshold, so reconcile the
  // per-trace flags with it. A trace at or above onset always carries a
  // branch jump; if the per-trace test missed it (small jump close to
  // the noise), locate it with a windowed step detector, which averages
  // five points on each side and beats the single-step noise.
  for (std::size_t k = 0; k < np; ++k) {
    if (k < i_pc) {
      out.jump[k] = false;
      continue;
    }
    if (!out.jump[k]) {
      const auto& tr = stack[k];
      const std::size_t n = tr.s21.size();
      std::vector<double> mag(n);
      for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(tr.s21[i]);
      const std::size_t m = 5;
      double gbest = -1.0;
      std::size_t ib = n / 2;
      for (std::size_t i = m; i + m < n; ++i) {
        double before = 0.0, after = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          before += mag[i - 1 - j];
          after += mag[i + j];
        }
        double g = std::abs(after - before) / m;
        if (g > gbest) {
          gbest = g;
          ib = i;
        }
      }
      out.f_b[k] = tr.freq[ib];
    }
    out.jump[k] = true;
  }
  smooth_run(0, std::min(i_pc, np));
  return out;
}

ReducedPoint rescale(double f_b, double p_dbm, const DuffingParams& params) {
  double omega = 2.0 * params.q_l * (params.f_r - f_b) / params.f_r;
  double p_rel = std::pow(10.0, (p_dbm - params.p_c_dbm) / 10.0);
  return {omega, p_rel};
}

}  // namespace tunres::duffing
