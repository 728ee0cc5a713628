#include "tunres/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tunres/constants.hpp"
#include "tunres/fitcore.hpp"

namespace tunres::spectro {

using constants::hbar;
using constants::pi;

void ComplexTrace::validate() const {
  if (freq.size() != s21.size())
    throw std::invalid_argument("trace: freq/s21 size mismatch");
  if (freq.size() < 16)
    throw std::invalid_argument("trace: need at least 16 points");
  for (std::size_t i = 1; i < freq.size(); ++i)
    if (!(freq[i] > freq[i - 1]))
      throw std::invalid_argument("trace: freq must be strictly ascending");
}

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watts_to_dbm(double watts) {
  if (!(watts > 0.0))
    throw std::domain_error("watts_to_dbm: power must be > 0");
  return 10.0 * std::log10(watts / 1e-3);
}

std::complex<double> notch_s21(const NotchModel& m, double f) {
  std::complex<double> i(0.0, 1.0);
  std::complex<double> resonant =
      (m.q_l / m.q_ext_mag) * std::exp(i * m.phi) /
      (1.0 + 2.0 * i * m.q_l * (f / m.f_r - 1.0));
  return m.amp * std::exp(i * m.phase0) * std::exp(-2.0 * pi * i * f * m.delay) *
         (1.0 - resonant);
}

namespace {

struct Circle {
  double cx, cy, r;
  double rms;  // radial residual
};

// Algebraic circle fit with Taubin normalization, solved through the
// characteristic polynomial of the moment matrix (Chernov's form).
Circle taubin_fit(const std::vector<std::complex<double>>& z) {
  const std::size_t n = z.size();
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& p : z) {
    mean_x += p.real();
    mean_y += p.imag();
  }
  mean_x /= n;
  mean_y /= n;

  double mxx = 0, myy = 0, mxy = 0, mxz = 0, myz = 0, mzz = 0;
  for (const auto& p : z) {
    double xi = p.real() - mean_x;
    double yi = p.imag() - mean_y;
    double zi = xi * xi + yi * yi;
    mxx += xi * xi;
    myy += yi * yi;
    mxy += xi * yi;
    mxz += xi * zi;
    myz += yi * zi;
    mzz += zi * zi;
  }
  mxx /= n;
  myy /= n;
  mxy /= n;
  mxz /= n;
  myz /= n;
  mzz /= n;

  double mz = mxx + myy;
  double cov_xy = mxx * myy - mxy * mxy;
  double var_z = mzz - mz * mz;
  double a3 = 4.0 * mz;
  double a2 = -3.0 * mz * mz - mzz;
  double a1 = var_z * mz + 4.0 * cov_xy * mz - mxz * mxz - myz * myz;
  double a0 = mxz * (mxz * myy - myz * mxy) + myz * (myz * mxx - mxz * mxy) -
              var_z * cov_xy;
  double a22 = a2 + a2;
  double a33 = a3 + a3 + a3;

  double x = 0.0, y = a0;
  for (int iter = 0; iter < 99; ++iter) {
    double dy = a1 + x * (a22 + a33 * x);
    double xnew = x - y / dy;
    if (xnew == x || !std::isfinite(xnew)) break;
    double ynew = a0 + xnew * (a1 + xnew * (a2 + xnew * a3));
    if (std::abs(ynew) >= std::abs(y)) break;
    x = xnew;
    y = ynew;
  }

  double det = x * x - x * mz + cov_xy;
  double xc = (mxz * (myy - x) - myz * mxy) / det / 2.0;
  double yc = (myz * (mxx - x) - mxz * mxy) / det / 2.0;

  Circle c;
  c.cx = xc + mean_x;
  c.cy = yc + mean_y;
  c.r = std::sqrt(xc * xc + yc * yc + mz);
  double ss = 0.0;
  for (const auto& p : z) {
    double d = std::hypot(p.real() - c.cx, p.imag() - c.cy) - c.r;
    ss += d * d;
  }
  c.rms = std::sqrt(ss / n);
  return c;
}

// Equal-count bin averaging down to at most max_pts points.
void bin_average(const std::vector<double>& f,
                 const std::vector<std::complex<double>>& s,
                 std::size_t max_pts, std::vector<double>& fb,
                 std::vector<std::complex<double>>& sb) {
  const std::size_t n = f.size();
  if (n <= max_pts) {
    fb = f;
    sb = s;
    return;
  }
  fb.clear();
  sb.clear();
  fb.reserve(max_pts);
  sb.reserve(max_pts);
  for (std::size_t b = 0; b < max_pts; ++b) {
    std::size_t lo = b * n / max_pts;
    std::size_t hi = (b + 1) * n / max_pts;
    double fsum = 0.0;
    std::complex<double> ssum(0.0, 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
      fsum += f[i];
      ssum += s[i];
    }
    fb.push_back(fsum / (hi - lo));
    sb.push_back(ssum / static_cast<double>(hi - lo));
  }
}

// Linear-regression slope of unwrapped phase over the outer 10% of
// points on each side; delay = -slope/(2 pi).
double delay_from_tails(const std::vector<double>& f,
                        const std::vector<std::complex<double>>& s) {
  const std::size_t n = f.size();
  std::size_t k = std::max<std::size_t>(4, n / 10);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < k; ++i) idx.push_back(i);
  for (std::size_t i = n - k; i < n; ++i) idx.push_back(i);

  // Unwrap along the selected points (they are index-ordered and the
  // gap between tails can carry multiple wraps, so unwrap over the full
  // trace first).
  std::vector<double> ph(n);
  double prev = std::arg(s[0]);
  double acc = prev;
  ph[0] = acc;
  for (std::size_t i = 1; i < n; ++i) {
    double cur = std::arg(s[i]);
    double d = cur - prev;
    while (d > pi) d -= 2.0 * pi;
    while (d < -pi) d += 2.0 * pi;
    acc += d;
    ph[i] = acc;
    prev = cur;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double f0 = f[n / 2];
  for (std::size_t i : idx) {
    double x = f[i] - f0;
    sx += x;
    sy += ph[i];
    sxx += x * x;
    sxy += x * ph[i];
  }
  double m = static_cast<double>(idx.size());
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope / (2.0 * pi);
}

std::vector<std::complex<double>> remove_delay(
    const std::vector<double>& f, const std::vector<std::complex<double>>& s,
    double tau) {
  std::vector<std::complex<double>> out(s.size());
  std::complex<double> i(0.0, 1.0);
  for (std::size_t k = 0; k < s.size(); ++k)
    out[k] = s[k] * std::exp(i * (2.0 * pi * f[k] * tau));
  return out;
}

// Golden-section minimization of the Taubin radial residual over tau.
double refine_delay(const std::vector<double>& f,
                    const std::vector<std::complex<double>>& s, double tau0,
                    double half_width) {
  auto cost = [&](double tau) {
    return taubin_fit(remove_delay(f, s, tau)).rms;
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = tau0 - half_width, b = tau0 + half_width;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = cost(c), fd = cost(d);
  for (int i = 0; i < 60; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = cost(d);
    }
  }
  return 0.5 * (a + b);
}

double wrap_angle(double x) {
  while (x > pi) x -= 2.0 * pi;
  while (x < -pi) x += 2.0 * pi;
  return x;
}

}  // namespace

ResonanceFit circle_fit(const ComplexTrace& trace) {
  trace.validate();

  std::vector<double> f;
  std::vector<std::complex<double>> s;
  bin_average(trace.freq, trace.s21, 4001, f, s);
  const std::size_t n = f.size();
  const double span = f.back() - f.front();

  // Rough dip parameters for initial guesses and span classification.
  std::size_t imin = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(s[i]) < std::abs(s[imin])) imin = i;
  std::size_t ntail = std::max<std::size_t>(4, n / 10);
  double base = 0.0;
  for (std::size_t i = 0; i < ntail; ++i)
    base += std::abs(s[i]) + std::abs(s[n - 1 - i]);
  base /= 2.0 * ntail;
  double dipmin = std::abs(s[imin]);
  double half_level = 0.5 * (base + dipmin);
  std::size_t lo = imin, hi = imin;
  while (lo > 0 && std::abs(s[lo]) < half_level) --lo;
  while (hi + 1 < n && std::abs(s[hi]) < half_level) ++hi;
  double kappa = std::max(f[hi] - f[lo], span / static_cast<double>(n));
  double fr0 = f[imin];
  double ql0 = fr0 / kappa;

  // Step 1: delay. Tail phase slope gives the initializer; a circularity
  // search removes the resonance-tail bias. Short spans pin delay to 0.
  bool delay_fixed = false;
  double tau = 0.0;
  if (span < 3.0 * kappa) {
    delay_fixed = true;
  } else {
    double tau0 = delay_from_tails(f, s);
    tau = refine_delay(f, s, tau0, 1.0 / span);
  }
  std::vector<std::complex<double>> sc = remove_delay(f, s, tau);

  // Step 2: algebraic circle fit.
  Circle circ = taubin_fit(sc);

  // No-resonance guard: the circle must stand out of the noise, taken
  // from point-to-point scatter.
  std::vector<double> adiff(n - 1);
  for (std::size_t i = 1; i < n; ++i) adiff[i - 1] = std::abs(sc[i] - sc[i - 1]);
  std::nth_element(adiff.begin(), adiff.begin() + adiff.size() / 2,
                   adiff.end());
  // |diff| of complex white noise is Rayleigh(sigma*sqrt(2)); its median
  // is 1.665 sigma. The median ignores the steep points inside the dip.
  double sigma_n = adiff[adiff.size() / 2] / 1.665;
  if (circ.r < 5.0 * sigma_n)
    throw std::runtime_error("circle_fit: no resonance detected");

  // Step 3: unwrapped phase of the centered circle vs frequency.
  std::complex<double> center(circ.cx, circ.cy);
  std::vector<double> theta(n);
  {
    double prev = std::arg(sc[0] - center);
    double acc = prev;
    theta[0] = acc;
    for (std::size_t i = 1; i < n; ++i) {
      double cur = std::arg(sc[i] - center);
      acc += wrap_angle(cur - prev);
      theta[i] = acc;
      prev = cur;
    }
  }

  fitcore::FitProblem ph;
  ph.residual = [&](const std::vector<double>& p) {
    double th0 = p[0], ql = p[1], fr = p[2] * 1e9;
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      double model = th0 + 2.0 * std::atan(2.0 * ql * (1.0 - f[i] / fr));
      r[i] = theta[i] - model;
    }
    return r;
  };
  ph.initial = {theta[imin], ql0, fr0 / 1e9};
  ph.lower = {-8.0 * pi, 1.0, f.front() / 1e9};
  ph.upper = {8.0 * pi, 1e9, f.back() / 1e9};
  fitcore::FitResult phase_res = fitcore::solve(ph);
  double theta0 = phase_res.params[0];
  double ql = phase_res.params[1];
  double fr = phase_res.params[2] * 1e9;

  // Step 4: off-resonant anchor (theta -> theta0 - pi far from f_r).
  std::complex<double> z_off =
      center - circ.r * std::exp(std::complex<double>(0.0, theta0));
  double amp = std::abs(z_off);
  double phase0 = std::arg(z_off);
  std::complex<double> cn = std::complex<double>(1.0, 0.0) - center / z_off;
  double phi = std::arg(cn);

  // Step 5: canonical diameter relation 2r/amp = Q_L/|Q_ext|.
  double q_ext = ql * amp / (2.0 * circ.r);

  // Step 6: full-model polish; uncertainties from its covariance.
  const bool fit_delay = !delay_fixed;
  const std::size_t npar = fit_delay ? 7 : 6;
  auto model_at = [&](const std::vector<double>& p, double freq) {
    NotchModel m;
    m.f_r = p[0] * 1e9;
    m.q_l = p[1];
    m.q_ext_mag = p[2];
    m.phi = p[3];
    m.amp = p[4];
    m.phase0 = p[5];
    m.delay = fit_delay ? p[6] * 1e-9 : 0.0;
    return notch_s21(m, freq);
  };
  fitcore::FitProblem full;
  full.residual = [&](const std::vector<double>& p) {
    std::vector<double> r(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      std::complex<double> d = model_at(p, f[i]) - (fit_delay ? s[i] : sc[i]);
      r[2 * i] = d.real();
      r[2 * i + 1] = d.imag();
    }
    return r;
  };
  full.initial = {fr / 1e9, ql, q_ext, phi, amp, phase0};
  full.lower = {f.front() / 1e9, 1.0, 1.0, -pi, 1e-12, -4.0 * pi};
  full.upper = {f.back() / 1e9, 1e9, 1e9, pi, 1e12, 4.0 * pi};
  if (fit_delay) {
    full.initial.push_back(tau * 1e9);
    full.lower.push_back(tau * 1e9 - 1e9 / span);
    full.upper.push_back(tau * 1e9 + 1e9 / span);
  }
  fitcore::FitResult fin = fitcore::solve(full);
  if (!fin.converged)
    throw fitcore::FitError("circle_fit: polish did not converge");

  ResonanceFit out;
  out.model.f_r = fin.params[0] * 1e9;
  out.model.q_l = fin.params[1];
  out.model.q_ext_mag = fin.params[2];
  out.model.phi = fin.params[3];
  out.model.amp = fin.params[4];
  out.model.phase0 = fin.params[5];
  out.model.delay = fit_delay ? fin.params[6] * 1e-9 : 0.0;
  out.delay_fixed = delay_fixed;

  double inv_qi = 1.0 / out.model.q_l -
                  std::cos(out.model.phi) / out.model.q_ext_mag;
  if (!(inv_qi > 0.0))
    throw std::runtime_error("circle_fit: inconsistent fit, Q_int <= 0");
  out.q_int = 1.0 / inv_qi;

  out.f_r_sigma = fin.sigma[0] * 1e9;
  out.q_l_sigma = fin.sigma[1];
  out.q_ext_sigma = fin.sigma[2];
  out.phi_sigma = fin.sigma[3];

  // Q_int uncertainty by gradient propagation over (Q_L, Q_ext, phi).
  double qi = out.q_int;
  double g_ql = qi * qi / (out.model.q_l * out.model.q_l);
  double g_qe = -qi * qi * std::cos(out.model.phi) /
                (out.model.q_ext_mag * out.model.q_ext_mag);
  double g_phi = qi * qi * std::sin(out.model.phi) / out.model.q_ext_mag;
  const std::size_t np = npar;
  auto cov = [&](std::size_t a, std::size_t b) {
    return fin.covariance[a * np + b];
  };
  double var = g_ql * g_ql * cov(1, 1) + g_qe * g_qe * cov(2, 2) +
               g_phi * g_phi * cov(3, 3) + 2.0 * g_ql * g_qe * cov(1, 2) +
               2.0 * g_ql * g_phi * cov(1, 3) + 2.0 * g_qe * g_phi * cov(2, 3);
  out.q_int_sigma = std::sqrt(std::max(var, 0.0));

  out.residual_rms = std::sqrt(2.0 * fin.cost / (2.0 * n));
  return out;
}

double photon_number(double p_in_dbm, const ResonanceFit& fit) {
  double w_r = 2.0 * pi * fit.model.f_r;
  double p_w = dbm_to_watts(p_in_dbm);
  return 2.0 / (hbar * w_r * w_r) * (fit.model.q_l * fit.model.q_l /
                                     fit.model.q_ext_mag) *
         p_w;
}

}  // namespace tunres::spectro
