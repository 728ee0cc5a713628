#include <cmath>
#include <complex>

#include "doctest.h"
#include "tunres/spectro.hpp"
#include "tunres/synth.hpp"

using namespace tunres;
using std::complex;

namespace {

const spectro::NotchModel kRef{6.114e9, 473.0, 700.0, 0.1, 1.0, 0.3, 10e-9};

std::vector<double> grid_around(const spectro::NotchModel& m,
                                double linewidths, int n) {
  double half = 0.5 * linewidths * m.f_r / m.q_l;
  return synth::linspace(m.f_r - half, m.f_r + half, n);
}

}  // namespace

TEST_CASE("notch forward model") {
  spectro::NotchModel m{6e9, 473.0, 700.0, 0.0, 1.0, 0.0, 0.0};

  SUBCASE("baseline far from resonance") {
    double far = m.f_r * (1.0 + 100.0 / m.q_l);
    CHECK(std::abs(spectro::notch_s21(m, far)) ==
          doctest::Approx(1.0).epsilon(1e-2));
  }

  SUBCASE("on-resonance depth") {
    complex<double> v = spectro::notch_s21(m, m.f_r);
    CHECK(v.real() == doctest::Approx(1.0 - 473.0 / 700.0).epsilon(1e-12));
    CHECK(std::abs(v.imag()) < 1e-12);
    CHECK(std::abs(v) == doctest::Approx(0.324).epsilon(2e-3));
  }

  SUBCASE("points lie on a circle (analytic center)") {
    // With delay 0 the trace is a circle of radius amp*QL/(2Qe) centered
    // at amp e^{i ph0} (1 - (QL/2Qe) e^{i phi}).
    spectro::NotchModel c{6e9, 2000.0, 5000.0, 0.25, 1.3, -0.7, 0.0};
    complex<double> center =
        c.amp * std::exp(complex<double>(0, c.phase0)) *
        (1.0 - (c.q_l / (2.0 * c.q_ext_mag)) * std::exp(complex<double>(0, c.phi)));
    double radius = c.amp * c.q_l / (2.0 * c.q_ext_mag);
    for (double f : grid_around(c, 8.0, 101)) {
      double d = std::abs(spectro::notch_s21(c, f) - center);
      CHECK(std::abs(d - radius) < 1e-10 * radius);
    }
  }
}

TEST_CASE("circle fit on noiseless data recovers the model") {
  auto freqs = grid_around(kRef, 6.0, 1201);
  auto trace = synth::synth_notch(kRef, freqs, {0, 0.0});
  auto fit = spectro::circle_fit(trace);

  CHECK(std::abs(fit.model.f_r - kRef.f_r) / kRef.f_r < 1e-6);
  CHECK(std::abs(fit.model.q_l - kRef.q_l) / kRef.q_l < 1e-6);
  CHECK(std::abs(fit.model.q_ext_mag - kRef.q_ext_mag) / kRef.q_ext_mag <
        1e-6);
  CHECK(fit.residual_rms < 1e-8);
  CHECK(std::abs(fit.model.delay - kRef.delay) < 1e-6 * kRef.delay + 1e-14);

  // The returned quartet satisfies the defining identity exactly.
  CHECK(1.0 / fit.q_int + std::cos(fit.model.phi) / fit.model.q_ext_mag ==
        doctest::Approx(1.0 / fit.model.q_l).epsilon(1e-12));
}

TEST_CASE("circle fit at 40 dB SNR recovers within 1%") {
  auto freqs = grid_around(kRef, 6.0, 40001);
  auto trace = synth::synth_notch(kRef, freqs, {7, 0.01});
  auto fit = spectro::circle_fit(trace);
  double qi_true = 1.0 / (1.0 / kRef.q_l - std::cos(kRef.phi) / kRef.q_ext_mag);

  CHECK(std::abs(fit.model.f_r - kRef.f_r) / kRef.f_r < 1e-5);
  CHECK(std::abs(fit.model.q_l - kRef.q_l) / kRef.q_l < 0.01);
  CHECK(std::abs(fit.model.q_ext_mag - kRef.q_ext_mag) / kRef.q_ext_mag < 0.01);
  CHECK(std::abs(fit.q_int - qi_true) / qi_true < 0.01);
  CHECK(fit.f_r_sigma > 0.0);
  CHECK(fit.q_l_sigma > 0.0);
}

TEST_CASE("fit invariance under rotation and scaling") {
  auto freqs = grid_around(kRef, 6.0, 2001);
  auto trace = synth::synth_notch(kRef, freqs, {3, 0.003});
  auto fit_a = spectro::circle_fit(trace);

  auto scaled = trace;
  complex<double> gain = 2.5 * std::exp(complex<double>(0.0, 1.1));
  for (auto& v : scaled.s21) v *= gain;
  auto fit_b = spectro::circle_fit(scaled);

  CHECK(fit_b.model.f_r == doctest::Approx(fit_a.model.f_r).epsilon(1e-9));
  CHECK(fit_b.model.q_l == doctest::Approx(fit_a.model.q_l).epsilon(1e-6));
  CHECK(fit_b.q_int == doctest::Approx(fit_a.q_int).epsilon(1e-6));
  CHECK(fit_b.model.amp ==
        doctest::Approx(fit_a.model.amp * 2.5).epsilon(1e-6));
}

TEST_CASE("matched-condition identity") {
  // phi = 0 and QL = Qe/2 forces Qint = Qe.
  spectro::NotchModel m{6e9, 1500.0, 3000.0, 0.0, 1.0, 0.0, 0.0};
  auto freqs = grid_around(m, 6.0, 1201);
  auto fit = spectro::circle_fit(synth::synth_notch(m, freqs, {0, 0.0}));
  CHECK(fit.q_int == doctest::Approx(3000.0).epsilon(1e-5));
}

TEST_CASE("short span pins the delay and warns") {
  spectro::NotchModel m = kRef;
  m.delay = 0.0;
  auto freqs = grid_around(m, 1.5, 801);
  auto fit = spectro::circle_fit(synth::synth_notch(m, freqs, {0, 0.0}));
  CHECK(fit.delay_fixed);
  CHECK(fit.model.delay == 0.0);
}

TEST_CASE("no resonance error on a flat noisy trace") {
  auto freqs = synth::linspace(6.0e9, 6.1e9, 1201);
  spectro::ComplexTrace tr;
  tr.freq = freqs;
  synth::CounterRng rng(5);
  for (std::size_t i = 0; i < freqs.size(); ++i)
    tr.s21.emplace_back(1.0 + 0.01 * rng.gaussian(), 0.01 * rng.gaussian());
  CHECK_THROWS_WITH_AS(spectro::circle_fit(tr),
                       doctest::Contains("no resonance"), std::runtime_error);
}

TEST_CASE("trace validation") {
  spectro::ComplexTrace tr;
  tr.freq = {1.0, 2.0, 3.0};
  tr.s21 = {{1, 0}, {1, 0}, {1, 0}};
  CHECK_THROWS_AS(tr.validate(), std::invalid_argument);  // too short

  tr.freq = synth::linspace(1.0, 2.0, 16);
  tr.s21.assign(16, {1, 0});
  CHECK_NOTHROW(tr.validate());
  tr.freq[8] = tr.freq[7];
  CHECK_THROWS_AS(tr.validate(), std::invalid_argument);  // not ascending
}

TEST_CASE("photon number") {
  spectro::ResonanceFit fit;
  fit.model = spectro::NotchModel{6.204e9, 2000.0, 7830.0, 0.0, 1.0, 0.0, 0.0};
  fit.q_int = 1.0;

  // Regression anchor by direct evaluation.
  CHECK(spectro::photon_number(-96.0, fit) ==
        doctest::Approx(1601.5804).epsilon(1e-6));
  // Linearity: +3.0103 dB doubles the photon number.
  double n1 = spectro::photon_number(-96.0, fit);
  double n2 = spectro::photon_number(-96.0 + 10.0 * std::log10(2.0), fit);
  CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-12));
}
