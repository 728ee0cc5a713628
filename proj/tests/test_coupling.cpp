#include <cmath>

#include "doctest.h"
#include "tunres/coupling.hpp"
#include "tunres/synth.hpp"

using namespace tunres;
using coupling::Coefficient;
using coupling::CrossingModel;

namespace {
const CrossingModel kRef{5.427e9, -0.9e9, 0.35, 51.765e6, Coefficient::half};
}

TEST_CASE("branch frequencies") {
  SUBCASE("splitting at degeneracy is 2 g/2pi") {
    auto [fp, fm] = coupling::branch_frequencies(kRef, kRef.v_cross);
    CHECK(fp - fm == doctest::Approx(2.0 * 51.765e6).epsilon(1e-12));
    CHECK(fp - fm == doctest::Approx(103.53e6).epsilon(1e-12));
    CHECK(0.5 * (fp + fm) == doctest::Approx(kRef.f1).epsilon(1e-12));
  }

  SUBCASE("g = 0 branches touch at the crossing") {
    CrossingModel bare = kRef;
    bare.g_2pi = 0.0;
    auto [fp, fm] = coupling::branch_frequencies(bare, bare.v_cross);
    CHECK(fp == fm);

    // With kappa = 1/4 the bare branches pass through f1 and f2 exactly;
    // kappa = 1/2 rescales the detuning by sqrt(2).
    double f2 = bare.f1 + bare.slope * 0.1;
    auto [hp, hm] = coupling::branch_frequencies(bare, bare.v_cross + 0.1);
    CHECK(hp - hm == doctest::Approx(std::sqrt(2.0) *
                                     std::abs(bare.f1 - f2)).epsilon(1e-12));
    bare.coefficient = Coefficient::quarter;
    auto [qp, qm] = coupling::branch_frequencies(bare, bare.v_cross + 0.1);
    CHECK(qp == doctest::Approx(std::max(bare.f1, f2)).epsilon(1e-14));
    CHECK(qm == doctest::Approx(std::min(bare.f1, f2)).epsilon(1e-14));
  }

  SUBCASE("trace is preserved exactly") {
    for (double dv : {-0.3, -0.05, 0.0, 0.12, 0.4}) {
      double v = kRef.v_cross + dv;
      auto [fp, fm] = coupling::branch_frequencies(kRef, v);
      double f2 = kRef.f1 + kRef.slope * (v - kRef.v_cross);
      CHECK(fp + fm == doctest::Approx(kRef.f1 + f2).epsilon(1e-14));
      CHECK(fp >= fm);
    }
  }

  SUBCASE("half vs quarter coefficient asymptotes") {
    CrossingModel quarter = kRef;
    quarter.coefficient = Coefficient::quarter;
    double v = kRef.v_cross + 1.0;  // far detuned
    double delta = std::abs(kRef.slope * 1.0);
    auto half_split = coupling::branch_frequencies(kRef, v);
    auto quart_split = coupling::branch_frequencies(quarter, v);
    // kappa=1/2 splitting tends to sqrt(2) Delta, kappa=1/4 to Delta
    // (up to the residual g^2/Delta^2 correction at finite detuning).
    CHECK((half_split.first - half_split.second) / delta ==
          doctest::Approx(std::sqrt(2.0)).epsilon(5e-3));
    CHECK((quart_split.first - quart_split.second) / delta ==
          doctest::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("crossing fit") {
  auto gate_v = synth::linspace(0.0, 0.7, 36);

  SUBCASE("noiseless recovery") {
    auto data = synth::synth_crossing(kRef, gate_v, 0, 0.0);
    auto fit = coupling::fit_crossing(data);
    CHECK(std::abs(fit.model.f1 - kRef.f1) / kRef.f1 < 1e-9);
    CHECK(std::abs(fit.model.slope - kRef.slope) / std::abs(kRef.slope) <
          1e-8);
    CHECK(std::abs(fit.model.v_cross - kRef.v_cross) < 1e-8);
    CHECK(std::abs(fit.model.g_2pi - kRef.g_2pi) / kRef.g_2pi < 1e-8);
    CHECK_FALSE(fit.one_sided);
  }

  SUBCASE("noisy recovery: g within 2%") {
    auto data = synth::synth_crossing(kRef, gate_v, 21, 1.0e6);
    auto fit = coupling::fit_crossing(data);
    CHECK(std::abs(fit.model.g_2pi - kRef.g_2pi) / kRef.g_2pi < 0.02);
    CHECK(fit.g_sigma > 0.0);
    CHECK(fit.residuals_hz.size() == 2 * gate_v.size());
  }

  SUBCASE("fitted g consistent with half the minimum splitting") {
    auto data = synth::synth_crossing(kRef, gate_v, 22, 0.5e6);
    auto fit = coupling::fit_crossing(data);
    auto met = coupling::detuning_metrics(data);
    CHECK(std::abs(fit.model.g_2pi - 0.5 * met.min_delta) /
              (0.5 * met.min_delta) <
          0.015);
  }

  SUBCASE("invariance under a voltage translation") {
    auto data = synth::synth_crossing(kRef, gate_v, 23, 0.8e6);
    auto shifted = data;
    for (auto& v : shifted.gate_v) v += 1.7;
    auto fa = coupling::fit_crossing(data);
    auto fb = coupling::fit_crossing(shifted);
    CHECK(fb.model.v_cross ==
          doctest::Approx(fa.model.v_cross + 1.7).epsilon(1e-6));
    CHECK(fb.model.g_2pi == doctest::Approx(fa.model.g_2pi).epsilon(1e-6));
    CHECK(fb.model.f1 == doctest::Approx(fa.model.f1).epsilon(1e-9));
  }

  SUBCASE("one-sided data is flagged") {
    auto side_v = synth::linspace(kRef.v_cross + 0.05, kRef.v_cross + 0.5, 20);
    auto data = synth::synth_crossing(kRef, side_v, 24, 0.2e6);
    auto fit = coupling::fit_crossing(data);
    CHECK(fit.one_sided);
  }

  SUBCASE("validation") {
    coupling::CrossingData bad;
    bad.gate_v = {0.0, 0.1};
    bad.f_plus = {5e9, 5e9};
    bad.f_minus = {4.9e9};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("detuning metrics") {
  SUBCASE("symmetric synthetic table") {
    auto gate_v = synth::linspace(kRef.v_cross - 0.4, kRef.v_cross + 0.4, 17);
    auto data = synth::synth_crossing(kRef, gate_v, 0, 0.0);
    auto met = coupling::detuning_metrics(data);
    CHECK(met.delta.size() == gate_v.size());
    CHECK(met.min_delta ==
          doctest::Approx(2.0 * kRef.g_2pi).epsilon(1e-10));
    // Symmetric grid: both on/off ratios equal.
    CHECK(met.on_off_high_side ==
          doctest::Approx(met.on_off_low_side).epsilon(1e-9));
    CHECK(met.on_off_high_side > 1.0);
  }

  SUBCASE("reference table ratios") {
    coupling::CrossingData data;
    data.gate_v = {-2.0, -1.0, 0.3, 1.0};
    data.f_plus = {5.427e9, 5.427e9, 5.4665e9, 6.096e9};
    data.f_minus = {4.142e9, 4.827e9, 5.3875e9, 5.427e9};
    auto met = coupling::detuning_metrics(data);
    CHECK(met.min_delta == doctest::Approx(79e6).epsilon(1e-12));
    CHECK(met.on_off_high_side == doctest::Approx(8.47).epsilon(2e-3));
    CHECK(met.on_off_low_side == doctest::Approx(16.27).epsilon(2e-3));
  }
}
