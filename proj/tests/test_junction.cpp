#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "tunres/constants.hpp"
#include "tunres/em_model.hpp"
#include "tunres/junction.hpp"

using namespace tunres;

namespace {

junction::TunableResonator tr2_like() {
  em_model::CpwGeometry geom{35e-6, 20e-6, 4.136e-3, 12.4};
  junction::TunableResonator res;
  res.cpw = em_model::cpw_electricals(geom, 7.111e9);
  res.lk_total = 0.131e-9;
  return res;
}

}  // namespace

TEST_CASE("josephson inductance relation") {
  auto js = junction::lj_from_ic(1e-6);
  CHECK(js.lj * 1e9 == doctest::Approx(0.3291).epsilon(1e-4));
  CHECK(js.lj * js.ic ==
        doctest::Approx(constants::reduced_flux_quantum).epsilon(1e-15));

  // Involution.
  double x = 0.7e-9;
  CHECK(junction::lj_from_ic(junction::ic_from_lj(x).ic).lj ==
        doctest::Approx(x).epsilon(1e-15));

  // Large critical current drives the inductance to zero.
  CHECK(junction::lj_from_ic(1.0).lj < 1e-14);
  CHECK_THROWS_AS(junction::lj_from_ic(0.0), std::domain_error);
  CHECK_THROWS_AS(junction::ic_from_lj(-1e-9), std::domain_error);
}

TEST_CASE("tunable frequency solver") {
  auto res = tr2_like();

  SUBCASE("zero inductance returns the loaded quarter-wave frequency") {
    res.lj = 0.0;
    double expect = res.cpw.f0 *
                    std::sqrt(res.cpw.l0 / (res.cpw.l0 + res.lk_total));
    CHECK(junction::tunable_frequency(res) == expect);
  }

  SUBCASE("strictly decreasing in LJ and bounded") {
    double prev = junction::loaded_f0(res) + 1.0;
    for (double lj_nh : {0.0, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      res.lj = lj_nh * 1e-9;
      double f = junction::tunable_frequency(res);
      CHECK(f < prev);
      CHECK(f > 0.0);
      CHECK(f <= junction::loaded_f0(res));
      prev = f;
    }
  }

  SUBCASE("at least 2 GHz of tuning by 1.3 nH") {
    res.lj = 1.3e-9;
    CHECK(junction::loaded_f0(res) - junction::tunable_frequency(res) >=
          2e9);
  }

  SUBCASE("lumped-element asymptote at large LJ") {
    res.lj = 10e-9;
    double f = junction::tunable_frequency(res);
    double w0p = 2.0 * constants::pi * junction::loaded_f0(res);
    double c_eff = constants::pi / (2.0 * res.cpw.z0 * w0p);
    double f_lumped =
        1.0 / (2.0 * constants::pi *
               std::sqrt((res.cpw.l0 + res.lk_total + res.lj) * c_eff));
    CHECK(std::abs(f - f_lumped) / f < 0.05);
  }
}

TEST_CASE("inverse solver") {
  auto res = tr2_like();

  SUBCASE("round trips") {
    for (double lj_nh : {0.1, 0.5, 1.0, 2.0, 10.0}) {
      res.lj = lj_nh * 1e-9;
      double f = junction::tunable_frequency(res);
      double back = junction::lj_from_frequency(res, f);
      CHECK(std::abs(back - res.lj) / res.lj < 1e-9);
    }
  }

  SUBCASE("boundary and monotonicity") {
    CHECK(junction::lj_from_frequency(res, junction::loaded_f0(res)) == 0.0);
    double lj_a = junction::lj_from_frequency(res, 5.0e9);
    double lj_b = junction::lj_from_frequency(res, 5.5e9);
    CHECK(lj_b < lj_a);
    CHECK_THROWS_AS(
        junction::lj_from_frequency(res, junction::loaded_f0(res) * 1.01),
        std::domain_error);
  }
}

TEST_CASE("participation ratio") {
  CHECK(junction::participation(1.222e-9, 1.380e-9, 0.131e-9) ==
        doctest::Approx(0.4472).epsilon(2.5e-4));
  CHECK(junction::participation(1.5e-9, 1.0e-9, 0.5e-9) == 0.5);
  CHECK(junction::participation(0.0, 1e-9, 0.0) == 0.0);
  double prev = -1.0;
  for (double lj_nh = 0.0; lj_nh < 5.0; lj_nh += 0.5) {
    double p = junction::participation(lj_nh * 1e-9, 1.38e-9, 0.131e-9);
    CHECK(p >= 0.0);
    CHECK(p < 1.0);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("positioned junction") {
  auto res = tr2_like();
  res.lj = 0.8e-9;

  SUBCASE("grounded-end placement matches the plain solver bit for bit") {
    res.junction_position = 0.0;
    CHECK(junction::positioned_frequency(res) ==
          junction::tunable_frequency(res));
  }

  SUBCASE("zero inductance restores the bare line at any position") {
    res.lj = 0.0;
    for (double d : {0.0, 0.3, 0.7, 0.9}) {
      res.junction_position = d;
      CHECK(junction::positioned_frequency(res) == junction::loaded_f0(res));
    }
  }

  SUBCASE("tuning range ordering bottom >= middle >= top") {
    double ranges[3];
    double pos[3] = {0.0, 0.5, 0.9};
    for (int i = 0; i < 3; ++i) {
      res.junction_position = pos[i];
      res.lj = 0.0;
      double hi = junction::positioned_frequency(res);
      res.lj = 3e-9;
      double lo = junction::positioned_frequency(res);
      ranges[i] = hi - lo;
    }
    CHECK(ranges[0] >= ranges[1]);
    CHECK(ranges[1] >= ranges[2]);
  }

  SUBCASE("degenerate placement rejected") {
    res.junction_position = 0.95;
    CHECK_THROWS_AS(junction::positioned_frequency(res), std::domain_error);
  }
}
