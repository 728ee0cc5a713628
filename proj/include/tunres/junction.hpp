#pragma once

#include "tunres/em_model.hpp"

// Josephson inductance <-> critical current <-> resonant frequency for a
// quarter-wave line terminated (or interrupted) by a lumped inductor.

namespace tunres::junction {

struct JunctionState {
  double lj;  // H
  double ic;  // A
};

struct TunableResonator {
  em_model::CpwElectrical cpw;
  double lk_total = 0.0;           // H
  double lj = 0.0;                 // H
  double junction_position = 0.0;  // d/l from the grounded end, [0, 0.95)
};

JunctionState lj_from_ic(double ic);
JunctionState ic_from_lj(double lj);

// Kinetically loaded quarter-wave frequency f0 * sqrt(L0/(L0+LK)).
double loaded_f0(const TunableResonator& res);

// Root of tan(beta l) = Z0/(w LJ) with beta l = (pi/2) w/w0'.
// Bisection on (0, w0'], relative tolerance 1e-12. LJ = 0 returns
// loaded_f0 exactly. Requires junction_position == 0.
double tunable_frequency(const TunableResonator& res);

// Inverse of tunable_frequency by bisection on LJ.
// Requires 0 < f_target <= loaded_f0(res).
double lj_from_frequency(const TunableResonator& res, double f_target);

// p_J = LJ/(LJ + L0 + LK).
double participation(double lj, double l0, double lk);

// Junction inserted in series a fraction d/l from the grounded end:
// root of Z0 = (w LJ + Z0 tan(beta d)) tan(beta (l-d)).
// Reduces to tunable_frequency at d = 0.
double positioned_frequency(const TunableResonator& res);

}  // namespace tunres::junction
