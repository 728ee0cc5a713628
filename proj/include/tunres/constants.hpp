#pragma once

// Physical constants (SI units unless noted). CODATA 2018 exact values
// where defined.

namespace tunres::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double c_light = 299792458.0;            // m/s
inline constexpr double h_planck = 6.62607015e-34;        // J s
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double k_boltzmann = 1.380649e-23;       // J/K
inline constexpr double k_boltzmann_ev = 8.617333262e-5;  // eV/K
inline constexpr double flux_quantum = 2.067833848e-15;   // Wb

// Phi0 / 2pi, the Josephson inductance scale L_J * I_C.
inline constexpr double reduced_flux_quantum = flux_quantum / (2.0 * pi);

}  // namespace tunres::constants
