#pragma once

// CODATA 2018 values, SI units.
namespace ffrate::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double bohr_magneton = 9.2740100783e-24;     // J/T
inline constexpr double vacuum_permeability = 1.25663706212e-6;  // N/A^2
inline constexpr double mu0_over_4pi = vacuum_permeability / (4.0 * pi);
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double boltzmann = 1.380649e-23;       // J/K, unused

inline constexpr double deg = pi / 180.0;

}  // namespace ffrate::constants
