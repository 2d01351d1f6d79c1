#pragma once

// Physical constants (CODATA 2018 exact/recommended values) and the handful
// of fixed material parameters used across the engine. Everything internal
// is SI with angular frequencies in rad/s; conversion from the Hz-based
// user-facing values happens at the config boundary.
namespace cotrap::units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_B = 1.380649e-23;          // J/K
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double c_light = 299792458.0;       // m/s
inline constexpr double e_charge = 1.602176634e-19;  // C

// Coulomb constant 1/(4 pi eps0)
inline constexpr double k_e = 1.0 / (4.0 * pi * eps0);

// Mass of a background gas molecule entering the gas-damping formula.
// Fixed to molecular nitrogen.
inline constexpr double gas_molecule_mass = 4.65e-26;  // kg

inline constexpr double mbar_to_pa = 100.0;

}  // namespace cotrap::units
