#pragma once

#include <array>

#include "trap.hpp"
#include "units.hpp"

namespace cotrap {

// Residual-gas environment entering the nanoparticle damping and heating
// rates. Pressure in Pa; the config layer converts from mbar.
struct GasSpec {
  double temperature = 300.0;                       // K
  double pressure = 0.0;                            // Pa
  double molecule_mass = units::gas_molecule_mass;  // kg
};

// Optical probe used to detect and feedback-cool the nanoparticle. gamma_fb
// is the closed-loop damping rate; c_fb converts probe intensity to damping,
// which ties the unavoidable backaction to the same knob.
struct FeedbackSpec {
  double gamma_fb = 0.0;       // rad/s
  double c_fb = 1.57e-6;       // Hz m^2/W
  double wavelength = 780e-9;  // m
  double zeta = 7.0;           // probe-geometry factor, one of {1, 2, 7}
};

// Doppler cooling of the ion: velocity damping at gamma_dop plus a residual
// energy heating rate edot (photon recoil and blue-sideband leakage).
struct DopplerSpec {
  double gamma_dop = 0.0;  // rad/s
  double edot = 0.0;       // J/s
};

// Dielectric-sphere polarizability 4 pi eps0 R^3 (eps - 1)/(eps + 2).
double polarizability(const ParticleSpec& p);

// Kinetic gas damping of a sphere in the free-molecular regime.
double gas_damping(const ParticleSpec& p, const GasSpec& gas);

// Phonon heating rates, all 1/s. Omega is the harmonic frequency of the mode
// being heated; pass the renormalized value when the mode lives next to
// other charges.
double gas_heating(double gamma_gas, const GasSpec& gas, double Omega);
double displacement_heating(double edot, double Omega);
double doppler_heating(const DopplerSpec& dop, double Omega);
double backaction_heating(const ParticleSpec& p, const FeedbackSpec& fb,
                          double Omega);

// Gas-dissipator rotating-wave diagnostic, Gamma_gas / (2 Omega). The
// number-conserving form used by the steady-state solver needs this far
// below one.
double gas_rwa_ratio(double gamma_gas, const GasSpec& gas, double Omega);

// Per-axis bundle for one nanoparticle, evaluated at the three mode
// frequencies the caller supplies.
struct NanoparticleRates {
  double gamma_gas = 0.0;                   // rad/s
  double gamma_fb = 0.0;                    // rad/s
  std::array<double, 3> Gamma_gas{};        // 1/s
  std::array<double, 3> Gamma_td{};         // 1/s
  std::array<double, 3> Gamma_ba{};         // 1/s
  std::array<double, 3> Gamma_total{};      // gas + td + ba
  std::array<double, 3> rwa_ratio{};        // gas-dissipator diagnostic
};

NanoparticleRates nanoparticle_rates(const ParticleSpec& p, const GasSpec& gas,
                                     const FeedbackSpec& fb, double edot_td,
                                     const std::array<double, 3>& Omega);

struct IonRates {
  double gamma_dop = 0.0;             // rad/s
  std::array<double, 3> Gamma_dop{};  // 1/s
};

IonRates ion_rates(const DopplerSpec& dop, const std::array<double, 3>& Omega);

}  // namespace cotrap
