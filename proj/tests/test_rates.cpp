#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "errors.hpp"
#include "rates.hpp"
#include "table.hpp"
#include "units.hpp"

using namespace cotrap;
using cotrap::testing::table_particle;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

// Pressure reproducing the reference damping of 2pi x 44.5 nHz; the nominal
// 7e-11 mbar gives only 2pi x 31.2 nHz with the same sphere.
constexpr double kCalibratedPressure = 9.98433e-9;  // Pa

GasSpec table_gas(double pressure = kCalibratedPressure) {
  GasSpec g;
  g.temperature = 300.0;
  g.pressure = pressure;
  return g;
}

// Two-body renormalized frequencies at the reference equilibrium (rad/s),
// frozen from the stiffness-matrix pins.
std::array<double, 3> particle_freqs() {
  return {units::two_pi * 1595.466196476664, units::two_pi * 1195.294014945956,
          units::two_pi * 1063.996935881126};
}

std::array<double, 3> ion_freqs() {
  return {units::two_pi * 3901660.192359934, units::two_pi * 3840473.5364841106,
          units::two_pi * 1187476.4782989142};
}

}  // namespace

TEST_CASE("dielectric sphere polarizability") {
  const ParticleSpec p = table_particle();
  // 4 pi eps0 R^3 (eps - 1)/(eps + 2) for R = 134 nm, eps = 2.11.
  CHECK(rel_err(polarizability(p), 7.230263847700e-32) < 1e-11);

  // Cubic in the radius, zero for a vacuum sphere.
  ParticleSpec big = p;
  big.radius = 2.0 * p.radius;
  CHECK(rel_err(polarizability(big), 8.0 * polarizability(p)) < 1e-13);
  ParticleSpec hollow = p;
  hollow.eps_r = 1.0;
  CHECK(polarizability(hollow) == 0.0);

  ParticleSpec bad = p;
  bad.radius = 0.0;
  CHECK_THROWS_AS(polarizability(bad), Error);
  bad = p;
  bad.eps_r = 0.0;  // unset field, as on an ion spec
  CHECK_THROWS_AS(polarizability(bad), Error);
}

TEST_CASE("gas damping of the reference sphere") {
  const ParticleSpec p = table_particle();

  // At the nominal pressure of 7e-11 mbar the free-molecular formula gives
  // 2pi x 31.2 nHz. The reference damping of 2pi x 44.5 nHz quoted alongside
  // those conditions corresponds to the calibrated pressure below; presets
  // carry the calibrated value so downstream occupations match.
  const double g_nominal = gas_damping(p, table_gas(7e-9));
  CHECK(rel_err(g_nominal, 1.960350295161e-7) < 1e-11);
  CHECK(rel_err(g_nominal / units::two_pi, 31.1999439667e-9) < 1e-10);

  const double g_cal = gas_damping(p, table_gas());
  CHECK(rel_err(g_cal, 2.796112037498e-7) < 1e-11);
  CHECK(rel_err(g_cal / units::two_pi, 44.5015052207e-9) < 1e-10);

  // Linear in pressure.
  CHECK(rel_err(gas_damping(p, table_gas(2 * 7e-9)), 2.0 * g_nominal) < 1e-13);

  // Area over mass: doubling the radius at fixed mass quadruples it.
  ParticleSpec big = p;
  big.radius = 2.0 * p.radius;
  CHECK(rel_err(gas_damping(big, table_gas()), 4.0 * g_cal) < 1e-13);

  // Thermal-velocity denominator: scales as T^(-1/2).
  GasSpec hot = table_gas();
  hot.temperature = 4.0 * 300.0;
  CHECK(rel_err(gas_damping(p, hot), 0.5 * g_cal) < 1e-13);

  GasSpec bad = table_gas();
  bad.temperature = 0.0;
  CHECK_THROWS_AS(gas_damping(p, bad), Error);
  bad = table_gas();
  bad.pressure = -1.0;
  CHECK_THROWS_AS(gas_damping(p, bad), Error);
}

TEST_CASE("gas heating at the renormalized particle frequencies") {
  const ParticleSpec p = table_particle();
  const GasSpec gas = table_gas();
  const double g = gas_damping(p, gas);
  const std::array<double, 3> W = particle_freqs();

  const std::array<double, 3> want = {1.095507790435e3, 1.462272567051e3,
                                      1.642716805541e3};
  for (int j = 0; j < 3; ++j) {
    const double G = gas_heating(g, gas, W[j]);
    CHECK(rel_err(G, want[j]) < 1e-11);
    // Exact identity: hbar Omega Gamma = gamma kB T.
    CHECK(rel_err(units::hbar * W[j] * G,
                  g * units::k_B * gas.temperature) < 1e-14);
  }
  CHECK_THROWS_AS(gas_heating(g, gas, 0.0), Error);
}

TEST_CASE("trap-displacement heating") {
  const double edot = 2.8e-26;  // J/s, reference noise level
  const std::array<double, 3> W = particle_freqs();
  const std::array<double, 3> want = {2.648587926788e4, 3.535308010204e4,
                                      3.971564544110e4};
  for (int j = 0; j < 3; ++j) {
    const double G = displacement_heating(edot, W[j]);
    CHECK(rel_err(G, want[j]) < 1e-11);
    // Gamma * Omega is frequency independent: edot / hbar.
    CHECK(rel_err(G * W[j], 2.655106039118e8) < 1e-11);
  }
  CHECK(displacement_heating(0.0, W[0]) == 0.0);
  CHECK_THROWS_AS(displacement_heating(-1e-26, W[0]), Error);
}

TEST_CASE("Doppler heating at the renormalized ion frequencies") {
  DopplerSpec dop;
  dop.gamma_dop = units::two_pi * 10e3;
  dop.edot = 3.8e-22;
  const std::array<double, 3> W = ion_freqs();
  const std::array<double, 3> want = {1.469867288131e5, 1.493285302365e5,
                                      4.829504239418e5};
  for (int j = 0; j < 3; ++j) {
    CHECK(rel_err(doppler_heating(dop, W[j]), want[j]) < 1e-11);
  }
  const IonRates r = ion_rates(dop, W);
  CHECK(r.gamma_dop == dop.gamma_dop);
  for (int j = 0; j < 3; ++j) CHECK(r.Gamma_dop[j] == doppler_heating(dop, W[j]));
}

TEST_CASE("measurement backaction heating") {
  const ParticleSpec p = table_particle();
  FeedbackSpec fb;
  fb.gamma_fb = units::two_pi * 1.0;
  const std::array<double, 3> W = particle_freqs();

  const std::array<double, 3> want = {3.560215135522e3, 4.752138662023e3,
                                      5.338551935026e3};
  for (int j = 0; j < 3; ++j) {
    CHECK(rel_err(backaction_heating(p, fb, W[j]), want[j]) < 1e-11);
  }

  // Linear in the feedback strength and the geometry factor.
  FeedbackSpec strong = fb;
  strong.gamma_fb = 3.0 * fb.gamma_fb;
  CHECK(rel_err(backaction_heating(p, strong, W[0]),
                3.0 * backaction_heating(p, fb, W[0])) < 1e-13);
  FeedbackSpec axial = fb;
  axial.zeta = 1.0;
  CHECK(rel_err(backaction_heating(p, fb, W[0]),
                7.0 * backaction_heating(p, axial, W[0])) < 1e-13);

  // Fifth power of the wavenumber: halving the wavelength gives x32.
  FeedbackSpec blue = fb;
  blue.wavelength = fb.wavelength / 2.0;
  CHECK(rel_err(backaction_heating(p, blue, W[0]),
                32.0 * backaction_heating(p, fb, W[0])) < 1e-12);

  // No probe, no backaction.
  FeedbackSpec off = fb;
  off.gamma_fb = 0.0;
  CHECK(backaction_heating(p, off, W[0]) == 0.0);

  FeedbackSpec bad = fb;
  bad.c_fb = 0.0;
  CHECK_THROWS_AS(backaction_heating(p, bad, W[0]), Error);
}

TEST_CASE("gas dissipator rotating-wave diagnostic") {
  const ParticleSpec p = table_particle();
  const GasSpec gas = table_gas();
  const double g = gas_damping(p, gas);
  const std::array<double, 3> W = particle_freqs();
  const std::array<double, 3> want = {5.464091950943e-2, 9.735174119664e-2,
                                      1.228605510435e-1};
  for (int j = 0; j < 3; ++j) {
    CHECK(rel_err(gas_rwa_ratio(g, gas, W[j]), want[j]) < 1e-11);
  }
  // The axial ratio sits just past 0.1 at the reference point; the
  // number-conserving dissipator is marginal there, not comfortable.
  CHECK(want[2] > 0.1);
  CHECK(want[2] < 0.15);
}

TEST_CASE("nanoparticle rate bundle") {
  const ParticleSpec p = table_particle();
  const GasSpec gas = table_gas();
  FeedbackSpec fb;
  fb.gamma_fb = units::two_pi * 1.0;
  const std::array<double, 3> W = particle_freqs();
  const double edot_td = 2.8e-26;

  const NanoparticleRates r = nanoparticle_rates(p, gas, fb, edot_td, W);
  CHECK(r.gamma_gas == gas_damping(p, gas));
  CHECK(r.gamma_fb == fb.gamma_fb);
  for (int j = 0; j < 3; ++j) {
    CHECK(r.Gamma_gas[j] == gas_heating(r.gamma_gas, gas, W[j]));
    CHECK(r.Gamma_td[j] == displacement_heating(edot_td, W[j]));
    CHECK(r.Gamma_ba[j] == backaction_heating(p, fb, W[j]));
    CHECK(rel_err(r.Gamma_total[j],
                  r.Gamma_gas[j] + r.Gamma_td[j] + r.Gamma_ba[j]) < 1e-15);
    CHECK(r.rwa_ratio[j] == gas_rwa_ratio(r.gamma_gas, gas, W[j]));
  }

  // The reference point is displacement-noise dominated on every axis.
  for (int j = 0; j < 3; ++j) {
    CHECK(r.Gamma_td[j] > 0.8 * r.Gamma_total[j]);
  }
}
