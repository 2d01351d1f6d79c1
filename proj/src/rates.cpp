#include "rates.hpp"

#include <cmath>

#include "errors.hpp"
#include "linear.hpp"

namespace cotrap {

namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    fail(ErrorCode::invalid_argument, concat(name, " must be positive, got ", v));
  }
}

void check_non_negative(double v, const char* name) {
  if (!(v >= 0.0)) {
    fail(ErrorCode::invalid_argument,
         concat(name, " must be non-negative, got ", v));
  }
}

void check_gas(const GasSpec& gas) {
  if (!(gas.temperature > 0.0)) {
    fail(ErrorCode::non_positive_temperature,
         concat("gas temperature must be positive, got ", gas.temperature));
  }
  check_non_negative(gas.pressure, "gas pressure");
  check_positive(gas.molecule_mass, "gas molecule mass");
}

}  // namespace

double polarizability(const ParticleSpec& p) {
  check_positive(p.radius, "particle radius");
  // eps_r below one means the field was never set (ions carry 0 here).
  if (!(p.eps_r >= 1.0)) {
    fail(ErrorCode::invalid_argument,
         concat("relative permittivity must be >= 1, got ", p.eps_r));
  }
  const double r3 = p.radius * p.radius * p.radius;
  return 4.0 * units::pi * units::eps0 * r3 * (p.eps_r - 1.0) / (p.eps_r + 2.0);
}

double gas_damping(const ParticleSpec& p, const GasSpec& gas) {
  check_positive(p.mass, "particle mass");
  check_positive(p.radius, "particle radius");
  check_gas(gas);
  const double area = 6.0 * units::pi * p.radius * p.radius;
  const double vth = std::sqrt(2.0 * gas.molecule_mass /
                               (units::pi * units::k_B * gas.temperature));
  return 0.619 * (area / p.mass) * gas.pressure * vth;
}

double gas_heating(double gamma_gas, const GasSpec& gas, double Omega) {
  check_non_negative(gamma_gas, "gas damping");
  check_gas(gas);
  check_positive(Omega, "mode frequency");
  return gamma_gas * units::k_B * gas.temperature / (units::hbar * Omega);
}

double displacement_heating(double edot, double Omega) {
  check_non_negative(edot, "energy heating rate");
  check_positive(Omega, "mode frequency");
  return edot / (units::hbar * Omega);
}

double doppler_heating(const DopplerSpec& dop, double Omega) {
  check_non_negative(dop.edot, "energy heating rate");
  check_positive(Omega, "mode frequency");
  return dop.edot / (units::hbar * Omega);
}

double backaction_heating(const ParticleSpec& p, const FeedbackSpec& fb,
                          double Omega) {
  check_non_negative(fb.gamma_fb, "feedback damping");
  check_positive(fb.c_fb, "feedback conversion constant");
  check_positive(fb.wavelength, "probe wavelength");
  check_positive(fb.zeta, "probe-geometry factor");
  check_positive(Omega, "mode frequency");
  const double alpha = polarizability(p);
  const double k0 = units::two_pi / fb.wavelength;
  const double k5 = k0 * k0 * k0 * k0 * k0;
  const double rz = zpf_amplitude(p.mass, Omega);
  const double intensity = fb.gamma_fb / fb.c_fb;  // probe power / waist^2
  const double denom = 15.0 * units::pi * units::pi * units::hbar *
                       units::eps0 * units::eps0 * units::c_light;
  return fb.zeta * intensity * alpha * alpha * k5 * rz * rz / denom;
}

double gas_rwa_ratio(double gamma_gas, const GasSpec& gas, double Omega) {
  return gas_heating(gamma_gas, gas, Omega) / (2.0 * Omega);
}

NanoparticleRates nanoparticle_rates(const ParticleSpec& p, const GasSpec& gas,
                                     const FeedbackSpec& fb, double edot_td,
                                     const std::array<double, 3>& Omega) {
  NanoparticleRates out;
  out.gamma_gas = gas_damping(p, gas);
  out.gamma_fb = fb.gamma_fb;
  for (int j = 0; j < 3; ++j) {
    out.Gamma_gas[j] = gas_heating(out.gamma_gas, gas, Omega[j]);
    out.Gamma_td[j] = displacement_heating(edot_td, Omega[j]);
    out.Gamma_ba[j] = backaction_heating(p, fb, Omega[j]);
    out.Gamma_total[j] = out.Gamma_gas[j] + out.Gamma_td[j] + out.Gamma_ba[j];
    out.rwa_ratio[j] = gas_rwa_ratio(out.gamma_gas, gas, Omega[j]);
  }
  return out;
}

IonRates ion_rates(const DopplerSpec& dop, const std::array<double, 3>& Omega) {
  check_non_negative(dop.gamma_dop, "Doppler damping");
  IonRates out;
  out.gamma_dop = dop.gamma_dop;
  for (int j = 0; j < 3; ++j) {
    out.Gamma_dop[j] = doppler_heating(dop, Omega[j]);
  }
  return out;
}

}  // namespace cotrap
