// Floquet treatment of the full two-tone drive for on-axis configurations:
// monodromy matrices and multipliers of the damped first-moment flow,
// parametric stability screening, the periodic steady-state covariance, and
// the period-averaged purity of the heavy partner's motion.
//
// Every axis decouples for configurations displaced only along tone-free
// directions, so the module works in per-axis blocks. States are kept in
// zero-point-scaled quadratures (positions over R_zpf, momenta over P_zpf);
// since R_zpf P_zpf = hbar/2 the scaling is symplectic and the partner
// purity is 1/sqrt(det) of its scaled covariance block directly.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "equilibrium.hpp"
#include "rates.hpp"
#include "trap.hpp"

namespace cotrap {

// Multiplier magnitudes up to 1 + this tolerance count as stable.
inline constexpr double kMultiplierTol = 1e-6;

// One cartesian axis of an on-axis configuration, n bodies. The well
// curvature of body k is
//   W_k(t) = w_base[k] + w_slow[k] cos(omega_s t) + w_fast[k] cos(omega_f t)
// and the scaled drift matrix in (positions | momenta) block order reads
//   [ -damping/2        diag(omega_scale) ]
//   [ -coupler - diag(W(t)/omega_scale)   -damping/2 ]
// with the static Coulomb stiffness folded into coupler. Diffusion is
// diagonal: diff_pos on the position block, diff_mom on the momentum block,
// both already divided by the squared zero-point amplitudes so they are
// plain rates.
struct PeriodicAxis {
  double omega_s = 0.0;           // rad/s, slow tone
  double omega_f = 0.0;           // rad/s, fast tone
  double period = 0.0;            // s, common period of all active tones
  Eigen::VectorXd omega_scale;    // rad/s, per-body quadrature scaling
  Eigen::VectorXd w_base;         // s^-2, static curvature
  Eigen::VectorXd w_slow;         // s^-2, slow-tone amplitude
  Eigen::VectorXd w_fast;         // s^-2, fast-tone amplitude
  Eigen::VectorXd w_secular;      // s^-2, bare secular curvature
  Eigen::MatrixXd coupler;        // s^-1, scaled static stiffness remainder
  Eigen::VectorXd damping;        // s^-1, velocity damping per body
  Eigen::VectorXd diff_pos;       // s^-1, scaled position diffusion
  Eigen::VectorXd diff_mom;       // s^-1, scaled momentum diffusion
  int partner = -1;               // body whose purity is reported, -1 if none
  bool tone_locked = false;       // omega_f was rounded onto a harmonic
};

// Full dissipative axis about an equilibrium x: renormalized-frequency
// scaling, Doppler damping and heating on the ions, gas damping plus the
// configured heating channels on the partner. gamma_p_override >= 0 replaces
// the partner's velocity damping (an ideal feedback knob); the diffusion
// keeps the gas floor either way. Throws off_axis_layout when a displaced
// axis carries an RF tone, since that adds a periodic drive force this
// per-axis form does not model.
PeriodicAxis periodic_axis(const TrapConfig& trap,
                           const std::vector<Body>& bodies,
                           const Eigen::VectorXd& x, int partner, Axis axis,
                           const ParticleSpec& partner_spec,
                           const GasSpec& gas, const FeedbackSpec& fb,
                           double edot_td, const DopplerSpec& dop,
                           double gamma_p_override = -1.0);

// Noise-free variant for stability screening: bare secular scaling where
// defined (the fast-tone rate on axes past their secular stability edge),
// the given velocity dampings, zero diffusion.
PeriodicAxis screening_axis(const TrapConfig& trap,
                            const std::vector<Body>& bodies,
                            const Eigen::VectorXd& x, int partner, Axis axis,
                            double gamma_ion, double gamma_partner);

// Micromotion-free reference: same couplings and noise, but every well is
// frozen at its bare secular curvature and the tones are switched off.
PeriodicAxis secular_limit(const PeriodicAxis& ax);

// Scaled drift matrix at time t and the constant diffusion matrix.
Eigen::MatrixXd axis_drift(const PeriodicAxis& ax, double t);
Eigen::MatrixXd axis_diffusion(const PeriodicAxis& ax);

struct IntegrateOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  // Step-size cap, expressed as a minimum step count per cycle of the
  // fastest active tone.
  int min_steps_per_fast = 200;
  // > 0 switches to fixed-step classical Runge-Kutta with this step.
  double fixed_dt = 0.0;
};

struct Monodromy {
  Eigen::MatrixXd M;               // propagator over one period
  Eigen::VectorXcd multipliers;    // eigenvalues of M
  double max_abs = 0.0;
  bool stable = false;             // max_abs <= 1 + kMultiplierTol
  long steps = 0;                  // accepted integrator steps
};

Monodromy monodromy(const PeriodicAxis& ax, const IntegrateOptions& opt = {});

// Monodromy screen over all three axes of one configuration, run with the
// given velocity dampings and no noise. True only when every axis keeps all
// multipliers inside the tolerance circle. Plugs into the equilibrium
// search as its drive filter.
bool screen_drive_stability(const TrapConfig& trap,
                            const std::vector<Body>& bodies,
                            const Eigen::VectorXd& x, int partner,
                            double gamma_ion, double gamma_partner,
                            const IntegrateOptions& opt = {});

// Dense samples over one period. Energies are the partner's local-well
// potential and kinetic terms; purity is the instantaneous value of the
// integrand that averages to PeriodicCovariance::purity.
struct PeriodicTrace {
  std::vector<double> t;          // s
  std::vector<double> potential;  // J
  std::vector<double> kinetic;    // J
  std::vector<double> purity;
};

struct PeriodicCovariance {
  Eigen::MatrixXd sigma0;          // scaled covariance at t = 0
  Monodromy propagator;
  double purity = 0.0;             // period average for the partner
  double occupation = 0.0;         // (1/purity - 1)/2
  double periodicity_defect = 0.0; // |sigma(T) - sigma0| / |sigma0|
  long steps = 0;                  // accepted steps across both passes
  PeriodicTrace trace;
};

// Periodic steady state of the covariance flow: one pass propagates the
// homogeneous solution and the accumulated diffusion over a period, the
// unique fixed point follows from the discrete-time Lyapunov condition in
// the propagator's eigenbasis, and a second pass through the period
// accumulates the partner purity. Throws not_hurwitz when the multipliers
// reach the unit circle (no periodic steady state) and
// non_physical_covariance if a covariance block loses its uncertainty floor.
// trace_samples > 0 records about that many evenly thinned samples.
PeriodicCovariance periodic_covariance(const PeriodicAxis& ax,
                                       const IntegrateOptions& opt = {},
                                       int trace_samples = 0);

}  // namespace cotrap
