#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace cotrap {

enum class Axis : int { x = 0, y = 1, z = 2 };
inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};
inline const char* axis_name(Axis a) {
  static const char* names[3] = {"x", "y", "z"};
  return names[static_cast<int>(a)];
}

// Linear Paul trap driven by a DC potential plus two RF tones (a slow one at
// omega_s and a fast one at omega_f). Per-axis electrode distance d and
// geometric factor alpha; voltages are signed so that each row can satisfy
// the divergence-free condition.
struct TrapConfig {
  std::array<double, 3> d{};      // m
  std::array<double, 3> alpha{};  // dimensionless, (0, 1]
  std::array<double, 3> U0{};     // V, static
  std::array<double, 3> Us{};     // V, slow tone
  std::array<double, 3> Uf{};     // V, fast tone
  double omega_s = 0.0;           // rad/s
  double omega_f = 0.0;           // rad/s
};

// A charged trapped object. radius and eps_r are only meaningful for the
// dielectric nanoparticle (radius 0 marks an ion).
struct ParticleSpec {
  double mass = 0.0;    // kg
  double charge = 0.0;  // C
  double radius = 0.0;  // m
  double eps_r = 0.0;   // relative permittivity
};

// Dimensionless stiffness parameters of the per-axis two-tone Mathieu
// equation  R'' + (a + 2 qs l^2 cos(2 l tau) + 2 qf cos(2 tau)) R = 0,
// tau = omega_f t / 2, l = omega_s/omega_f. Note qs carries a 1/l^2 in its
// definition; the l^2 in the equation above multiplies it back. Store qs as
// defined and never pre-scale it.
struct MathieuParams {
  double a = 0.0;
  double qs = 0.0;
  double qf = 0.0;
  double l = 0.0;
  double omega_f = 0.0;  // rad/s, kept so frequencies can be reported in SI
  Axis axis = Axis::x;
};

// Which closed-form root of the secular characteristic equation
//   u^2 - (l^2 + A) u + (A l^2 + C/2) = 0,  A = a + qf^2/2, C = qs^2 l^4,
// was used. The upper root is exact and valid on the stiff side (A >= l^2,
// the ion). On the soft side the upper-root formula's companion root
// disagrees with the true dynamics, and the perturbative value A + C/(2 l^2)
// is the one that reproduces both measured trap frequencies and numerical
// integration; see secular_mode() for the branch logic.
enum class SecularBranch { full_quartic, ion_branch, nanoparticle_limit };

struct SecularMode {
  double Omega = 0.0;  // rad/s
  double beta = 0.0;   // dimensionless, Omega = beta * omega_f / 2
  SecularBranch branch = SecularBranch::full_quartic;
  std::vector<std::string> warnings;
};

// Single-axis trajectory ansatz R(t) = e^{i Omega t} (1 + mf cos(omega_f t)
// + ms cos(omega_s t)) / (1 + mf + ms), normalized to R(0) = 1.
struct DisplacementSpec {
  double Omega = 0.0;
  double mf = 0.0;  // fast sideband amplitude qf/2
  double ms = 0.0;  // slow sideband amplitude qs l^2 / (2 (l^2 - beta^2))
  double norm = 0.0;
  double omega_s = 0.0;
  double omega_f = 0.0;
  std::vector<std::string> warnings;  // |ms| past 0.2 but below the 0.5 cutoff
};

struct RwaCheck {
  std::string label;
  double ratio = 0.0;
  bool pass = false;  // ratio below 0.1
};

struct RwaReport {
  std::vector<RwaCheck> checks;
  bool all_pass = false;
};

// Relative residuals of the three divergence-free voltage constraints
// sum_j U_j alpha_j / d_j^2 = 0 (one per voltage row: DC, slow, fast),
// each normalized to its largest term.
std::array<double, 3> gauss_residuals(const TrapConfig& trap);

// strict = true turns a Gauss-constraint violation (relative residual above
// 1e-9) into an error instead of leaving it to the caller's diagnostics.
MathieuParams mathieu_params(const TrapConfig& trap, const ParticleSpec& p,
                             Axis axis, bool strict_gauss = false);

// Secular frequency from the characteristic equation, on the branch that
// recovers the single-tone limit.
SecularMode secular_mode(const MathieuParams& mp);

// Closed-form approximation valid when a, qf^2, qs^2 l^4 << l^2 (the
// nanoparticle side). Agrees with secular_mode in that regime.
double nanoparticle_frequency_approx(const MathieuParams& mp);

// Closed-form expression on the stiff side (the ion). Algebraically equal
// to the upper characteristic root.
double ion_frequency_approx(const MathieuParams& mp);

DisplacementSpec displacement_spec(const MathieuParams& mp,
                                   const SecularMode& mode);
std::complex<double> displacement_eval(const DisplacementSpec& d, double t);

// Validation oracle: integrates the two-tone Mathieu equation over at least
// 50 secular periods and returns the dominant low-frequency spectral peak
// (Hann window, parabolic log-magnitude interpolation). Test use only:
// slow, but independent of every closed form above.
double classical_frequency_oracle(const MathieuParams& mp,
                                  double min_secular_periods = 50.0,
                                  int samples_per_fast_period = 200);

// Rotating-wave validity diagnostics; ratios must stay well below one for
// the quantum ladder description to hold. Threshold 0.1.
RwaReport rwa_validity(const MathieuParams& mp, const SecularMode& mode,
                       bool is_nanoparticle);

}  // namespace cotrap
