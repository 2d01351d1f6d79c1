#include "trap.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "errors.hpp"
#include "units.hpp"

namespace cotrap {

namespace {

void check_trap(const TrapConfig& trap) {
  if (!(trap.omega_f > trap.omega_s) || !(trap.omega_s > 0.0))
    fail(ErrorCode::invalid_argument,
         "trap drive frequencies must satisfy omega_f > omega_s > 0");
  for (int j = 0; j < 3; ++j) {
    if (!(trap.d[j] > 0.0))
      fail(ErrorCode::invalid_argument, "electrode distance must be positive");
    if (!(trap.alpha[j] > 0.0 && trap.alpha[j] <= 1.0))
      fail(ErrorCode::invalid_argument, "geometric factor must lie in (0, 1]");
  }
}

// Shared pieces of the characteristic equation u^2 - (l^2+A) u + (A l^2 +
// C/2) = 0 for u = beta^2, with A = a + qf^2/2 and C = qs^2 l^4.
struct CharEq {
  double l2, A, C;
};

CharEq char_eq(const MathieuParams& mp) {
  const double l2 = mp.l * mp.l;
  return {l2, mp.a + 0.5 * mp.qf * mp.qf, mp.qs * mp.qs * l2 * l2};
}

}  // namespace

std::array<double, 3> gauss_residuals(const TrapConfig& trap) {
  std::array<double, 3> out{};
  const std::array<const std::array<double, 3>*, 3> rows = {&trap.U0, &trap.Us,
                                                            &trap.Uf};
  for (int r = 0; r < 3; ++r) {
    double sum = 0.0, largest = 0.0;
    for (int j = 0; j < 3; ++j) {
      double term = (*rows[r])[j] * trap.alpha[j] / (trap.d[j] * trap.d[j]);
      sum += term;
      largest = std::max(largest, std::abs(term));
    }
    out[r] = largest > 0.0 ? std::abs(sum) / largest : 0.0;
  }
  return out;
}

MathieuParams mathieu_params(const TrapConfig& trap, const ParticleSpec& p,
                             Axis axis, bool strict_gauss) {
  check_trap(trap);
  if (!(p.mass > 0.0))
    fail(ErrorCode::non_positive_mass, "particle mass must be positive");
  if (p.charge == 0.0)
    fail(ErrorCode::zero_charge, "particle charge must be nonzero");
  if (strict_gauss) {
    auto res = gauss_residuals(trap);
    static const char* row_names[3] = {"DC", "slow RF", "fast RF"};
    for (int r = 0; r < 3; ++r)
      if (res[r] > 1e-9)
        fail(ErrorCode::constraint_violation,
             concat(row_names[r],
                    " voltages violate the divergence-free constraint "
                    "(relative residual ",
                    res[r], ")"));
  }

  const int j = static_cast<int>(axis);
  const double l = trap.omega_s / trap.omega_f;
  const double denom =
      p.mass * trap.d[j] * trap.d[j] * trap.omega_f * trap.omega_f;
  const double pref = p.charge * trap.alpha[j] / denom;

  MathieuParams mp;
  mp.a = 4.0 * pref * trap.U0[j];
  mp.qs = 2.0 * pref * trap.Us[j] / (l * l);
  mp.qf = 2.0 * pref * trap.Uf[j];
  mp.l = l;
  mp.omega_f = trap.omega_f;
  mp.axis = axis;
  return mp;
}

SecularMode secular_mode(const MathieuParams& mp) {
  const auto [l2, A, C] = char_eq(mp);

  SecularMode out;
  // Perturbative smallness of the stiffness modulations; the secular
  // reduction assumes these are well below one.
  const std::pair<const char*, double> small[3] = {
      {"|a|", std::abs(mp.a)}, {"qf^2", mp.qf * mp.qf}, {"qs^2 l^4", C}};
  for (const auto& [label, value] : small) {
    if (value > 0.5)
      fail(ErrorCode::perturbation_out_of_range,
           concat("Mathieu parameter ", label, " = ", value,
                  " exceeds 0.5; the secular description breaks down"));
    if (value > 0.1)
      out.warnings.push_back(
          concat("Mathieu parameter ", label, " = ", value,
                 " above 0.1; secular frequency accuracy degraded"));
  }

  // Root choice. With no slow tone the equation factors as (u - A)(u - l^2)
  // and u = A is the physical root (u = l^2 is the drive resonance line).
  // On the stiff side A >= l^2 the upper root is exact and matches direct
  // integration of the equation of motion to ~1e-4 relative. On the soft
  // side the characteristic equation itself degrades (its resonance
  // denominator over-weights the slow tone) and its exact lower root lands
  // several percent high of the true frequency, while the first-order value
  // A + C/(2 l^2) reproduces both the measured trap frequencies and the
  // integration oracle; we return that and tag the branch.
  double u;
  if (C == 0.0) {
    u = A;
    out.branch = SecularBranch::full_quartic;
  } else if (A >= l2) {
    const double disc = (l2 - A) * (l2 - A) - 2.0 * C;
    if (disc < 0.0)
      fail(ErrorCode::no_stable_root,
           "complex characteristic roots: slow-tone coupling too strong for "
           "a real secular frequency");
    u = 0.5 * ((l2 + A) + std::sqrt(disc));
    out.branch = SecularBranch::ion_branch;
  } else {
    u = A + C / (2.0 * l2);
    out.branch = SecularBranch::nanoparticle_limit;
  }
  if (!(u > 0.0))
    fail(ErrorCode::no_stable_root,
         concat("beta^2 = ", u, " not positive: axis ", axis_name(mp.axis),
                " is not secularly confined"));

  out.beta = std::sqrt(u);
  out.Omega = 0.5 * out.beta * mp.omega_f;
  return out;
}

double nanoparticle_frequency_approx(const MathieuParams& mp) {
  const auto [l2, A, C] = char_eq(mp);
  const double biggest = std::max({std::abs(mp.a), mp.qf * mp.qf, C});
  if (biggest > 0.5 * l2)
    fail(ErrorCode::regime_violation,
         "soft-confinement formula requires a, qf^2, qs^2 l^4 << l^2");
  const double u = A + C / (2.0 * l2);
  if (!(u > 0.0)) fail(ErrorCode::no_stable_root, "axis not confined");
  return 0.5 * std::sqrt(u) * mp.omega_f;
}

double ion_frequency_approx(const MathieuParams& mp) {
  const auto [l2, A, C] = char_eq(mp);
  const double disc = (l2 - A) * (l2 - A) - 2.0 * C;
  if (disc < 0.0)
    fail(ErrorCode::negative_discriminant,
         "stiff-side closed form has a negative discriminant");
  const double u = 0.5 * ((l2 + A) + std::sqrt(disc));
  if (!(u > 0.0)) fail(ErrorCode::no_stable_root, "axis not confined");
  return 0.5 * std::sqrt(u) * mp.omega_f;
}

DisplacementSpec displacement_spec(const MathieuParams& mp,
                                   const SecularMode& mode) {
  const double l2 = mp.l * mp.l;
  const double b2 = mode.beta * mode.beta;
  DisplacementSpec d;
  d.mf = 0.5 * mp.qf;
  d.ms = mp.qs * l2 / (2.0 * (l2 - b2));
  if (std::abs(d.ms) > 0.5)
    fail(ErrorCode::sideband_too_large,
         concat("slow sideband amplitude ", d.ms,
                " exceeds 0.5; the displacement ansatz is invalid here"));
  if (std::abs(d.ms) > 0.2)
    d.warnings.push_back(
        concat("slow sideband amplitude ", d.ms,
               " exceeds 0.2; the envelope is only qualitatively reliable"));
  d.norm = 1.0 + d.mf + d.ms;
  d.Omega = mode.Omega;
  d.omega_f = mp.omega_f;
  d.omega_s = mp.l * mp.omega_f;
  return d;
}

std::complex<double> displacement_eval(const DisplacementSpec& d, double t) {
  const std::complex<double> phase(0.0, d.Omega * t);
  const double envelope = 1.0 + d.mf * std::cos(d.omega_f * t) +
                          d.ms * std::cos(d.omega_s * t);
  return std::exp(phase) * envelope / d.norm;
}

RwaReport rwa_validity(const MathieuParams& mp, const SecularMode& mode,
                       bool is_nanoparticle) {
  RwaReport rep;
  const double Omega = mode.Omega;
  const double omega_s = mp.l * mp.omega_f;
  auto add = [&rep](std::string label, double ratio) {
    rep.checks.push_back({std::move(label), ratio, ratio < 0.1});
  };
  add("qf*omega_f / (16 Omega)",
      std::abs(mp.qf) * mp.omega_f / (16.0 * Omega));
  if (is_nanoparticle) {
    add("qs*omega_s / (16 Omega)", std::abs(mp.qs) * omega_s / (16.0 * Omega));
  } else {
    const double r = omega_s / Omega;
    const double qs8 = mp.qs / 8.0;
    add("slow-tone cubic term",
        std::abs(mp.qs / 64.0 * r * r * r * (1.0 - qs8 * qs8 * r * r)));
  }
  rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                             [](const RwaCheck& c) { return c.pass; });
  return rep;
}

namespace {

// In-place iterative radix-2 FFT; all the periodogram needs.
void fft_radix2(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -units::two_pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace

double classical_frequency_oracle(const MathieuParams& mp,
                                  double min_secular_periods,
                                  int samples_per_fast_period) {
  // Work in dimensionless time tau = omega_f t, where the equation of
  // motion is r'' = -(1/4)(a + 2 qs l^2 cos(l tau) + 2 qf cos(tau)) r and
  // the secular line sits at beta/2 in these units.
  const SecularMode guess = secular_mode(mp);  // validated starting estimate
  const double beta_guess = guess.beta;

  const double fast_period = units::two_pi;
  const double total =
      min_secular_periods * units::two_pi / (0.5 * beta_guess);
  const double h = fast_period / samples_per_fast_period;
  const std::size_t steps_wanted =
      static_cast<std::size_t>(std::ceil(total / h));

  // Decimate onto a power-of-two record; integrate exactly stride*nfft
  // steps so the record is full with no padding.
  std::size_t nfft = 1;
  while ((nfft << 1) <= steps_wanted && nfft < (1u << 17)) nfft <<= 1;
  const std::size_t stride = (steps_wanted + nfft - 1) / nfft;
  const std::size_t steps = stride * nfft;

  const double l2 = mp.l * mp.l;
  auto stiffness = [&](double tau) {
    return 0.25 * (mp.a + 2.0 * mp.qs * l2 * std::cos(mp.l * tau) +
                   2.0 * mp.qf * std::cos(tau));
  };

  std::vector<std::complex<double>> rec;
  rec.reserve(nfft);
  double r = 1.0, v = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    if (i % stride == 0) rec.push_back({r, 0.0});
    auto acc = [&](double tt, double rr) { return -stiffness(tt) * rr; };
    const double k1r = v, k1v = acc(tau, r);
    const double k2r = v + 0.5 * h * k1v,
                 k2v = acc(tau + 0.5 * h, r + 0.5 * h * k1r);
    const double k3r = v + 0.5 * h * k2v,
                 k3v = acc(tau + 0.5 * h, r + 0.5 * h * k2r);
    const double k4r = v + h * k3v, k4v = acc(tau + h, r + h * k3r);
    r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    tau += h;
    if (std::abs(r) > 1e6)
      fail(ErrorCode::integration_diverged,
           "trajectory diverged: parameters are outside the stability "
           "region");
  }

  // Hann window against leakage, then parabolic refinement of the dominant
  // low-frequency line through log magnitudes.
  for (std::size_t i = 0; i < nfft; ++i) {
    const double w =
        0.5 - 0.5 * std::cos(units::two_pi * static_cast<double>(i) /
                             static_cast<double>(nfft - 1));
    rec[i] *= w;
  }
  fft_radix2(rec);

  const double dt_rec = h * static_cast<double>(stride);
  const double df = units::two_pi / (dt_rec * static_cast<double>(nfft));
  // Soft axes keep their secular line below the slow drive; search below it
  // to exclude the drive sidebands. Stiff axes sit far above l, so cap at
  // Nyquist instead.
  const double cap_dimless =
      0.5 * beta_guess > mp.l ? units::pi / dt_rec : 0.9 * mp.l;
  const std::size_t k_hi = std::min<std::size_t>(
      nfft / 2 - 2, static_cast<std::size_t>(cap_dimless / df));
  std::size_t best = 2;
  double best_mag = 0.0;
  for (std::size_t k = 2; k <= k_hi; ++k) {
    const double m = std::abs(rec[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  const double m0 = std::log(std::abs(rec[best - 1]) + 1e-300);
  const double m1 = std::log(std::abs(rec[best]) + 1e-300);
  const double m2 = std::log(std::abs(rec[best + 1]) + 1e-300);
  const double denom = m0 - 2.0 * m1 + m2;
  const double delta = denom != 0.0 ? 0.5 * (m0 - m2) / denom : 0.0;
  const double omega_dimless = (static_cast<double>(best) + delta) * df;
  return omega_dimless * mp.omega_f;
}

}  // namespace cotrap
