#include "floquet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "errors.hpp"
#include "linear.hpp"
#include "units.hpp"

namespace cotrap {
namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

int validate_axis(const PeriodicAxis& ax) {
  const Eigen::Index n = ax.omega_scale.size();
  if (n < 1)
    fail(ErrorCode::invalid_argument, "periodic axis needs at least one body");
  if (ax.w_base.size() != n || ax.w_slow.size() != n || ax.w_fast.size() != n ||
      ax.w_secular.size() != n || ax.damping.size() != n ||
      ax.diff_pos.size() != n || ax.diff_mom.size() != n)
    fail(ErrorCode::invalid_argument,
         "periodic axis vectors disagree on the body count");
  if (ax.coupler.rows() != n || ax.coupler.cols() != n)
    fail(ErrorCode::invalid_argument,
         "coupler block must be square over the bodies");
  if (!(ax.omega_s > 0.0) || !(ax.omega_f > 0.0) || !(ax.period > 0.0))
    fail(ErrorCode::invalid_argument,
         "tone frequencies and period must be positive");
  if (ax.partner >= n)
    fail(ErrorCode::invalid_argument,
         concat("partner index ", ax.partner, " exceeds the body count"));
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(ax.omega_scale[k] > 0.0))
      fail(ErrorCode::invalid_argument,
           "quadrature scaling frequencies must be positive");
    if (ax.damping[k] < 0.0 || ax.diff_pos[k] < 0.0 || ax.diff_mom[k] < 0.0)
      fail(ErrorCode::invalid_argument,
           "damping and diffusion rates cannot be negative");
  }
  return static_cast<int>(n);
}

// Scaled drift matrix with the static parts assembled once; only the
// lower-left diagonal moves with time, at two cosine evaluations per call.
class DriftEval {
 public:
  explicit DriftEval(const PeriodicAxis& ax)
      : n_(validate_axis(ax)), omega_s_(ax.omega_s), omega_f_(ax.omega_f) {
    A_.setZero(2 * n_, 2 * n_);
    A_.block(n_, 0, n_, n_) = -ax.coupler;
    base_.resize(n_);
    slow_.resize(n_);
    fast_.resize(n_);
    for (int k = 0; k < n_; ++k) {
      A_(k, k) = -ax.damping[k] / 2;
      A_(n_ + k, n_ + k) = -ax.damping[k] / 2;
      A_(k, n_ + k) = ax.omega_scale[k];
      base_[k] = ax.coupler(k, k) + ax.w_base[k] / ax.omega_scale[k];
      slow_[k] = ax.w_slow[k] / ax.omega_scale[k];
      fast_[k] = ax.w_fast[k] / ax.omega_scale[k];
      A_(n_ + k, k) = -base_[k];
    }
    has_slow_ = (slow_.array() != 0.0).any();
    has_fast_ = (fast_.array() != 0.0).any();
  }

  const MatrixXd& at(double t) {
    if (has_slow_ || has_fast_) {
      const double cs = has_slow_ ? std::cos(omega_s_ * t) : 0.0;
      const double cf = has_fast_ ? std::cos(omega_f_ * t) : 0.0;
      for (int k = 0; k < n_; ++k)
        A_(n_ + k, k) = -(base_[k] + slow_[k] * cs + fast_[k] * cf);
    }
    return A_;
  }

  bool time_dependent() const { return has_slow_ || has_fast_; }

 private:
  int n_;
  double omega_s_;
  double omega_f_;
  VectorXd base_, slow_, fast_;
  bool has_slow_ = false;
  bool has_fast_ = false;
  MatrixXd A_;
};

// The step cap follows the fastest tone that is actually driven, so a
// tone-free axis is not forced through half a million steps.
double step_cap(const PeriodicAxis& ax, const IntegrateOptions& opt) {
  const int per = std::max(1, opt.min_steps_per_fast);
  double res = ax.period;
  if ((ax.w_fast.array() != 0.0).any())
    res = units::two_pi / ax.omega_f;
  else if ((ax.w_slow.array() != 0.0).any())
    res = units::two_pi / ax.omega_s;
  return std::min(res / per, ax.period);
}

// Dormand-Prince 5(4) embedded pair. kB* is the fifth-order solution, kE*
// the defect against the fourth-order estimate; the last stage evaluation
// doubles as the first one of the next step.
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

template <typename Deriv, typename Obs>
long adaptive_flow(const Deriv& f, VectorXd& y, double t_end, double max_step,
                   const IntegrateOptions& opt, const Obs& observe) {
  const double atol = opt.abs_tol, rtol = opt.rel_tol;
  const Eigen::Index m = y.size();
  VectorXd k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), ytmp(m), y5(m),
      errv(m);
  double t = 0.0;
  double h = std::min(max_step, t_end);
  const double h_floor = max_step * 1e-10;
  f(0.0, y, k1);
  long accepted = 0;
  while (t < t_end) {
    if (h > t_end - t) h = t_end - t;
    ytmp = y + h * (kA21 * k1);
    f(t + kC2 * h, ytmp, k2);
    ytmp = y + h * (kA31 * k1 + kA32 * k2);
    f(t + kC3 * h, ytmp, k3);
    ytmp = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    f(t + kC4 * h, ytmp, k4);
    ytmp = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    f(t + kC5 * h, ytmp, k5);
    ytmp = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    f(t + h, ytmp, k6);
    y5 = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    f(t + h, y5, k7);
    errv = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 +
                kE7 * k7);
    const double norm = std::sqrt(
        (errv.array() / (atol + rtol * y.array().abs().max(y5.array().abs())))
            .square()
            .mean());
    if (norm <= 1.0) {
      t += h;
      y.swap(y5);
      k1.swap(k7);
      ++accepted;
      observe(t, y);
      const double grow = norm > 1e-30 ? 0.9 * std::pow(norm, -0.2) : 5.0;
      h = std::min(h * std::clamp(grow, 0.2, 5.0), max_step);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
      if (h < h_floor)
        fail(ErrorCode::integration_diverged,
             concat("adaptive step collapsed to ", h, " s at t = ", t, " s"));
    }
  }
  return accepted;
}

template <typename Deriv, typename Obs>
long fixed_flow(const Deriv& f, VectorXd& y, double t_end, double dt,
                const Obs& observe) {
  const long steps =
      std::max<long>(1, static_cast<long>(std::ceil(t_end / dt - 1e-9)));
  const double h = t_end / static_cast<double>(steps);
  const Eigen::Index m = y.size();
  VectorXd k1(m), k2(m), k3(m), k4(m), ytmp(m);
  for (long i = 0; i < steps; ++i) {
    const double t = h * static_cast<double>(i);
    f(t, y, k1);
    ytmp = y + (h / 2) * k1;
    f(t + h / 2, ytmp, k2);
    ytmp = y + (h / 2) * k2;
    f(t + h / 2, ytmp, k3);
    ytmp = y + h * k3;
    f(t + h, ytmp, k4);
    y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    observe(h * static_cast<double>(i + 1), y);
  }
  return steps;
}

template <typename Deriv, typename Obs>
long run_flow(const Deriv& f, VectorXd& y, double t_end, double cap,
              const IntegrateOptions& opt, const Obs& obs) {
  if (opt.fixed_dt > 0.0) return fixed_flow(f, y, t_end, opt.fixed_dt, obs);
  return adaptive_flow(f, y, t_end, cap, opt, obs);
}

const auto kNoObserver = [](double, const VectorXd&) {};

Monodromy finish_monodromy(MatrixXd M, long steps) {
  Monodromy out;
  out.M = std::move(M);
  Eigen::EigenSolver<MatrixXd> es(out.M, false);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::not_converged,
         "eigenvalue iteration failed on the monodromy matrix");
  out.multipliers = es.eigenvalues();
  out.max_abs = out.multipliers.cwiseAbs().maxCoeff();
  out.stable = out.max_abs <= 1.0 + kMultiplierTol;
  out.steps = steps;
  return out;
}

// Steady covariance of a time-independent axis from the dense vectorized
// solve. Using this instead of the period map matters: the weakly damped
// directions make I - M kron M singular to within integrator noise, while
// the continuous-time system divides by the damping rates themselves.
MatrixXd continuous_steady(const MatrixXd& A, const VectorXd& cdiag) {
  const int d = static_cast<int>(A.rows());
  Eigen::EigenSolver<MatrixXd> es(A, false);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::not_converged, "eigenvalue iteration failed on the drift");
  const double abscissa = es.eigenvalues().real().maxCoeff();
  if (abscissa >= -1e-15 * A.norm())
    fail(ErrorCode::not_hurwitz,
         concat("static drift has spectral abscissa ", abscissa,
                "; no steady covariance"));
  MatrixXd K = MatrixXd::Zero(d * d, d * d);
  for (int b = 0; b < d; ++b) K.block(b * d, b * d, d, d) = A;
  for (int bi = 0; bi < d; ++bi)
    for (int bj = 0; bj < d; ++bj)
      for (int r = 0; r < d; ++r) K(bi * d + r, bj * d + r) += A(bi, bj);
  VectorXd rhs = VectorXd::Zero(d * d);
  for (int k = 0; k < d; ++k) rhs[k * d + k] = -cdiag[k];
  const VectorXd v = Eigen::PartialPivLU<MatrixXd>(K).solve(rhs);
  MatrixXd sigma = Eigen::Map<const MatrixXd>(v.data(), d, d);
  return ((sigma + sigma.transpose()) / 2).eval();
}

// Fixed point of sigma = M sigma M^T + S in the eigenbasis of M, where the
// divisions 1 - lambda_i lambda_j are numerically benign even when the
// weakest multiplier pair sits within 1e-11 of the unit circle. Falls back
// to the dense vectorized solve if M is too close to defective.
MatrixXd stein_fixed_point(const MatrixXd& M, const MatrixXd& S) {
  const int d = static_cast<int>(M.rows());
  Eigen::EigenSolver<MatrixXd> es(M, true);
  if (es.info() == Eigen::Success) {
    const MatrixXcd V = es.eigenvectors();
    const VectorXcd lam = es.eigenvalues();
    Eigen::JacobiSVD<MatrixXcd> svd(V);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin > 0.0 && smax / smin < 1e10) {
      Eigen::PartialPivLU<MatrixXcd> lu(V);
      MatrixXcd T = lu.solve(S.cast<std::complex<double>>());
      T = lu.solve(T.transpose().eval()).transpose().eval();
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const std::complex<double> denom = 1.0 - lam[i] * lam[j];
          if (std::abs(denom) < 1e-13)
            fail(ErrorCode::not_hurwitz,
                 "period map resolvent is singular on the unit circle");
          T(i, j) /= denom;
        }
      const MatrixXcd X = V * T * V.transpose();
      const MatrixXd R = X.real();
      return ((R + R.transpose()) / 2).eval();
    }
  }
  MatrixXd K = MatrixXd::Identity(d * d, d * d);
  for (int bi = 0; bi < d; ++bi)
    for (int bj = 0; bj < d; ++bj)
      K.block(bi * d, bj * d, d, d) -= M(bi, bj) * M;
  const VectorXd rhs = Eigen::Map<const VectorXd>(S.data(), d * d);
  const VectorXd v = Eigen::PartialPivLU<MatrixXd>(K).solve(rhs);
  if ((K * v - rhs).norm() > 1e-6 * rhs.norm())
    fail(ErrorCode::not_hurwitz,
         "period map resolvent is singular on the unit circle");
  MatrixXd sigma = Eigen::Map<const MatrixXd>(v.data(), d, d);
  return ((sigma + sigma.transpose()) / 2).eval();
}

ParticleSpec point_spec(const Body& b) {
  return ParticleSpec{b.mass, b.charge, 0.0, 1.0};
}

// Rounds the fast tone onto the nearest harmonic of the slow one so that
// one slow period closes both drives exactly.
TrapConfig lock_tones(const TrapConfig& in, bool& locked) {
  if (!(in.omega_s > 0.0) || !(in.omega_f > 0.0))
    fail(ErrorCode::invalid_argument, "both tone frequencies must be positive");
  TrapConfig trap = in;
  const double ratio = trap.omega_f / trap.omega_s;
  const double nearest = std::round(ratio);
  if (nearest < 1.0)
    fail(ErrorCode::invalid_argument,
         "fast tone must sit at or above the slow tone");
  locked = std::abs(ratio - nearest) > 1e-9 * ratio;
  if (locked) trap.omega_f = nearest * trap.omega_s;
  return trap;
}

// Displacements confined to a single axis keep the Coulomb stiffness axis
// diagonal; a tone on the displaced axis would add a periodic drive force
// that this per-axis treatment does not model.
void check_on_axis(const TrapConfig& trap, const std::vector<Body>& bodies,
                   const Eigen::VectorXd& x) {
  constexpr double kTol = 1e-12;  // m, far below any physical layout
  int displaced = -1;
  for (int s = 0; s < 3; ++s) {
    bool any = false;
    for (std::size_t k = 0; k < bodies.size(); ++k)
      any = any || std::abs(x[3 * static_cast<int>(k) + s]) > kTol;
    if (!any) continue;
    if (displaced >= 0)
      fail(ErrorCode::off_axis_layout,
           "configuration is displaced along more than one axis");
    displaced = s;
  }
  if (displaced >= 0 && (trap.Us[displaced] * trap.alpha[displaced] != 0.0 ||
                         trap.Uf[displaced] * trap.alpha[displaced] != 0.0))
    fail(ErrorCode::off_axis_layout,
         concat("axis ", axis_name(static_cast<Axis>(displaced)),
                " is displaced inside an RF tone; the resulting drive force"
                " is not modeled"));
}

void check_bodies(const std::vector<Body>& bodies, const Eigen::VectorXd& x,
                  int partner, bool allow_unset_partner) {
  const int n = static_cast<int>(bodies.size());
  if (n < 1) fail(ErrorCode::invalid_argument, "need at least one body");
  if (x.size() != 3 * n)
    fail(ErrorCode::invalid_argument,
         concat("position vector has ", x.size(), " entries for ", n,
                " bodies"));
  if (partner >= n || (partner < 0 && !allow_unset_partner))
    fail(ErrorCode::invalid_argument,
         concat("partner index ", partner, " out of range"));
}

void fill_tones(const TrapConfig& trap, const std::vector<Body>& bodies,
                Axis axis, PeriodicAxis& ax) {
  const int n = static_cast<int>(bodies.size());
  const int s = static_cast<int>(axis);
  ax.w_base.resize(n);
  ax.w_slow.resize(n);
  ax.w_fast.resize(n);
  ax.w_secular.resize(n);
  const double quarter = trap.omega_f * trap.omega_f / 4;
  for (int k = 0; k < n; ++k) {
    const MathieuParams mp = mathieu_params(trap, point_spec(bodies[k]), axis);
    ax.w_base[k] = quarter * mp.a;
    ax.w_slow[k] = quarter * 2 * mp.qs * mp.l * mp.l;
    ax.w_fast[k] = quarter * 2 * mp.qf;
    ax.w_secular[k] = bodies[k].Omega[s] * bodies[k].Omega[s];
  }
  ax.period = (ax.w_slow.array() != 0.0).any() ? units::two_pi / ax.omega_s
                                               : units::two_pi / ax.omega_f;
}

void fill_coupler(const std::vector<Body>& bodies, const Eigen::VectorXd& x,
                  Axis axis, PeriodicAxis& ax) {
  const int n = static_cast<int>(bodies.size());
  const int s = static_cast<int>(axis);
  const MatrixXd H = stiffness_matrix(bodies, x);
  ax.coupler.resize(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      ax.coupler(k, l) =
          H(3 * k + s, 3 * l + s) /
          std::sqrt(bodies[k].mass * bodies[l].mass * ax.omega_scale[k] *
                    ax.omega_scale[l]);
    }
    ax.coupler(k, k) =
        (H(3 * k + s, 3 * k + s) - bodies[k].mass * ax.w_secular[k]) /
        (bodies[k].mass * ax.omega_scale[k]);
  }
}

}  // namespace

PeriodicAxis periodic_axis(const TrapConfig& trap_in,
                           const std::vector<Body>& bodies,
                           const Eigen::VectorXd& x, int partner, Axis axis,
                           const ParticleSpec& partner_spec,
                           const GasSpec& gas, const FeedbackSpec& fb,
                           double edot_td, const DopplerSpec& dop,
                           double gamma_p_override) {
  check_bodies(bodies, x, partner, false);
  if (std::abs(bodies[partner].mass - partner_spec.mass) >
      1e-9 * partner_spec.mass)
    fail(ErrorCode::invalid_argument,
         "partner body and partner spec disagree on the mass");
  bool locked = false;
  const TrapConfig trap = lock_tones(trap_in, locked);
  check_on_axis(trap, bodies, x);

  PeriodicAxis ax;
  ax.omega_s = trap.omega_s;
  ax.omega_f = trap.omega_f;
  ax.tone_locked = locked;
  ax.partner = partner;
  fill_tones(trap, bodies, axis, ax);

  const int n = static_cast<int>(bodies.size());
  const int s = static_cast<int>(axis);
  ax.omega_scale.resize(n);
  for (int k = 0; k < n; ++k)
    ax.omega_scale[k] = renormalized_frequencies(bodies, x, k)[s];
  fill_coupler(bodies, x, axis, ax);

  ax.damping.resize(n);
  ax.diff_pos.resize(n);
  ax.diff_mom.resize(n);
  const double gamma_gas = gas_damping(partner_spec, gas);
  for (int k = 0; k < n; ++k) {
    if (k == partner) continue;
    const double G = doppler_heating(dop, ax.omega_scale[k]);
    ax.damping[k] = dop.gamma_dop;
    ax.diff_pos[k] = dop.gamma_dop + 2 * G;
    ax.diff_mom[k] = ax.diff_pos[k];
  }
  const double scale_p = ax.omega_scale[partner];
  const double G_gas = gas_heating(gamma_gas, gas, scale_p);
  const double G_td = displacement_heating(edot_td, scale_p);
  const double G_ba = backaction_heating(partner_spec, fb, scale_p);
  const double G_total = G_gas + G_td + G_ba;
  ax.damping[partner] =
      gamma_p_override >= 0.0 ? gamma_p_override : gamma_gas + fb.gamma_fb;
  ax.diff_pos[partner] = gamma_gas + 2 * G_gas;
  ax.diff_mom[partner] = gamma_gas + 2 * (2 * G_total - G_gas);
  return ax;
}

PeriodicAxis screening_axis(const TrapConfig& trap_in,
                            const std::vector<Body>& bodies,
                            const Eigen::VectorXd& x, int partner, Axis axis,
                            double gamma_ion, double gamma_partner) {
  check_bodies(bodies, x, partner, true);
  if (gamma_ion < 0.0 || gamma_partner < 0.0)
    fail(ErrorCode::invalid_argument, "damping rates cannot be negative");
  bool locked = false;
  const TrapConfig trap = lock_tones(trap_in, locked);
  check_on_axis(trap, bodies, x);

  PeriodicAxis ax;
  ax.omega_s = trap.omega_s;
  ax.omega_f = trap.omega_f;
  ax.tone_locked = locked;
  ax.partner = partner;
  fill_tones(trap, bodies, axis, ax);

  const int n = static_cast<int>(bodies.size());
  const int s = static_cast<int>(axis);
  // Scale by the bare secular rate where one exists. A candidate past its
  // stability edge has none on the soft axis; any positive rate gives the
  // same multipliers, so fall back to the fast-tone rate there.
  ax.omega_scale.resize(n);
  for (int k = 0; k < n; ++k)
    ax.omega_scale[k] =
        bodies[k].Omega[s] > 0.0 ? bodies[k].Omega[s] : trap.omega_f / 2;
  fill_coupler(bodies, x, axis, ax);

  ax.damping.resize(n);
  for (int k = 0; k < n; ++k)
    ax.damping[k] = k == partner ? gamma_partner : gamma_ion;
  ax.diff_pos = VectorXd::Zero(n);
  ax.diff_mom = VectorXd::Zero(n);
  return ax;
}

PeriodicAxis secular_limit(const PeriodicAxis& ax) {
  validate_axis(ax);
  PeriodicAxis out = ax;
  out.w_base = ax.w_secular;
  out.w_slow.setZero();
  out.w_fast.setZero();
  out.period = units::two_pi / out.omega_f;
  return out;
}

Eigen::MatrixXd axis_drift(const PeriodicAxis& ax, double t) {
  DriftEval drift(ax);
  return drift.at(t);
}

Eigen::MatrixXd axis_diffusion(const PeriodicAxis& ax) {
  const int n = validate_axis(ax);
  MatrixXd C = MatrixXd::Zero(2 * n, 2 * n);
  C.diagonal().head(n) = ax.diff_pos;
  C.diagonal().tail(n) = ax.diff_mom;
  return C;
}

Monodromy monodromy(const PeriodicAxis& ax, const IntegrateOptions& opt) {
  DriftEval drift(ax);
  const int d = 2 * static_cast<int>(ax.omega_scale.size());
  VectorXd y(d * d);
  Eigen::Map<MatrixXd>(y.data(), d, d).setIdentity();
  auto f = [&](double t, const VectorXd& yy, VectorXd& dy) {
    Eigen::Map<const MatrixXd> X(yy.data(), d, d);
    Eigen::Map<MatrixXd> D(dy.data(), d, d);
    D.noalias() = drift.at(t) * X;
  };
  const long steps =
      run_flow(f, y, ax.period, step_cap(ax, opt), opt, kNoObserver);
  return finish_monodromy(MatrixXd(Eigen::Map<MatrixXd>(y.data(), d, d)),
                          steps);
}

bool screen_drive_stability(const TrapConfig& trap,
                            const std::vector<Body>& bodies,
                            const Eigen::VectorXd& x, int partner,
                            double gamma_ion, double gamma_partner,
                            const IntegrateOptions& opt) {
  // The transverse axes go parametrically unstable first, so probe them
  // before the cheap axial one.
  for (Axis axis : {Axis::y, Axis::x, Axis::z}) {
    const PeriodicAxis ax =
        screening_axis(trap, bodies, x, partner, axis, gamma_ion,
                       gamma_partner);
    if (!monodromy(ax, opt).stable) return false;
  }
  return true;
}

PeriodicCovariance periodic_covariance(const PeriodicAxis& ax,
                                       const IntegrateOptions& opt,
                                       int trace_samples) {
  const int n = validate_axis(ax);
  if (ax.partner < 0)
    fail(ErrorCode::invalid_argument,
         "periodic covariance needs a partner body to report");
  const int d = 2 * n;
  const int pr = ax.partner;
  const int pm = n + ax.partner;
  DriftEval drift(ax);
  VectorXd cdiag(d);
  cdiag.head(n) = ax.diff_pos;
  cdiag.tail(n) = ax.diff_mom;
  const double cap = step_cap(ax, opt);

  PeriodicCovariance out;
  MatrixXd sigma0;
  if (!drift.time_dependent()) {
    sigma0 = continuous_steady(drift.at(0.0), cdiag);
    out.propagator = monodromy(ax, opt);
  } else {
    VectorXd y = VectorXd::Zero(2 * d * d);
    Eigen::Map<MatrixXd>(y.data(), d, d).setIdentity();
    MatrixXd prod(d, d);
    auto f = [&](double t, const VectorXd& yy, VectorXd& dy) {
      const MatrixXd& A = drift.at(t);
      Eigen::Map<const MatrixXd> Phi(yy.data(), d, d);
      Eigen::Map<const MatrixXd> S(yy.data() + d * d, d, d);
      Eigen::Map<MatrixXd> dPhi(dy.data(), d, d);
      Eigen::Map<MatrixXd> dS(dy.data() + d * d, d, d);
      dPhi.noalias() = A * Phi;
      prod.noalias() = A * S;
      dS = prod + prod.transpose();
      dS.diagonal() += cdiag;
    };
    const long steps = run_flow(f, y, ax.period, cap, opt, kNoObserver);
    out.propagator = finish_monodromy(
        MatrixXd(Eigen::Map<MatrixXd>(y.data(), d, d)), steps);
    if (out.propagator.max_abs >= 1.0 + kMultiplierTol)
      fail(ErrorCode::not_hurwitz,
           concat("monodromy spectral radius ", out.propagator.max_abs,
                  " leaves no periodic steady state"));
    sigma0 = stein_fixed_point(out.propagator.M,
                               Eigen::Map<MatrixXd>(y.data() + d * d, d, d));
  }

  const double hbar = units::hbar;
  const double scale_p = ax.omega_scale[pr];
  auto record = [&](double t, const VectorXd& yy) {
    Eigen::Map<const MatrixXd> Sg(yy.data(), d, d);
    const double det =
        Sg(pr, pr) * Sg(pm, pm) - Sg(pr, pm) * Sg(pm, pr);
    const double wp = ax.w_base[pr] + ax.w_slow[pr] * std::cos(ax.omega_s * t) +
                      ax.w_fast[pr] * std::cos(ax.omega_f * t);
    out.trace.t.push_back(t);
    out.trace.potential.push_back(hbar * wp / (4 * scale_p) * Sg(pr, pr));
    out.trace.kinetic.push_back(hbar * scale_p / 4 * Sg(pm, pm));
    out.trace.purity.push_back(det > 0.0 ? 1.0 / std::sqrt(det) : 0.0);
  };

  VectorXd y2(d * d + 1);
  Eigen::Map<MatrixXd>(y2.data(), d, d) = sigma0;
  y2[d * d] = 0.0;
  MatrixXd prod2(d, d);
  auto f2 = [&](double t, const VectorXd& yy, VectorXd& dy) {
    const MatrixXd& A = drift.at(t);
    Eigen::Map<const MatrixXd> Sg(yy.data(), d, d);
    Eigen::Map<MatrixXd> dS(dy.data(), d, d);
    prod2.noalias() = A * Sg;
    dS = prod2 + prod2.transpose();
    dS.diagonal() += cdiag;
    const double det =
        Sg(pr, pr) * Sg(pm, pm) - Sg(pr, pm) * Sg(pm, pr);
    if (det < 1.0 - 1e-6)
      fail(ErrorCode::non_physical_covariance,
           concat("partner covariance determinant ", det,
                  " fell below the uncertainty floor"));
    dy[d * d] = 1.0 / (ax.period * std::sqrt(det));
  };
  const long expected = static_cast<long>(ax.period / cap) + 1;
  const long stride =
      trace_samples > 0 ? std::max<long>(1, expected / trace_samples) : 0;
  long count = 0;
  auto observe = [&](double t, const VectorXd& yy) {
    if (stride > 0 && count++ % stride == 0) record(t, yy);
  };
  if (stride > 0) record(0.0, y2);
  const long steps2 = run_flow(f2, y2, ax.period, cap, opt, observe);

  Eigen::Map<const MatrixXd> sigma_end(y2.data(), d, d);
  out.periodicity_defect =
      (sigma_end - sigma0).norm() / std::max(sigma0.norm(), 1e-300);
  out.purity = y2[d * d];
  if (out.purity > 1.0 + 1e-9)
    fail(ErrorCode::non_physical_covariance,
         concat("period-averaged purity ", out.purity, " exceeds one"));
  out.occupation = std::max(0.0, (1.0 / out.purity - 1.0) / 2.0);
  out.sigma0 = std::move(sigma0);
  out.steps = out.propagator.steps + steps2;
  return out;
}

}  // namespace cotrap
