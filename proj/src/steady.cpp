#include "steady.hpp"

#include <cmath>
#include <complex>

#include "errors.hpp"

namespace cotrap {

namespace {

using Eigen::MatrixXcd;
using cplx = std::complex<double>;
using cplxl = std::complex<long double>;
using MatrixXl =
    Eigen::Matrix<cplxl, Eigen::Dynamic, Eigen::Dynamic>;

void validate_system(const LadderSystem& sys) {
  const int m = static_cast<int>(sys.modes.size());
  if (m == 0) fail(ErrorCode::invalid_argument, "ladder system has no modes");
  for (int k = 0; k < m; ++k) {
    const LadderMode& mode = sys.modes[k];
    if (!(mode.Omega > 0.0)) {
      fail(ErrorCode::invalid_argument,
           concat("mode ", k, " frequency must be positive, got ", mode.Omega));
    }
    if (!(mode.damping >= 0.0)) {
      fail(ErrorCode::invalid_argument,
           concat("mode ", k, " damping must be non-negative"));
    }
    if (!(mode.feed_offdiag >= 0.0)) {
      fail(ErrorCode::invalid_argument,
           concat("mode ", k, " off-diagonal feed must be non-negative"));
    }
  }
  if (sys.g.rows() != m || sys.g.cols() != m) {
    fail(ErrorCode::invalid_argument,
         concat("coupling matrix must be ", m, "x", m));
  }
  const double scale = std::max(1.0, sys.g.cwiseAbs().maxCoeff());
  for (int a = 0; a < m; ++a) {
    if (sys.g(a, a) != 0.0) {
      fail(ErrorCode::invalid_argument, "coupling matrix diagonal must be zero");
    }
    for (int b = a + 1; b < m; ++b) {
      if (std::abs(sys.g(a, b) - sys.g(b, a)) > 1e-12 * scale) {
        fail(ErrorCode::invalid_argument, "coupling matrix must be symmetric");
      }
    }
  }
}

// Signed oscillator diagonal (-Omega_k, +Omega_k, ...). The drift is
// i*diag(osc) plus the damping/coupling remainder; keeping the split lets
// the residual evaluation cancel the conjugate-pair frequencies exactly.
std::vector<double> oscillator_diagonal(const LadderSystem& sys) {
  std::vector<double> osc(2 * sys.modes.size());
  for (std::size_t k = 0; k < sys.modes.size(); ++k) {
    osc[2 * k] = -sys.modes[k].Omega;
    osc[2 * k + 1] = sys.modes[k].Omega;
  }
  return osc;
}

MatrixXcd damping_coupling_part(const LadderSystem& sys) {
  const int m = static_cast<int>(sys.modes.size());
  MatrixXcd A = MatrixXcd::Zero(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    A(2 * k, 2 * k) = -sys.modes[k].damping / 2.0;
    A(2 * k + 1, 2 * k + 1) = -sys.modes[k].damping / 2.0;
  }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      const cplx ig(0.0, sys.g(a, b));
      A(2 * a, 2 * b) += -ig;
      A(2 * a, 2 * b + 1) += -ig;
      A(2 * a + 1, 2 * b) += ig;
      A(2 * a + 1, 2 * b + 1) += ig;
    }
  }
  return A;
}

// Solve T Y + Y T^T = D with T upper triangular (Schur frame).
MatrixXcd schur_backsolve(const MatrixXcd& T, const MatrixXcd& D) {
  const int n = static_cast<int>(T.rows());
  MatrixXcd Y = MatrixXcd::Zero(n, n);
  for (int i = n - 1; i >= 0; --i) {
    for (int j = n - 1; j >= 0; --j) {
      cplx acc = D(i, j);
      for (int k = i + 1; k < n; ++k) acc -= T(i, k) * Y(k, j);
      for (int k = j + 1; k < n; ++k) acc -= Y(i, k) * T(j, k);
      Y(i, j) = acc / (T(i, i) + T(j, j));
    }
  }
  return Y;
}

// Solve A X + X A^T = -rhs given the Schur factors A = U T U^H.
MatrixXcd sylvester_solve(const MatrixXcd& U, const MatrixXcd& T,
                          const MatrixXcd& rhs) {
  const MatrixXcd D = -(U.adjoint() * rhs * U.conjugate());
  return U * schur_backsolve(T, D) * U.transpose();
}

// A X + X A^T + C evaluated in extended precision with the oscillator
// diagonal summed pairwise first, so the exactly-opposite +-Omega pairs
// never inflate the roundoff floor.
MatrixXl accurate_residual(const std::vector<double>& osc, const MatrixXcd& Ad,
                           const MatrixXl& X, const MatrixXcd& C) {
  const int n = static_cast<int>(X.rows());
  MatrixXl R(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cplxl acc(C(i, j).real(), C(i, j).imag());
      const long double w =
          static_cast<long double>(osc[i]) + static_cast<long double>(osc[j]);
      acc += cplxl(0.0L, w) * X(i, j);
      for (int k = 0; k < n; ++k) {
        acc += cplxl(Ad(i, k).real(), Ad(i, k).imag()) * X(k, j);
        acc += X(i, k) * cplxl(Ad(j, k).real(), Ad(j, k).imag());
      }
      R(i, j) = acc;
    }
  }
  return R;
}

MatrixXcd to_double(const MatrixXl& M) {
  MatrixXcd D(M.rows(), M.cols());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      D(i, j) = cplx(static_cast<double>(M(i, j).real()),
                     static_cast<double>(M(i, j).imag()));
  return D;
}

void check_regime(double Omega_i, double g, double gamma_dop) {
  if (std::abs(g) > 0.1 * Omega_i) {
    fail(ErrorCode::regime_violation,
         concat("coupling |g| = ", std::abs(g),
                " is not small against the ion frequency ", Omega_i));
  }
  if (gamma_dop > 0.1 * Omega_i) {
    fail(ErrorCode::regime_violation,
         concat("Doppler damping ", gamma_dop,
                " is not small against the ion frequency ", Omega_i));
  }
}

}  // namespace

LadderMode doppler_mode(double Omega, const DopplerSpec& dop) {
  if (!(dop.gamma_dop >= 0.0)) {
    fail(ErrorCode::invalid_argument, "Doppler damping must be non-negative");
  }
  LadderMode m;
  m.Omega = Omega;
  m.damping = dop.gamma_dop;
  m.feed_diag = 0.0;
  m.feed_offdiag = doppler_heating(dop, Omega);
  return m;
}

LadderMode particle_mode(double Omega, double gamma_p, double Gamma_gas,
                         double Gamma_total) {
  if (!(Omega > 0.0)) {
    fail(ErrorCode::invalid_argument, "mode frequency must be positive");
  }
  if (!(gamma_p >= 0.0) || !(Gamma_gas >= 0.0)) {
    fail(ErrorCode::invalid_argument, "rates must be non-negative");
  }
  if (Gamma_total < Gamma_gas) {
    fail(ErrorCode::invalid_argument,
         "total heating cannot be below the gas contribution");
  }
  LadderMode m;
  m.Omega = Omega;
  m.damping = gamma_p;
  m.feed_diag = Gamma_gas - Gamma_total;
  m.feed_offdiag = Gamma_total;
  return m;
}

Eigen::MatrixXcd drift_matrix(const LadderSystem& sys) {
  validate_system(sys);
  MatrixXcd A = damping_coupling_part(sys);
  const std::vector<double> osc = oscillator_diagonal(sys);
  for (std::size_t i = 0; i < osc.size(); ++i) A(i, i) += cplx(0.0, osc[i]);
  return A;
}

Eigen::MatrixXcd diffusion_matrix(const LadderSystem& sys) {
  validate_system(sys);
  const int m = static_cast<int>(sys.modes.size());
  MatrixXcd C = MatrixXcd::Zero(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    C(2 * k, 2 * k) = sys.modes[k].feed_diag;
    C(2 * k + 1, 2 * k + 1) = sys.modes[k].feed_diag;
    C(2 * k, 2 * k + 1) = sys.modes[k].feed_offdiag;
    C(2 * k + 1, 2 * k) = sys.modes[k].feed_offdiag;
  }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      const cplx ig(0.0, sys.g(a, b));
      C(2 * a, 2 * b) += -ig;
      C(2 * a + 1, 2 * b + 1) += ig;
    }
  }
  return C;
}

SteadyResult steady_state(const LadderSystem& sys) {
  validate_system(sys);
  const MatrixXcd Ad = damping_coupling_part(sys);
  const std::vector<double> osc = oscillator_diagonal(sys);
  MatrixXcd A = Ad;
  for (std::size_t i = 0; i < osc.size(); ++i) A(i, i) += cplx(0.0, osc[i]);
  const MatrixXcd C = diffusion_matrix(sys);

  Eigen::ComplexSchur<MatrixXcd> schur(A, true);
  if (schur.info() != Eigen::Success) {
    fail(ErrorCode::not_converged, "Schur decomposition of the drift failed");
  }
  const MatrixXcd& T = schur.matrixT();
  const MatrixXcd& U = schur.matrixU();

  double abscissa = T(0, 0).real();
  for (int i = 1; i < T.rows(); ++i) abscissa = std::max(abscissa, T(i, i).real());
  if (abscissa >= -1e-15 * A.norm()) {
    fail(ErrorCode::not_hurwitz,
         concat("drift spectral abscissa ", abscissa,
                " is not negative; no steady state"));
  }

  // The correction solves reuse the double Schur factors, but the iterate
  // accumulates in extended precision: at large occupation-to-diffusion
  // ratios a double iterate bottoms out well above the target residual.
  MatrixXl X = sylvester_solve(U, T, C).cast<cplxl>();
  const double cnorm = C.norm();
  MatrixXl best = X;
  long double best_res = -1.0L;
  long double prev = -1.0L;
  for (int pass = 0; pass < 8; ++pass) {
    const MatrixXl R = accurate_residual(osc, Ad, X, C);
    const long double res =
        cnorm > 0.0 ? R.norm() / static_cast<long double>(cnorm) : R.norm();
    if (best_res < 0.0L || res < best_res) {
      best_res = res;
      best = X;
    }
    if (res < 1e-13L) break;
    if (prev >= 0.0L && res > 0.9L * prev) break;  // stopped improving
    prev = res;
    X += sylvester_solve(U, T, to_double(R)).cast<cplxl>();
  }
  const MatrixXl Xs = ((best + best.transpose()) / 2.0L).eval();

  SteadyResult out;
  const MatrixXl R = accurate_residual(osc, Ad, Xs, C);
  out.residual = static_cast<double>(
      cnorm > 0.0 ? R.norm() / static_cast<long double>(cnorm) : R.norm());
  out.sigma = to_double(Xs);
  out.spectral_abscissa = abscissa;
  out.occupation.resize(sys.modes.size());
  for (std::size_t k = 0; k < sys.modes.size(); ++k) {
    const double n =
        static_cast<double>(Xs(2 * k, 2 * k + 1).real() - 0.5L);
    if (n < -1e-9) {
      fail(ErrorCode::non_physical_covariance,
           concat("mode ", k, " occupation ", n, " is negative"));
    }
    out.occupation[k] = std::max(n, 0.0);
  }
  return out;
}

double effective_temperature(double Omega, double occupation) {
  if (!(Omega > 0.0) || !(occupation >= 0.0)) {
    fail(ErrorCode::invalid_argument,
         "temperature needs a positive frequency and occupation");
  }
  return units::hbar * Omega * (occupation + 0.5) / units::k_B;
}

LadderSystem pair_system(const PairSettings& s) {
  if (!(s.gamma_dop >= 0.0) || !(s.Gamma_dop >= 0.0)) {
    fail(ErrorCode::invalid_argument, "ion rates must be non-negative");
  }
  LadderMode ion;
  ion.Omega = s.Omega_i;
  ion.damping = s.gamma_dop;
  ion.feed_diag = 0.0;
  ion.feed_offdiag = s.Gamma_dop;
  LadderSystem sys;
  sys.modes.push_back(ion);
  sys.modes.push_back(
      particle_mode(s.Omega_p, s.gamma_p, s.Gamma_gas, s.Gamma_p));
  sys.g = Eigen::MatrixXd::Zero(2, 2);
  sys.g(0, 1) = sys.g(1, 0) = s.g;
  return sys;
}

LadderSystem chain_system(const std::vector<Body>& bodies,
                          const Eigen::VectorXd& x, int partner, Axis axis,
                          const ParticleSpec& p, const GasSpec& gas,
                          const FeedbackSpec& fb, double edot_td,
                          const DopplerSpec& dop) {
  const int n = static_cast<int>(bodies.size());
  if (partner < 0 || partner >= n) {
    fail(ErrorCode::invalid_argument, concat("partner index ", partner,
                                             " out of range for ", n, " bodies"));
  }
  if (x.size() != 3 * n) {
    fail(ErrorCode::invalid_argument, "position vector size mismatch");
  }
  if (std::abs(bodies[partner].mass - p.mass) > 1e-9 * p.mass) {
    fail(ErrorCode::invalid_argument,
         "partner body mass disagrees with the particle spec");
  }

  const Eigen::MatrixXd H = stiffness_matrix(bodies, x);
  const int s = static_cast<int>(axis);

  std::vector<int> order;
  for (int k = 0; k < n; ++k) {
    if (k != partner) order.push_back(k);
  }
  order.push_back(partner);

  std::vector<double> W(n);
  for (int a = 0; a < n; ++a) {
    const int k = order[a];
    const double w2 = H(3 * k + s, 3 * k + s) / bodies[k].mass;
    if (!(w2 > 0.0)) {
      fail(ErrorCode::imaginary_frequency,
           concat("body ", k, " has non-positive curvature along ",
                  axis_name(axis)));
    }
    W[a] = std::sqrt(w2);
  }

  LadderSystem sys;
  sys.g = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double cross = H(3 * order[a] + s, 3 * order[b] + s);
      const double gab =
          cross / (2.0 * std::sqrt(bodies[order[a]].mass *
                                   bodies[order[b]].mass * W[a] * W[b]));
      sys.g(a, b) = sys.g(b, a) = gab;
    }
  }

  for (int a = 0; a < n - 1; ++a) {
    sys.modes.push_back(doppler_mode(W[a], dop));
  }
  const double Wp = W[n - 1];
  const double gamma_gas = gas_damping(p, gas);
  const double Gg = gas_heating(gamma_gas, gas, Wp);
  const double Gtd = displacement_heating(edot_td, Wp);
  const double Gba = backaction_heating(p, fb, Wp);
  sys.modes.push_back(particle_mode(Wp, gamma_gas + fb.gamma_fb, Gg,
                                    Gg + Gtd + Gba));
  return sys;
}

double plateau_occupation(double Omega_i, double Omega_p, double g,
                          double gamma_dop, double Gamma_p) {
  if (!(Omega_i > 0.0) || !(Omega_p > 0.0) || !(gamma_dop > 0.0) ||
      !(Gamma_p >= 0.0)) {
    fail(ErrorCode::invalid_argument, "plateau occupation needs positive "
                                      "frequencies and Doppler damping");
  }
  check_regime(Omega_i, g, gamma_dop);
  if (g == 0.0) {
    fail(ErrorCode::division_by_zero,
         "plateau occupation diverges at zero coupling");
  }
  const double detune = Omega_i * Omega_i - Omega_p * Omega_p;
  return Gamma_p * detune * detune / (4.0 * gamma_dop * g * g * Omega_i * Omega_p);
}

double sympathetic_rate(double Omega_i, double Omega_p, double g,
                        double gamma_dop) {
  if (!(Omega_i > 0.0) || !(Omega_p > 0.0) || !(gamma_dop >= 0.0)) {
    fail(ErrorCode::invalid_argument, "sympathetic rate needs positive "
                                      "frequencies");
  }
  check_regime(Omega_i, g, gamma_dop);
  if (Omega_p > 0.3 * Omega_i) {
    fail(ErrorCode::regime_violation,
         concat("particle frequency ", Omega_p,
                " is not far below the ion frequency ", Omega_i));
  }
  return gamma_dop * 4.0 * Omega_p * g * g / (Omega_i * Omega_i * Omega_i);
}

double chain_sympathetic_rate(double Omega_p, double gamma_dop,
                              const std::vector<double>& nu,
                              const std::vector<double>& g, bool odd_count,
                              double Omega_i_ref) {
  if (nu.empty() || nu.size() != g.size()) {
    fail(ErrorCode::invalid_argument, "mode frequency/coupling size mismatch");
  }
  if (!(Omega_p > 0.0) || !(gamma_dop >= 0.0) || !(Omega_i_ref > 0.0)) {
    fail(ErrorCode::invalid_argument, "chain rate needs positive frequencies");
  }
  for (std::size_t a = 1; a < nu.size(); ++a) {
    if (nu[a] < nu[a - 1]) {
      fail(ErrorCode::invalid_argument, "mode frequencies must be ascending");
    }
  }
  std::vector<std::size_t> included{0};
  if (odd_count && nu.size() >= 2) included.push_back(1);
  double gsq = 0.0;
  for (std::size_t a : included) {
    // The per-mode cooling rate is approximated by the bare Doppler rate,
    // which holds only for modes near the single-ion frequency.
    if (std::abs(nu[a] - Omega_i_ref) >
        0.3 * std::sqrt(nu[a] * Omega_i_ref)) {
      fail(ErrorCode::regime_violation,
           concat("mode at ", nu[a], " rad/s is too detuned from the ",
                  "single-ion reference ", Omega_i_ref));
    }
    check_regime(nu[0], g[a], gamma_dop);
    gsq += g[a] * g[a];
  }
  return gamma_dop * 4.0 * Omega_p * gsq / (nu[0] * nu[0] * nu[0]);
}

double closed_form_occupation(const PairSettings& s) {
  if (!(s.Omega_i > 0.0) || !(s.Omega_p > 0.0)) {
    fail(ErrorCode::invalid_argument, "closed form needs positive frequencies");
  }
  const double Om = s.Omega_p / s.Omega_i;
  const double gd = s.gamma_dop / s.Omega_i;
  const double gpt = s.gamma_p / s.Omega_i;
  const double gt = s.g / s.Omega_i;
  const double Gd = s.Gamma_dop / s.Omega_i;
  const double Gjp = s.Gamma_p / s.Omega_i;

  const double At = gd + 2.0 * Gd;
  const double k = gd * gd / 4.0 + 1.0;
  const double gplus = gpt + gd;
  const double gx = gpt * gd;
  const auto h = [&](double eta) { return gx + eta * gplus * gplus; };
  const double chi = gx * gx + 4.0 * gd * gd * Om * Om;

  const double n1 =
      (gx * gplus * h(3.0) + gd * gd * gd * (4.0 + gplus * gd * gd)) *
          (gx + 2.0 * gd * Gjp) -
      At * (gx * gx * h(2.0) + 8.0 * k * gd * gd * h(0.5)) * Om +
      4.0 * gd * (h(2.0) * h(2.0) - 6.0 * gd * Gjp * h(4.0 / 3.0)) * Om * Om -
      4.0 * At * gd * gd * h(2.0) * Om * Om * Om;
  const double n2 =
      std::pow(gplus * gplus + 4.0 * (1.0 + Om * Om), 2) - 64.0 * Om * Om;
  const double n3 =
      k * gx * gx * gplus * (4.0 + gplus * gplus) * At -
      8.0 * k * gx * gx * gplus * gd * Om -
      4.0 *
          (-4.0 * gx * gplus * h(-2.0) + gx * gx * gplus * h(2.0) +
           3.0 * gplus * std::pow(gd, 4) * h(1.0 / 3.0) + 16.0 * gd * gd * gd +
           8.0 * gplus * std::pow(gd, 4)) *
          Gjp * Om +
      8.0 * k * gplus * At * (2.0 * k * gd * gd + gx * h(1.0)) * Om * Om -
      8.0 * gd *
          (4.0 * k * gplus * gd * gd +
           2.0 * (-4.0 * h(3.0) + 2.0 * gx * h(1.5) + std::pow(gd, 4)) * Gjp) *
          Om * Om * Om +
      16.0 * k * gplus * At * gd * gd * std::pow(Om, 4) -
      64.0 * gd * gd * gd * Gjp * std::pow(Om, 5);

  const double num =
      32.0 * std::pow(gt, 4) * n1 - k * chi * gd * Gjp * n2 +
      4.0 * gt * gt * gd * n3;
  const double den = gd * (4.0 * k * chi - 64.0 * gd * gd * gt * gt * Om) *
                     (64.0 * gplus * gplus * gt * gt * Om + gx * n2);
  if (den == 0.0 || !std::isfinite(den) || !std::isfinite(num)) {
    fail(ErrorCode::division_by_zero,
         "closed-form occupation has a degenerate denominator");
  }
  return num / den;
}

}  // namespace cotrap
