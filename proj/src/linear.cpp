#include "linear.hpp"

#include <cmath>

#include "errors.hpp"
#include "units.hpp"

namespace cotrap {

double zpf_amplitude(double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0))
    fail(ErrorCode::invalid_argument,
         "zero-point amplitude needs positive mass and frequency");
  return std::sqrt(units::hbar / (2.0 * mass * omega));
}

namespace {

// Coulomb curvature block between bodies i and j: ke Qi Qj (I-3nn^T)/r^3.
// Its negative appears on the stiffness diagonal, itself on the coupler.
Eigen::Matrix3d coupler_block(const std::vector<Body>& bodies,
                              const Eigen::VectorXd& x, int i, int j) {
  const Eigen::Vector3d u = x.segment<3>(3 * i) - x.segment<3>(3 * j);
  const double r = u.norm();
  if (r == 0.0)
    fail(ErrorCode::coincident_particles,
         concat("bodies ", i, " and ", j, " coincide"));
  const Eigen::Vector3d nu = u / r;
  return units::k_e * bodies[i].charge * bodies[j].charge / (r * r * r) *
         (Eigen::Matrix3d::Identity() - 3.0 * nu * nu.transpose());
}

}  // namespace

std::array<double, 3> renormalized_frequencies(const std::vector<Body>& bodies,
                                               const Eigen::VectorXd& x,
                                               int k) {
  const int n = static_cast<int>(bodies.size());
  if (k < 0 || k >= n)
    fail(ErrorCode::invalid_argument, concat("body index ", k, " out of range"));
  const Eigen::MatrixXd h = stiffness_matrix(bodies, x);
  std::array<double, 3> out{};
  for (int s = 0; s < 3; ++s) {
    const double w2 = h(3 * k + s, 3 * k + s) / bodies[k].mass;
    if (!(w2 > 0.0))
      fail(ErrorCode::imaginary_frequency,
           concat("body ", k, " axis ", axis_name(static_cast<Axis>(s)),
                  " has non-positive local curvature"));
    out[static_cast<std::size_t>(s)] = std::sqrt(w2);
  }
  return out;
}

std::array<double, 3> pair_coupling(const std::vector<Body>& bodies,
                                    const Eigen::VectorXd& x, int i, int j) {
  if (i == j) fail(ErrorCode::invalid_argument, "need two distinct bodies");
  const auto wi = renormalized_frequencies(bodies, x, i);
  const auto wj = renormalized_frequencies(bodies, x, j);
  const Eigen::Matrix3d cpl = coupler_block(bodies, x, i, j);
  std::array<double, 3> g{};
  for (int s = 0; s < 3; ++s) {
    const double ri = zpf_amplitude(bodies[i].mass, wi[s]);
    const double rj = zpf_amplitude(bodies[j].mass, wj[s]);
    g[static_cast<std::size_t>(s)] = cpl(s, s) * ri * rj / units::hbar;
  }
  return g;
}

bool dynamically_stable(const std::vector<Body>& bodies,
                        const Eigen::VectorXd& x) {
  const int n = static_cast<int>(bodies.size());
  Eigen::MatrixXd k = stiffness_matrix(bodies, x);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      k.block<3, 3>(3 * a, 3 * b) /=
          std::sqrt(bodies[a].mass * bodies[b].mass);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const double floor = 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff();
  return es.eigenvalues().minCoeff() > floor;
}

NormalModes normal_modes(const std::vector<Body>& bodies,
                         const Eigen::VectorXd& x) {
  const int n = static_cast<int>(bodies.size());
  Eigen::MatrixXd k = stiffness_matrix(bodies, x);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      k.block<3, 3>(3 * a, 3 * b) /=
          std::sqrt(bodies[a].mass * bodies[b].mass);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  NormalModes m;
  m.S = es.eigenvectors();
  m.nu.resize(3 * n);
  for (int a = 0; a < 3 * n; ++a) {
    if (!(es.eigenvalues()[a] > 0.0))
      fail(ErrorCode::imaginary_frequency,
           concat("normal mode ", a, " has non-positive stiffness ",
                  es.eigenvalues()[a]));
    m.nu[a] = std::sqrt(es.eigenvalues()[a]);
  }
  return m;
}

ChainModes chain_modes(const std::vector<Body>& bodies,
                       const Eigen::VectorXd& x, int partner, Axis axis) {
  const int n = static_cast<int>(bodies.size());
  if (partner < 0 || partner >= n)
    fail(ErrorCode::invalid_argument, "partner index out of range");
  if (n < 2) fail(ErrorCode::invalid_argument, "need at least one chain body");
  const int s = static_cast<int>(axis);
  const Eigen::MatrixXd h = stiffness_matrix(bodies, x);

  // Ion-sector single-axis stiffness, mass-weighted, partner row removed.
  const int m = n - 1;
  std::vector<int> ions;
  ions.reserve(m);
  for (int k = 0; k < n; ++k)
    if (k != partner) ions.push_back(k);
  Eigen::MatrixXd sec(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      sec(a, b) = h(3 * ions[a] + s, 3 * ions[b] + s) /
                  std::sqrt(bodies[ions[a]].mass * bodies[ions[b]].mass);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sec);

  ChainModes cm;
  const double pw2 = h(3 * partner + s, 3 * partner + s) /
                     bodies[partner].mass;
  if (!(pw2 > 0.0))
    fail(ErrorCode::imaginary_frequency,
         "partner axis has non-positive local curvature");
  cm.partner_Omega = std::sqrt(pw2);
  cm.S = es.eigenvectors();
  cm.nu.resize(m);
  cm.g.resize(m);
  const double rp = zpf_amplitude(bodies[partner].mass, cm.partner_Omega);
  for (int a = 0; a < m; ++a) {
    if (!(es.eigenvalues()[a] > 0.0))
      fail(ErrorCode::imaginary_frequency,
           concat("chain mode ", a, " has non-positive stiffness"));
    cm.nu[a] = std::sqrt(es.eigenvalues()[a]);
    double g = 0.0;
    for (int b = 0; b < m; ++b) {
      const Eigen::Matrix3d cpl = coupler_block(bodies, x, ions[b], partner);
      const double rb = zpf_amplitude(bodies[ions[b]].mass, cm.nu[a]);
      g += cm.S(b, a) * cpl(s, s) * rb * rp / units::hbar;
    }
    cm.g[a] = g;
  }
  return cm;
}

}  // namespace cotrap
