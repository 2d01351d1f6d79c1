// Static equilibrium of charged bodies in axis-aligned harmonic wells with
// pairwise Coulomb repulsion: energies, forces, stiffness matrices, the
// two-body closed form, and a multistart Newton search over N-body
// configurations with stability classification.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "trap.hpp"

namespace cotrap {

// One body in the static problem. Omega holds the per-axis secular
// frequencies (rad/s) of its effective harmonic well.
struct Body {
  double mass = 0.0;            // kg
  double charge = 0.0;          // C
  std::array<double, 3> Omega{};  // rad/s
};

// Positions are stacked body-major: coordinate sigma of body k lives at
// index 3 k + sigma.
double potential_energy(const std::vector<Body>& bodies,
                        const Eigen::VectorXd& x);

// Gradient of the potential energy (the negative of the total force).
Eigen::VectorXd potential_gradient(const std::vector<Body>& bodies,
                                   const Eigen::VectorXd& x);

// Hessian of the potential energy about x: harmonic diagonal blocks plus
// the Coulomb curvature (I - 3 n n^T) couplers.
Eigen::MatrixXd stiffness_matrix(const std::vector<Body>& bodies,
                                 const Eigen::VectorXd& x);

// Closed-form equilibrium of one ion and one heavier partner aligned with
// the given axis: separation D^3 = ke Qi Qp (1/(Mp Wp^2) + 1/(Mi Wi^2))
// and the individual displacements from the trap center along that axis.
struct TwoBodyEquilibrium {
  double separation = 0.0;  // m
  double d_ion = 0.0;       // signed displacement of the ion
  double d_partner = 0.0;   // signed displacement of the partner
  Axis axis = Axis::z;
};

TwoBodyEquilibrium two_body_equilibrium(const Body& ion, const Body& partner,
                                        Axis axis = Axis::z);

struct EquilibriumOptions {
  int restarts = 0;             // 0 picks the N-dependent default
  std::uint64_t seed = 1;
  double converge_tol = 1e-26;  // N, infinity norm of the residual force
  double report_tol = 1e-24;    // N, solutions above this are dropped
  double dedup_tol = 1e-9;      // m, coordinate-wise match threshold
  double rare_fraction = 1e-4;  // drop solutions hit less often than this
  int max_newton_iters = 120;
  bool axis_restricted = false;  // search along z only (forced for N > 8)
};

struct EquilibriumSolution {
  Eigen::VectorXd positions;      // canonical order, ions sorted by z
  double residual = 0.0;          // N, infinity norm of the force
  double energy = 0.0;            // J, for ground-configuration selection
  int hits = 0;                   // restarts that converged here
  bool statically_stable = false; // stiffness matrix positive definite
  bool drive_stable = false;      // passed the caller's time-dependent filter
  double min_separation = 0.0;    // m, over all pairs
};

// Enumerate force-free configurations of the given bodies by damped Newton
// iteration from randomized starts, deduplicate, and classify stability.
// The optional filter receives each statically stable configuration and
// judges it under the full time-dependent drive; without one, drive_stable
// mirrors statically_stable.
std::vector<EquilibriumSolution> find_equilibria(
    const std::vector<Body>& bodies, const EquilibriumOptions& opts,
    const std::function<bool(const Eigen::VectorXd&)>& drive_filter = {});

// Remap an axis-aligned configuration onto another axis by exchanging
// coordinate indices (used for on-request transverse layouts).
Eigen::VectorXd exchange_axes(const Eigen::VectorXd& x, Axis from, Axis to);

}  // namespace cotrap
