// Linearization around an equilibrium: local curvature (renormalized)
// frequencies, zero-point amplitudes, pairwise and mode-resolved Coulomb
// coupling rates, and normal modes of the ion sector.
#pragma once

#include <Eigen/Dense>

#include "equilibrium.hpp"

namespace cotrap {

// sqrt(hbar / (2 m omega)), the ground-state position spread.
double zpf_amplitude(double mass, double omega);

// Per-axis local curvature frequencies of body k: the diagonal of its
// stiffness block divided by its mass, including every Coulomb curvature
// contribution from the other bodies. Throws if a curvature is negative.
std::array<double, 3> renormalized_frequencies(const std::vector<Body>& bodies,
                                               const Eigen::VectorXd& x,
                                               int k);

// Quantum coupling rates (rad/s) between bodies i and j for each axis:
// the Coulomb coupler diagonal scaled by both zero-point amplitudes over
// hbar. Transverse entries are positive, the axial one negative for a
// z-aligned pair.
std::array<double, 3> pair_coupling(const std::vector<Body>& bodies,
                                    const Eigen::VectorXd& x, int i, int j);

// True when every normal-mode frequency about x is real: the mass-weighted
// stiffness matrix is positive definite (scale-free eigenvalue floor).
bool dynamically_stable(const std::vector<Body>& bodies,
                        const Eigen::VectorXd& x);

// All 3N normal modes: frequencies ascending with mass-weighted mode
// vectors in the columns of S.
struct NormalModes {
  Eigen::VectorXd nu;  // rad/s
  Eigen::MatrixXd S;   // orthonormal, 3N x 3N
};

NormalModes normal_modes(const std::vector<Body>& bodies,
                         const Eigen::VectorXd& x);

// Single-axis normal modes of every body except the partner, plus the
// coupling of each mode to the partner's motion along that axis. The
// partner's Coulomb curvature stays in the ion diagonals (its position is
// part of the equilibrium), so the N = 1 mode coupling reproduces the
// pairwise rate exactly.
struct ChainModes {
  Eigen::VectorXd nu;     // ascending, rad/s
  Eigen::MatrixXd S;      // orthonormal ion-sector mode vectors
  Eigen::VectorXd g;      // rad/s, per mode, signed
  double partner_Omega = 0.0;  // renormalized partner frequency, this axis
};

ChainModes chain_modes(const std::vector<Body>& bodies,
                       const Eigen::VectorXd& x, int partner, Axis axis);

}  // namespace cotrap
