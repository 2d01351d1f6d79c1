#include "equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "rng.hpp"
#include "units.hpp"

namespace cotrap {

namespace {

int body_count(const std::vector<Body>& bodies, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(bodies.size());
  if (n < 2)
    fail(ErrorCode::invalid_argument, "need at least two bodies");
  if (x.size() != 3 * n)
    fail(ErrorCode::invalid_argument,
         concat("position vector has ", x.size(), " entries, expected ",
                3 * n));
  return n;
}

void check_bodies(const std::vector<Body>& bodies) {
  for (const Body& b : bodies) {
    if (!(b.mass > 0.0))
      fail(ErrorCode::non_positive_mass, "body mass must be positive");
    if (b.charge == 0.0)
      fail(ErrorCode::zero_charge, "body charge must be nonzero");
  }
}

}  // namespace

double potential_energy(const std::vector<Body>& bodies,
                        const Eigen::VectorXd& x) {
  const int n = body_count(bodies, x);
  double e = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto r = x.segment<3>(3 * k);
    for (int s = 0; s < 3; ++s)
      e += 0.5 * bodies[k].mass * bodies[k].Omega[s] * bodies[k].Omega[s] *
           r[s] * r[s];
  }
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const double r = (x.segment<3>(3 * k) - x.segment<3>(3 * l)).norm();
      if (r == 0.0)
        fail(ErrorCode::coincident_particles,
             concat("bodies ", k, " and ", l, " coincide"));
      e += units::k_e * bodies[k].charge * bodies[l].charge / r;
    }
  return e;
}

Eigen::VectorXd potential_gradient(const std::vector<Body>& bodies,
                                   const Eigen::VectorXd& x) {
  const int n = body_count(bodies, x);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(3 * n);
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < 3; ++s)
      g[3 * k + s] = bodies[k].mass * bodies[k].Omega[s] *
                     bodies[k].Omega[s] * x[3 * k + s];
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const Eigen::Vector3d u = x.segment<3>(3 * k) - x.segment<3>(3 * l);
      const double r = u.norm();
      if (r == 0.0)
        fail(ErrorCode::coincident_particles,
             concat("bodies ", k, " and ", l, " coincide"));
      const Eigen::Vector3d f =
          units::k_e * bodies[k].charge * bodies[l].charge * u / (r * r * r);
      g.segment<3>(3 * k) -= f;
      g.segment<3>(3 * l) += f;
    }
  return g;
}

Eigen::MatrixXd stiffness_matrix(const std::vector<Body>& bodies,
                                 const Eigen::VectorXd& x) {
  const int n = body_count(bodies, x);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < 3; ++s)
      h(3 * k + s, 3 * k + s) =
          bodies[k].mass * bodies[k].Omega[s] * bodies[k].Omega[s];
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const Eigen::Vector3d u = x.segment<3>(3 * k) - x.segment<3>(3 * l);
      const double r = u.norm();
      if (r == 0.0)
        fail(ErrorCode::coincident_particles,
             concat("bodies ", k, " and ", l, " coincide"));
      const Eigen::Vector3d nu = u / r;
      // Curvature of ke q q' / r: (3 n n^T - I) scaled by ke q q' / r^3
      // on the diagonal blocks, negated on the cross blocks.
      const Eigen::Matrix3d cpl =
          units::k_e * bodies[k].charge * bodies[l].charge / (r * r * r) *
          (3.0 * nu * nu.transpose() - Eigen::Matrix3d::Identity());
      h.block<3, 3>(3 * k, 3 * k) += cpl;
      h.block<3, 3>(3 * l, 3 * l) += cpl;
      h.block<3, 3>(3 * k, 3 * l) -= cpl;
      h.block<3, 3>(3 * l, 3 * k) -= cpl;
    }
  return h;
}

TwoBodyEquilibrium two_body_equilibrium(const Body& ion, const Body& partner,
                                        Axis axis) {
  check_bodies({ion, partner});
  if (ion.charge * partner.charge <= 0.0)
    fail(ErrorCode::invalid_argument,
         "two-body closed form assumes like charges");
  const int s = static_cast<int>(axis);
  const double ki = ion.mass * ion.Omega[s] * ion.Omega[s];
  const double kp = partner.mass * partner.Omega[s] * partner.Omega[s];
  if (!(ki > 0.0) || !(kp > 0.0))
    fail(ErrorCode::imaginary_frequency,
         concat("axis ", axis_name(axis), " is not confining"));
  const double compliance = 1.0 / ki + 1.0 / kp;
  TwoBodyEquilibrium eq;
  eq.axis = axis;
  eq.separation = std::cbrt(units::k_e * ion.charge * partner.charge *
                            compliance);
  const double force = units::k_e * ion.charge * partner.charge /
                       (eq.separation * eq.separation);
  eq.d_ion = force / ki;
  eq.d_partner = -force / kp;
  return eq;
}

Eigen::VectorXd exchange_axes(const Eigen::VectorXd& x, Axis from, Axis to) {
  if (x.size() % 3 != 0)
    fail(ErrorCode::invalid_argument, "position vector size must be 3N");
  Eigen::VectorXd y = x;
  const int a = static_cast<int>(from), b = static_cast<int>(to);
  for (int k = 0; 3 * k < x.size(); ++k)
    std::swap(y[3 * k + a], y[3 * k + b]);
  return y;
}

namespace {

// Canonical ordering for deduplication: identical bodies (same mass and
// charge) are interchangeable, so sort the positions within each group of
// identical bodies by (z, x, y) while every body keeps its own slot class.
Eigen::VectorXd canonical_order(const std::vector<Body>& bodies,
                                const Eigen::VectorXd& x) {
  const int n = static_cast<int>(bodies.size());
  Eigen::VectorXd y = x;
  std::vector<bool> done(n, false);
  for (int k = 0; k < n; ++k) {
    if (done[k]) continue;
    std::vector<int> group;
    for (int l = k; l < n; ++l)
      if (!done[l] && bodies[l].mass == bodies[k].mass &&
          bodies[l].charge == bodies[k].charge) {
        group.push_back(l);
        done[l] = true;
      }
    std::vector<Eigen::Vector3d> pos;
    pos.reserve(group.size());
    for (int l : group) pos.push_back(x.segment<3>(3 * l));
    std::sort(pos.begin(), pos.end(),
              [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
                if (a[2] != b[2]) return a[2] < b[2];
                if (a[0] != b[0]) return a[0] < b[0];
                return a[1] < b[1];
              });
    for (std::size_t i = 0; i < group.size(); ++i)
      y.segment<3>(3 * group[i]) = pos[i];
  }
  return y;
}

double min_pair_separation(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size() / 3);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      best = std::min(best,
                      (x.segment<3>(3 * k) - x.segment<3>(3 * l)).norm());
  return best;
}

// Newton iteration on the force residual, with step backtracking and an
// optional restriction to the z axis (transverse coordinates pinned at
// zero, which is consistent because the z-aligned subspace is invariant).
bool newton_solve(const std::vector<Body>& bodies, bool axis_restricted,
                  double tol, int max_iters, Eigen::VectorXd& x) {
  const int n = static_cast<int>(bodies.size());
  auto gather = [&](const Eigen::VectorXd& full) {
    if (!axis_restricted) return full;
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v[k] = full[3 * k + 2];
    return v;
  };
  auto scatter = [&](const Eigen::VectorXd& v) {
    if (!axis_restricted) return v;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(3 * n);
    for (int k = 0; k < n; ++k) full[3 * k + 2] = v[k];
    return full;
  };
  auto reduce_matrix = [&](const Eigen::MatrixXd& h) {
    if (!axis_restricted) return h;
    Eigen::MatrixXd m(n, n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) m(k, l) = h(3 * k + 2, 3 * l + 2);
    return m;
  };

  Eigen::VectorXd v = gather(x);
  double gnorm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd full = scatter(v);
    if (min_pair_separation(full) < 1e-12) return false;
    Eigen::VectorXd g = gather(potential_gradient(bodies, full));
    gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm < tol) break;
    Eigen::MatrixXd h = reduce_matrix(stiffness_matrix(bodies, full));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd step = lu.solve(g);
    // Backtrack until the residual shrinks; Newton converges to saddle
    // points as readily as to minima, which is intended here.
    double lambda = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      const Eigen::VectorXd trial = v - lambda * step;
      const Eigen::VectorXd ft = scatter(trial);
      if (min_pair_separation(ft) > 1e-12) {
        const double gn =
            gather(potential_gradient(bodies, ft)).lpNorm<Eigen::Infinity>();
        if (gn < gnorm) {
          v = trial;
          moved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!moved) return false;
  }
  x = scatter(v);
  return gnorm < tol ||
         gather(potential_gradient(bodies, x)).lpNorm<Eigen::Infinity>() < tol;
}

}  // namespace

std::vector<EquilibriumSolution> find_equilibria(
    const std::vector<Body>& bodies, const EquilibriumOptions& opts,
    const std::function<bool(const Eigen::VectorXd&)>& drive_filter) {
  check_bodies(bodies);
  const int n = static_cast<int>(bodies.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "need at least two bodies");

  const bool axis_restricted = opts.axis_restricted || n - 1 > 8;
  int restarts = opts.restarts;
  if (restarts <= 0) {
    if (axis_restricted) {
      restarts = 10000 * (n - 1);
    } else {
      double fact = 1.0;
      for (int k = 2; k < n; ++k) fact *= k;  // (N)! with N = n - 1 ions
      restarts = 5000 + static_cast<int>(std::min(fact, 1.0e6));
    }
  }

  // Characteristic length from the strongest pairwise repulsion against the
  // softest confinement, used to scale the random starting boxes.
  double kmin = std::numeric_limits<double>::infinity();
  double qq = 0.0;
  for (const Body& b : bodies)
    for (int s = 0; s < 3; ++s)
      if (b.Omega[s] > 0.0)
        kmin = std::min(kmin, b.mass * b.Omega[s] * b.Omega[s]);
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      qq = std::max(qq, bodies[k].charge * bodies[l].charge);
  if (!(kmin > 0.0) || !(qq > 0.0))
    fail(ErrorCode::invalid_argument,
         "bodies must be confined and like-charged for the search");
  const double scale =
      std::cbrt(units::k_e * qq / kmin) * std::cbrt(static_cast<double>(n));

  struct Candidate {
    Eigen::VectorXd x;
    double residual;
    int hits;
  };
  std::vector<Candidate> found;
  long converged = 0;

  for (int rs = 0; rs < restarts; ++rs) {
    Rng rng = Rng::substream(opts.seed, static_cast<std::uint64_t>(rs));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3 * n);
    for (int k = 0; k < n; ++k) {
      if (axis_restricted) {
        x[3 * k + 2] = rng.uniform(-2.0 * scale, 2.0 * scale);
      } else {
        x[3 * k + 0] = rng.uniform(-0.5 * scale, 0.5 * scale);
        x[3 * k + 1] = rng.uniform(-0.5 * scale, 0.5 * scale);
        x[3 * k + 2] = rng.uniform(-2.0 * scale, 2.0 * scale);
      }
    }
    if (!newton_solve(bodies, axis_restricted, opts.converge_tol,
                      opts.max_newton_iters, x))
      continue;
    const double resid =
        potential_gradient(bodies, x).lpNorm<Eigen::Infinity>();
    if (!(resid < opts.report_tol)) continue;
    ++converged;
    const Eigen::VectorXd canon = canonical_order(bodies, x);
    bool merged = false;
    for (Candidate& c : found) {
      if ((c.x - canon).lpNorm<Eigen::Infinity>() < opts.dedup_tol) {
        ++c.hits;
        if (resid < c.residual) {
          c.x = canon;
          c.residual = resid;
        }
        merged = true;
        break;
      }
    }
    if (!merged) found.push_back({canon, resid, 1});
  }

  std::vector<EquilibriumSolution> out;
  for (const Candidate& c : found) {
    if (c.hits <
        std::max(1.0, opts.rare_fraction * static_cast<double>(converged)))
      continue;
    EquilibriumSolution sol;
    sol.positions = c.x;
    sol.residual = c.residual;
    sol.energy = potential_energy(bodies, c.x);
    sol.hits = c.hits;
    sol.min_separation = min_pair_separation(c.x);
    const Eigen::MatrixXd h = stiffness_matrix(bodies, c.x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    // Positive definiteness judged relative to the largest curvature so
    // the criterion is scale-free.
    const double floor = 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff();
    sol.statically_stable = es.eigenvalues().minCoeff() > floor;
    sol.drive_stable = sol.statically_stable &&
                       (drive_filter ? drive_filter(c.x) : true);
    out.push_back(std::move(sol));
  }
  // Deterministic presentation: statically stable solutions first, then by
  // descending hit count, then by canonical coordinates.
  std::sort(out.begin(), out.end(),
            [](const EquilibriumSolution& a, const EquilibriumSolution& b) {
              if (a.statically_stable != b.statically_stable)
                return a.statically_stable;
              if (a.hits != b.hits) return a.hits > b.hits;
              return std::lexicographical_compare(
                  a.positions.data(), a.positions.data() + a.positions.size(),
                  b.positions.data(),
                  b.positions.data() + b.positions.size());
            });
  return out;
}

}  // namespace cotrap
