#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "equilibrium.hpp"
#include "errors.hpp"
#include "table.hpp"
#include "trap.hpp"

using namespace cotrap;
using cotrap::testing::table_ion;
using cotrap::testing::table_particle;
using cotrap::testing::table_trap;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

// Bodies built from the reference trap: bare secular frequencies feed the
// static problem, Coulomb renormalization emerges from the solution.
Body reference_body(const ParticleSpec& p) {
  const TrapConfig t = table_trap();
  Body b;
  b.mass = p.mass;
  b.charge = p.charge;
  for (Axis ax : kAxes)
    b.Omega[static_cast<std::size_t>(static_cast<int>(ax))] =
        secular_mode(mathieu_params(t, p, ax)).Omega;
  return b;
}

std::vector<Body> reference_bodies(int n_ions) {
  std::vector<Body> bodies;
  bodies.push_back(reference_body(table_particle()));
  const Body ion = reference_body(table_ion());
  for (int k = 0; k < n_ions; ++k) bodies.push_back(ion);
  return bodies;
}

}  // namespace

TEST_CASE("two-body closed form at the reference point") {
  const auto bodies = reference_bodies(1);
  const TwoBodyEquilibrium eq =
      two_body_equilibrium(bodies[1], bodies[0], Axis::z);
  // Frozen against an independent root-finder solution of the force
  // balance equations.
  CHECK(rel_err(eq.separation, 5.2580217060e-5) < 1e-9);
  CHECK(rel_err(eq.d_ion, 5.2510203455e-5) < 1e-9);
  CHECK(eq.d_partner == doctest::Approx(-7.0013604607e-8).epsilon(1e-9));
  CHECK(eq.d_ion - eq.d_partner == doctest::Approx(eq.separation));
}

TEST_CASE("gradient is the analytic derivative of the energy") {
  const auto bodies = reference_bodies(2);
  Eigen::VectorXd x(9);
  x << 1.1e-6, -0.8e-6, 5.1e-5, -0.4e-6, 0.9e-6, -4.8e-5, 0.2e-6, -0.1e-6,
      0.7e-6;
  const Eigen::VectorXd g = potential_gradient(bodies, x);
  for (int i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(std::abs(x[i]), 1e-6);
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd =
        (potential_energy(bodies, xp) - potential_energy(bodies, xm)) /
        (2.0 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("stiffness matrix is the analytic derivative of the gradient") {
  const auto bodies = reference_bodies(2);
  Eigen::VectorXd x(9);
  x << 0.3e-6, -0.2e-6, 5.3e-5, 0.1e-6, 0.4e-6, -5.0e-5, -0.2e-6, 0.1e-6,
      0.4e-6;
  const Eigen::MatrixXd h = stiffness_matrix(bodies, x);
  CHECK((h - h.transpose()).lpNorm<Eigen::Infinity>() <
        1e-12 * h.lpNorm<Eigen::Infinity>());
  for (int i = 0; i < x.size(); ++i) {
    const double step = 1e-6 * std::max(std::abs(x[i]), 1e-6);
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    const Eigen::VectorXd col = (potential_gradient(bodies, xp) -
                                 potential_gradient(bodies, xm)) /
                                (2.0 * step);
    for (int j = 0; j < x.size(); ++j)
      CHECK(h(j, i) == doctest::Approx(col[j]).epsilon(1e-5));
  }
}

TEST_CASE("single-ion search recovers the closed form and its mirror") {
  const auto bodies = reference_bodies(1);
  EquilibriumOptions opts;
  opts.seed = 11;
  opts.restarts = 400;
  const auto sols = find_equilibria(bodies, opts);
  // Six critical points: the stable axial mirror pair plus a saddle pair
  // on each transverse axis (the ion's axial well cannot survive the
  // Coulomb curvature at the much smaller transverse separations).
  REQUIRE(sols.size() == 6);
  std::vector<const EquilibriumSolution*> stable;
  for (const auto& s : sols) {
    CHECK(s.residual < 1e-24);
    if (s.statically_stable) stable.push_back(&s);
  }
  REQUIRE(stable.size() == 2);
  for (const auto* s : stable) {
    CHECK(std::abs(s->positions[2]) ==
          doctest::Approx(7.0013604607e-8).epsilon(1e-8));
    CHECK(std::abs(s->positions[5]) ==
          doctest::Approx(5.2510203455e-5).epsilon(1e-8));
    // Transverse coordinates collapse to the axis.
    CHECK(std::abs(s->positions[0]) < 1e-12);
    CHECK(std::abs(s->positions[3]) < 1e-12);
    // Well separated compared to the nanoparticle radius.
    CHECK(s->min_separation > 10.0 * table_particle().radius);
  }
  // The two stable solutions are mirror images.
  CHECK(stable[0]->positions[5] == doctest::Approx(-stable[1]->positions[5]));
}

TEST_CASE("two-ion search finds the balanced and one-sided families") {
  const auto bodies = reference_bodies(2);
  EquilibriumOptions opts;
  opts.seed = 3;
  opts.restarts = 600;
  const auto all = find_equilibria(bodies, opts);
  std::vector<EquilibriumSolution> sols;
  for (const auto& s : all)
    if (s.statically_stable) sols.push_back(s);
  REQUIRE(sols.size() == 3);
  for (const auto& s : sols) CHECK(s.residual < 1e-24);
  // Ground configuration: one ion on each side, particle centered.
  const auto ground = std::min_element(
      sols.begin(), sols.end(),
      [](const auto& a, const auto& b) { return a.energy < b.energy; });
  CHECK(std::abs(ground->positions[2]) < 1e-12);
  CHECK(std::abs(ground->positions[5]) ==
        doctest::Approx(5.256270782858e-5).epsilon(1e-8));
  CHECK(std::abs(ground->positions[8]) ==
        doctest::Approx(5.256270782858e-5).epsilon(1e-8));
  // The one-sided family sits higher in energy at frozen coordinates.
  int onesided = 0;
  for (const auto& s : sols) {
    std::array<double, 2> zi{s.positions[5], s.positions[8]};
    if (zi[0] * zi[1] > 0.0) {
      ++onesided;
      std::sort(zi.begin(), zi.end(),
                [](double a, double b) { return std::abs(a) < std::abs(b); });
      CHECK(std::abs(zi[0]) ==
            doctest::Approx(5.005511998277e-5).epsilon(1e-8));
      CHECK(std::abs(zi[1]) ==
            doctest::Approx(5.511403207253e-5).epsilon(1e-8));
      CHECK(s.energy > ground->energy);
    }
  }
  CHECK(onesided == 2);
}

TEST_CASE("three-ion ground configuration splits two and one") {
  const auto bodies = reference_bodies(3);
  EquilibriumOptions opts;
  opts.seed = 9;
  opts.restarts = 800;
  const auto all = find_equilibria(bodies, opts);
  std::vector<EquilibriumSolution> sols;
  for (const auto& s : all)
    if (s.statically_stable) sols.push_back(s);
  REQUIRE(sols.size() == 4);
  const auto ground = std::min_element(
      sols.begin(), sols.end(),
      [](const auto& a, const auto& b) { return a.energy < b.energy; });
  // Canonical order sorts the ions by z; the lone ion sits opposite the
  // pair and the particle shifts slightly toward the lone side.
  std::array<double, 3> zi{ground->positions[5], ground->positions[8],
                           ground->positions[11]};
  std::sort(zi.begin(), zi.end());
  const double zp = ground->positions[2];
  if (zp > 0.0) {
    // Mirror image of the frozen orientation.
    std::transform(zi.begin(), zi.end(), zi.begin(),
                   [](double v) { return -v; });
    std::sort(zi.begin(), zi.end());
  }
  CHECK(zi[0] == doctest::Approx(-5.261534801318e-5).epsilon(1e-8));
  CHECK(zi[1] == doctest::Approx(5.010827614871e-5).epsilon(1e-8));
  CHECK(zi[2] == doctest::Approx(5.516588169056e-5).epsilon(1e-8));
  CHECK(std::abs(zp) == doctest::Approx(7.021174643498e-8).epsilon(1e-7));
}

TEST_CASE("axis-restricted search matches the free search on chains") {
  const auto bodies = reference_bodies(2);
  EquilibriumOptions free_opts;
  free_opts.seed = 21;
  free_opts.restarts = 500;
  EquilibriumOptions axis_opts = free_opts;
  axis_opts.axis_restricted = true;
  const auto free_sols = find_equilibria(bodies, free_opts);
  const auto axis_sols = find_equilibria(bodies, axis_opts);
  // The restricted search sees exactly the chain families; each must also
  // appear among the free-search critical points.
  REQUIRE(axis_sols.size() == 3);
  for (const auto& as : axis_sols) {
    CHECK(as.statically_stable);
    double best = 1.0;
    for (const auto& fs : free_sols)
      best = std::min(best,
                      (fs.positions - as.positions).lpNorm<Eigen::Infinity>());
    CHECK(best < 1e-9);
  }
}

TEST_CASE("searches are reproducible for a fixed seed") {
  const auto bodies = reference_bodies(2);
  EquilibriumOptions opts;
  opts.seed = 77;
  opts.restarts = 300;
  const auto a = find_equilibria(bodies, opts);
  const auto b = find_equilibria(bodies, opts);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i].positions - b[i].positions).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(a[i].hits == b[i].hits);
  }
}

TEST_CASE("drive filter demotes configurations without blocking them") {
  const auto bodies = reference_bodies(1);
  EquilibriumOptions opts;
  opts.seed = 11;
  opts.restarts = 200;
  int calls = 0;
  const auto sols =
      find_equilibria(bodies, opts, [&calls](const Eigen::VectorXd&) {
        ++calls;
        return false;
      });
  // The filter runs only on statically stable candidates (the axial
  // mirror pair) and demotes them without removing them from the list.
  CHECK(calls == 2);
  int stable = 0;
  for (const auto& s : sols) {
    if (s.statically_stable) ++stable;
    CHECK_FALSE(s.drive_stable);
  }
  CHECK(stable == 2);
}

TEST_CASE("axis exchange swaps coordinates in place") {
  Eigen::VectorXd x(6);
  x << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  const Eigen::VectorXd y = exchange_axes(x, Axis::z, Axis::x);
  CHECK(y[0] == 3.0);
  CHECK(y[2] == 1.0);
  CHECK(y[3] == 6.0);
  CHECK(y[5] == 4.0);
  CHECK(y[1] == 2.0);
}

TEST_CASE("input validation") {
  const auto bodies = reference_bodies(1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  CHECK_THROWS_AS(potential_energy(bodies, x), Error);  // coincident
  Eigen::VectorXd wrong = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(potential_gradient(bodies, wrong), Error);

  Body uncharged = bodies[0];
  uncharged.charge = 0.0;
  CHECK_THROWS_AS(two_body_equilibrium(bodies[1], uncharged), Error);
  Body opposite = bodies[0];
  opposite.charge = -opposite.charge;
  CHECK_THROWS_AS(two_body_equilibrium(bodies[1], opposite), Error);
}
