#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wehrl/radial_ode.hpp"

using namespace wehrl;

namespace {

OdeProblem canonical() { return problem_from_exponents(2, ExponentPair(2.0, 3.0), 1.0); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("problem_from_exponents populates the theta-form constants") {
  const OdeProblem prob = canonical();
  CHECK(prob.s == Catch::Approx(4.0 / 3.0));
  CHECK(prob.qj() == Catch::Approx(3.0));
  CHECK(prob.beta_theta == Catch::Approx(15.0 / 4.0));
  CHECK(prob.alpha_theta == Catch::Approx(15.0 / 4.0));
  CHECK(prob.A_expected == Catch::Approx(std::pow(5.0 / 3.0, 1.5)).margin(1e-12));
  CHECK(prob.on_lattice);

  // q > p > q/2 holds for (j=1, p=2, q=4) but the pair is off the lattice.
  const OdeProblem off = problem_from_exponents(2, ExponentPair(2.0, 4.0), 1.0);
  CHECK_FALSE(off.on_lattice);
  CHECK(off.A_expected == Catch::Approx(std::pow(1.5, 1.0)).margin(1e-12));

  CHECK_THROWS_AS(problem_from_exponents(2, ExponentPair(1.4, 3.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(problem_from_exponents(2, ExponentPair(2.0, 3.0), 0.0), std::invalid_argument);
  // The nonlinearity is mandatory: alpha_theta > 0 always.
  CHECK(problem_from_exponents(2, ExponentPair(2.0, 3.0), 1e-6).alpha_theta > 0.0);
}

TEST_CASE("coherent profile closed form") {
  const OdeProblem prob = canonical();
  const RadialSolution sol = coherent_profile(prob, 512);
  CHECK(sol.u_values.front() ==
        Catch::Approx(prob.A_expected * std::pow(std::cos(M_PI / 1024.0), 3.0)).margin(1e-12));
  CHECK(sol.theta_grid.back() == Catch::Approx(M_PI));
  CHECK(sol.u_values.back() <= 1e-7);  // cos(pi/2)^m at the last grid point

  // theta = pi/2 value relative to the amplitude.
  const int mid = 255;  // theta = pi/2 on the 512 grid
  CHECK(sol.theta_grid[mid] == Catch::Approx(M_PI / 2.0));
  CHECK(sol.u_values[mid] / prob.A_expected == Catch::Approx(std::pow(0.5, 1.5)).margin(1e-12));
}

TEST_CASE("shoot reproduces the closed-form solution on the lattice") {
  const OdeProblem prob = canonical();
  const RadialSolution numeric = shoot(prob, prob.A_expected);
  const RadialSolution exact = coherent_profile(prob, 512);
  CHECK(sup_diff(numeric.u_values, exact.u_values) <= 1e-6);
  CHECK_FALSE(numeric.clamped);
  CHECK(std::abs(numeric.boundary_value) <= 1e-6);
}

TEST_CASE("shoot off the admissible initial value misses the boundary") {
  const OdeProblem prob = canonical();
  const RadialSolution wrong = shoot(prob, 2.0 * prob.A_expected);
  CHECK(std::abs(wrong.boundary_value) > 1.0);
  CHECK_THROWS_AS(shoot(prob, -1.0), std::invalid_argument);

  // Initial values whose trajectory crosses zero are clamped and flagged;
  // the stored profile stays nonnegative while the raw boundary data keeps
  // the crossing visible.
  const RadialSolution crossing = shoot(prob, 0.4);
  CHECK(crossing.clamped);
  for (double u : crossing.u_values) REQUIRE(u >= 0.0);
  CHECK(crossing.boundary_value < 0.0);
}

TEST_CASE("shoot converges at the integrator's nominal order") {
  const OdeProblem prob = canonical();
  const RadialSolution exact = coherent_profile(prob, 128);

  // Error measured away from theta = pi: inside the far collar the equation
  // is singular and the local error does not scale with the step.
  const auto fixed_step_error = [&](double h) {
    GridSpec grid;
    grid.num_points = 128;
    grid.abs_tol = 1e30;  // acceptance always granted: the step is pinned by max_step
    grid.rel_tol = 1e30;
    grid.max_step = h;
    const RadialSolution sol = shoot(prob, prob.A_expected, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.u_values.size(); ++i) {
      if (sol.theta_grid[i] > 2.5) break;
      worst = std::max(worst, std::abs(sol.u_values[i] - exact.u_values[i]));
    }
    return worst;
  };

  const double e1 = fixed_step_error(M_PI / 128.0);
  const double e2 = fixed_step_error(M_PI / 256.0);
  CHECK(e1 / e2 >= 8.0);  // embedded 4(5) pair: at least the fourth-order rate
}

TEST_CASE("strictly decreasing admissible profile") {
  const OdeProblem prob = canonical();
  const RadialSolution sol = shoot(prob, prob.A_expected);
  for (std::size_t i = 0; i + 1 < sol.u_values.size(); ++i) {
    if (sol.theta_grid[i + 1] > M_PI - 0.15) break;  // tail sits at integration noise level
    REQUIRE(sol.u_values[i + 1] <= sol.u_values[i] + 1e-10);
  }
}

TEST_CASE("boundary scan finds exactly the predicted amplitude") {
  const OdeProblem prob = canonical();
  const double A = prob.A_expected;

  const auto roots = boundary_scan(prob, 0.1 * A, 10.0 * A, 64);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == Catch::Approx(A).margin(1e-4));

  // Finer scan grid: same single root.
  const auto roots128 = boundary_scan(prob, 0.1 * A, 10.0 * A, 128);
  REQUIRE(roots128.size() == 1);
  CHECK(roots128[0] == Catch::Approx(roots[0]).margin(1e-8));

  // Ranges that exclude the admissible amplitude come back empty, including
  // one that still contains cutoff artifacts of the far singular point.
  CHECK(boundary_scan(prob, 2.5 * A, 10.0 * A, 64).empty());
  CHECK(boundary_scan(prob, 0.1 * A, 0.5 * A, 64).empty());

  CHECK_THROWS_AS(boundary_scan(prob, -1.0, 2.0, 16), std::invalid_argument);
}

TEST_CASE("boundary scan across the canonical family") {
  // j in {1/2, 1, 3/2} with p = 2, q = 2 + 1/j.  The j = 1/2 member has
  // p = q/2 exactly (s = 1, an affine nonlinearity) and is accepted.
  for (int tj : {1, 2, 3}) {
    const double j = 0.5 * tj;
    const OdeProblem prob = problem_from_exponents(tj, ExponentPair(2.0, 2.0 + 1.0 / j), 1.0);
    const double A = prob.A_expected;
    const auto roots = boundary_scan(prob, 0.1 * A, 10.0 * A, 64);
    REQUIRE(roots.size() == 1);
    REQUIRE(roots[0] == Catch::Approx(A).margin(1e-4 * A));
  }
}

TEST_CASE("el_residual separates the lattice from off-lattice exponents") {
  const OdeProblem on = canonical();
  CHECK(el_residual(on, coherent_profile(on, 512)) <= 1e-8);

  const OdeProblem off = problem_from_exponents(2, ExponentPair(2.0, 4.0), 1.0);
  CHECK(el_residual(off, coherent_profile(off, 512)) > 1e-2);

  // Solver output satisfies its own equation.
  const RadialSolution sol = shoot(on, on.A_expected);
  CHECK(el_residual(on, sol) <= 1e-5);
  const RadialSolution wrong = shoot(on, 1.7 * on.A_expected);
  CHECK(el_residual(on, wrong) <= 1e-5);
}

TEST_CASE("energy diagnostic") {
  const OdeProblem prob = canonical();

  const double dev = energy_diagnostic(prob, coherent_profile(prob, 512));
  CHECK(dev <= 1e-6);

  // Discretization dominated: doubling the grid cuts the deviation by >= 3.
  const double dev2 = energy_diagnostic(prob, coherent_profile(prob, 1024));
  CHECK(dev / dev2 >= 3.0);

  // Constant solution at the nonlinearity's positive zero: E is conserved.
  const double ustar = std::pow(prob.beta_theta / prob.alpha_theta, 1.0 / (prob.s - 2.0));
  CHECK(prob.phi(ustar) == Catch::Approx(0.0).margin(1e-12));
  RadialSolution flat;
  flat.problem = prob;
  const int n = 512;
  flat.theta_grid.resize(n);
  flat.u_values.assign(n, ustar);
  flat.du_values.assign(n, 0.0);
  for (int i = 0; i < n; ++i) flat.theta_grid[i] = (i + 1) * M_PI / n;
  CHECK(energy_diagnostic(prob, flat) <= 1e-10);
}

TEST_CASE("integration failure carries the last theta") {
  // An explosive initial value cannot reach the far boundary.
  const OdeProblem prob = canonical();
  try {
    shoot(prob, 1e12);
    // Large amplitudes may still integrate (the equation is mildly
    // nonlinear); only assert when an exception does arrive.
    SUCCEED("no failure raised");
  } catch (const integration_failure& e) {
    CHECK(e.theta_reached > 0.0);
    CHECK(e.theta_reached <= M_PI);
  }
}
