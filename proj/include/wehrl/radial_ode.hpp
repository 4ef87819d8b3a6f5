#pragma once

// The radial Euler-Lagrange problem behind the sharp norm bound.  In terms
// of the azimuthal angle theta (r = tan(theta/2)) the canonical equation is
//
//   u'' + cot(theta) u' + phi(u) = 0,       phi(u) = beta u - alpha u^{s-1},
//
// with beta = qj(qj+2)/4, alpha = qj(qj+2) b / 4 and s = 2p/q.  Equivalently
// (1 + 4 Delta / (qj(qj+2))) u = b u^{s-1} with the spherical Laplacian
// Delta u = u'' + cot(theta) u' for rotationally symmetric u.  The decaying
// profile u = A ((1+cos theta)/2)^{qj/2} with A = ((qj+2) b / qj)^{q/(2(q-p))}
// solves the equation exactly precisely when q = p + 1/j.
//
// theta = 0 and theta = pi are regular singular points: integration starts
// from a fourth-order series at theta = 0 (u'(0) = 0) and stops just short
// of pi, where the generic solution picks up a log-divergent component.  The
// coefficient of that component, estimated as u'(theta_end) * (pi - theta_end),
// separates genuine u(pi) = 0 solutions from cutoff artifacts in the scan.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wehrl/entropy.hpp"
#include "wehrl/sphere.hpp"

namespace wehrl {

class integration_failure : public std::runtime_error {
 public:
  integration_failure(const std::string& what, double theta)
      : std::runtime_error(what + " (last theta reached: " + std::to_string(theta) + ")"),
        theta_reached(theta) {}
  double theta_reached;
};

struct OdeProblem {
  int twice_j = 2;
  double p = 2.0;
  double q = 3.0;
  double s = 4.0 / 3.0;      // 2p/q
  double b_el = 1.0;         // the constant b of the Euler-Lagrange equation
  double alpha_theta = 0.0;  // qj(qj+2) b / 4
  double beta_theta = 0.0;   // qj(qj+2) / 4
  double A_expected = 0.0;   // ((qj+2) b / qj)^{q/(2(q-p))}
  bool on_lattice = false;   // q = p + 1/j

  double j() const { return 0.5 * twice_j; }
  double qj() const { return q * j(); }

  // phi(u) = beta u - alpha u^{s-1}, with the power clamped at u = 0 so the
  // integrator can cross zero (the solution is flagged when that happens).
  double phi(double u) const {
    const double up = std::max(u, 0.0);
    return beta_theta * u - alpha_theta * std::pow(up, s - 1.0);
  }
  double phi_prime(double u) const {
    if (s == 1.0) return beta_theta;
    return beta_theta - alpha_theta * (s - 1.0) * std::pow(std::max(u, 1e-300), s - 2.0);
  }
  // Antiderivative of the r-form nonlinearity 4 phi (the canonical equation
  // in r reads (1+r^2)^2 (u'' + u'/r) + 4 phi(u) = 0).
  double Phi(double u) const {
    const double up = std::max(u, 0.0);
    return 2.0 * beta_theta * u * u - (4.0 * alpha_theta / s) * std::pow(up, s);
  }
};

inline OdeProblem problem_from_exponents(int twice_j, const ExponentPair& exponents, double b_el) {
  SpinQuantumNumber jj(twice_j);
  const double p = exponents.p;
  const double q = exponents.q;
  if (!(b_el > 0.0)) throw std::invalid_argument("problem_from_exponents: b_el must be > 0");
  if (!(q > p)) throw std::invalid_argument("problem_from_exponents: need q > p");
  if (!(p >= 0.5 * q)) {
    // s = 2p/q would leave [1,2); the nonlinearity exponent s-1 would turn negative.
    throw std::invalid_argument("problem_from_exponents: need p >= q/2");
  }
  OdeProblem prob;
  prob.twice_j = twice_j;
  prob.p = p;
  prob.q = q;
  prob.s = 2.0 * p / q;
  prob.b_el = b_el;
  const double m = prob.qj();
  prob.alpha_theta = m * (m + 2.0) * b_el / 4.0;
  prob.beta_theta = m * (m + 2.0) / 4.0;
  prob.A_expected = std::pow((m + 2.0) * b_el / m, q / (2.0 * (q - p)));
  prob.on_lattice = std::abs(q - p - 2.0 / twice_j) <= 1e-12;
  return prob;
}

struct RadialSolution {
  std::vector<double> theta_grid;  // increasing, in (0, pi]
  std::vector<double> u_values;    // >= 0 (negative excursions are clamped and flagged)
  std::vector<double> du_values;
  OdeProblem problem;
  bool clamped = false;            // u dipped below zero somewhere
  double boundary_value = 0.0;     // raw u at theta_end = pi - 1e-6
  double boundary_log_coeff = 0.0; // u'(theta_end) * (pi - theta_end)
};

struct GridSpec {
  int num_points = 512;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = 0.0;  // 0 = unrestricted
};

// Closed-form profile u(theta) = A ((1+cos theta)/2)^{qj/2} sampled with exact
// derivative values.  An exact solution iff the problem sits on the lattice
// q = p + 1/j; off the lattice it is still the natural comparison profile.
inline RadialSolution coherent_profile(const OdeProblem& prob, int num_points = 512) {
  if (num_points < 8) throw std::invalid_argument("coherent_profile: too few grid points");
  RadialSolution sol;
  sol.problem = prob;
  const double m = prob.qj();
  const double A = prob.A_expected;
  sol.theta_grid.resize(num_points);
  sol.u_values.resize(num_points);
  sol.du_values.resize(num_points);
  for (int i = 0; i < num_points; ++i) {
    const double th = (i + 1) * M_PI / num_points;
    const double c = std::cos(0.5 * th);
    const double sn = std::sin(0.5 * th);
    sol.theta_grid[i] = th;
    sol.u_values[i] = A * std::pow(c, m);
    sol.du_values[i] = -0.5 * A * m * std::pow(c, m - 1.0) * sn;
  }
  sol.boundary_value = sol.u_values.back();
  return sol;
}

namespace detail {

struct OdeState {
  double u;
  double v;
};

struct ShootOutcome {
  double u_end = 0.0;
  double v_end = 0.0;
  double min_u = 0.0;
  bool clamped = false;
};

constexpr double kThetaStart = 1e-3;
constexpr double kTauEnd = 1e-6;

// Series start at the regular singular point theta = 0 with u'(0) = 0:
// u = u0 + a2 th^2 + a4 th^4 + O(th^6).
inline void series_start(const OdeProblem& prob, double u0, double th, double& u, double& v) {
  const double a2 = -0.25 * prob.phi(u0);
  const double a4 = a2 * (2.0 - 3.0 * prob.phi_prime(u0)) / 48.0;
  u = u0 + a2 * th * th + a4 * th * th * th * th;
  v = 2.0 * a2 * th + 4.0 * a4 * th * th * th;
}

inline OdeState ode_rhs(const OdeProblem& prob, double th, const OdeState& y) {
  return OdeState{y.v, -std::cos(th) / std::sin(th) * y.v - prob.phi(y.u)};
}

// One embedded Cash-Karp 4(5) step; returns the 5th-order solution and the
// embedded error estimate.
inline void cash_karp_step(const OdeProblem& prob, double th, const OdeState& y, double h,
                           OdeState& out, OdeState& err) {
  static constexpr double b21 = 1.0 / 5.0;
  static constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
  static constexpr double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
  static constexpr double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0,
                          b54 = 35.0 / 27.0;
  static constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0,
                          b64 = 44275.0 / 110592.0, b65 = 253.0 / 4096.0;
  static constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                          c6 = 512.0 / 1771.0;
  static constexpr double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                          d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                          d6 = c6 - 0.25;

  const OdeState k1 = ode_rhs(prob, th, y);
  const OdeState k2 = ode_rhs(prob, th + 0.2 * h, {y.u + h * b21 * k1.u, y.v + h * b21 * k1.v});
  const OdeState k3 = ode_rhs(prob, th + 0.3 * h,
                              {y.u + h * (b31 * k1.u + b32 * k2.u), y.v + h * (b31 * k1.v + b32 * k2.v)});
  const OdeState k4 =
      ode_rhs(prob, th + 0.6 * h, {y.u + h * (b41 * k1.u + b42 * k2.u + b43 * k3.u),
                                   y.v + h * (b41 * k1.v + b42 * k2.v + b43 * k3.v)});
  const OdeState k5 =
      ode_rhs(prob, th + h, {y.u + h * (b51 * k1.u + b52 * k2.u + b53 * k3.u + b54 * k4.u),
                             y.v + h * (b51 * k1.v + b52 * k2.v + b53 * k3.v + b54 * k4.v)});
  const OdeState k6 = ode_rhs(
      prob, th + 0.875 * h,
      {y.u + h * (b61 * k1.u + b62 * k2.u + b63 * k3.u + b64 * k4.u + b65 * k5.u),
       y.v + h * (b61 * k1.v + b62 * k2.v + b63 * k3.v + b64 * k4.v + b65 * k5.v)});

  out.u = y.u + h * (c1 * k1.u + c3 * k3.u + c4 * k4.u + c6 * k6.u);
  out.v = y.v + h * (c1 * k1.v + c3 * k3.v + c4 * k4.v + c6 * k6.v);
  err.u = h * (d1 * k1.u + d3 * k3.u + d4 * k4.u + d5 * k5.u + d6 * k6.u);
  err.v = h * (d1 * k1.v + d3 * k3.v + d4 * k4.v + d5 * k5.v + d6 * k6.v);
}

// Adaptive integration from (th, y) to th_target.  Observer is called at
// every accepted step with the new state.  The controller step h persists
// across calls, so dense-output segmentation does not reset it; clamping a
// step to a segment end never shrinks the carried h.
template <typename Observer>
void integrate_to(const OdeProblem& prob, double& th, OdeState& y, double& h, double th_target,
                  const GridSpec& grid, Observer&& observe) {
  if (grid.max_step > 0.0) h = std::min(h, grid.max_step);
  while (th < th_target) {
    const double dt = std::min(h, th_target - th);
    if (dt < 1e-14) {
      th = th_target;
      break;
    }
    OdeState ynew, err;
    cash_karp_step(prob, th, y, dt, ynew, err);
    const double scale_u = grid.abs_tol + grid.rel_tol * std::max(std::abs(y.u), std::abs(ynew.u));
    const double scale_v = grid.abs_tol + grid.rel_tol * std::max(std::abs(y.v), std::abs(ynew.v));
    const double e = std::max(std::abs(err.u) / scale_u, std::abs(err.v) / scale_v);
    const bool accepted = e <= 1.0 || dt <= 1e-13;
    if (accepted) {
      th += dt;
      y = ynew;
      observe(th, y);
    }
    double factor = (e > 0.0) ? 0.9 * std::pow(e, -0.2) : 5.0;
    factor = std::clamp(factor, 0.2, 5.0);
    if (!accepted || dt == h) {
      h = dt * factor;
    } else {
      h = std::max(h, dt * factor);
    }
    if (grid.max_step > 0.0) h = std::min(h, grid.max_step);
    if (h < 1e-15) {
      throw integration_failure("shoot: step size collapsed", th);
    }
  }
}

inline ShootOutcome shoot_boundary(const OdeProblem& prob, double u0, const GridSpec& grid) {
  double th = kThetaStart;
  double h = 1e-3;
  OdeState y;
  series_start(prob, u0, th, y.u, y.v);
  ShootOutcome out;
  out.min_u = std::min(u0, y.u);
  out.clamped = y.u < 0.0;
  integrate_to(prob, th, y, h, M_PI - kTauEnd, grid, [&](double, const OdeState& s) {
    out.min_u = std::min(out.min_u, s.u);
    if (s.u < 0.0) out.clamped = true;
  });
  out.u_end = y.u;
  out.v_end = y.v;
  return out;
}

}  // namespace detail

// Integrate the initial value problem u(0) = u0, u'(0) = 0 across (0, pi),
// with dense output on a uniform theta grid.  The nonlinearity argument is
// clamped at zero (and the solution flagged) if u turns negative; stored
// u_values are clamped likewise, while boundary_value keeps the raw value at
// theta_end = pi - 1e-6 for shooting diagnostics.
inline RadialSolution shoot(const OdeProblem& prob, double u0, const GridSpec& grid = {}) {
  if (!(u0 > 0.0)) throw std::invalid_argument("shoot: u0 must be > 0");
  if (grid.num_points < 8) throw std::invalid_argument("shoot: too few grid points");
  RadialSolution sol;
  sol.problem = prob;
  const int n = grid.num_points;
  sol.theta_grid.resize(n);
  sol.u_values.resize(n);
  sol.du_values.resize(n);

  const double th_end = M_PI - detail::kTauEnd;
  double th = detail::kThetaStart;
  double h = 1e-3;
  detail::OdeState y;
  detail::series_start(prob, u0, th, y.u, y.v);

  for (int i = 0; i < n; ++i) {
    const double target = (i + 1) * M_PI / n;
    sol.theta_grid[i] = target;
    if (target <= th) {
      double uu, vv;
      detail::series_start(prob, u0, target, uu, vv);
      sol.u_values[i] = std::max(uu, 0.0);
      sol.du_values[i] = vv;
      continue;
    }
    const double stop = std::min(target, th_end);
    if (th < stop) {
      detail::integrate_to(prob, th, y, h, stop, grid, [&](double, const detail::OdeState& s) {
        if (s.u < 0.0) sol.clamped = true;
      });
    }
    sol.u_values[i] = std::max(y.u, 0.0);
    sol.du_values[i] = y.v;
  }
  if (th < th_end) {
    detail::integrate_to(prob, th, y, h, th_end, grid, [&](double, const detail::OdeState& s) {
      if (s.u < 0.0) sol.clamped = true;
    });
  }
  sol.boundary_value = y.u;
  sol.boundary_log_coeff = y.v * detail::kTauEnd;
  return sol;
}

// Scan u0 over [lo, hi] for sign changes of the boundary value u(pi; u0) and
// bisect each bracket.  A refined root is admissible when the solution stays
// positive on (0, pi) and carries no log-divergent component at pi.
inline std::vector<double> boundary_scan(const OdeProblem& prob, double lo, double hi,
                                         int num_points, const GridSpec& grid = {}) {
  if (!(0.0 < lo && lo < hi)) throw std::invalid_argument("boundary_scan: need 0 < lo < hi");
  if (num_points < 2) throw std::invalid_argument("boundary_scan: need at least 2 scan points");

  const auto F = [&](double u0) { return detail::shoot_boundary(prob, u0, grid); };

  std::vector<double> grid_u0(num_points);
  std::vector<double> vals(num_points);
  for (int i = 0; i < num_points; ++i) {
    grid_u0[i] = lo + (hi - lo) * i / (num_points - 1);
    vals[i] = F(grid_u0[i]).u_end;
  }

  std::vector<double> admissible;
  for (int i = 0; i + 1 < num_points; ++i) {
    if (!(vals[i] * vals[i + 1] < 0.0)) continue;
    double a = grid_u0[i], b = grid_u0[i + 1];
    double fa = vals[i];
    for (int iter = 0; iter < 100 && (b - a) > 1e-13 * b; ++iter) {
      const double mid = 0.5 * (a + b);
      const double fm = F(mid).u_end;
      if (fa * fm <= 0.0) {
        b = mid;
      } else {
        a = mid;
        fa = fm;
      }
    }
    const double root = 0.5 * (a + b);
    const auto outcome = F(root);
    const bool positive = outcome.min_u > -1e-6 * root;
    const bool no_log_part = std::abs(outcome.v_end) * detail::kTauEnd < 1e-4 * root;
    if (positive && no_log_part) {
      if (admissible.empty() || std::abs(admissible.back() - root) > 1e-8 * root) {
        admissible.push_back(root);
      }
    }
  }
  return admissible;
}

namespace detail {

// Fourth-order five-point first derivative on a uniform grid (interior only).
inline double d1_central4(const std::vector<double>& y, int i, double h) {
  return (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
}

inline double uniform_spacing(const std::vector<double>& grid) {
  const double h = grid[1] - grid[0];
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (std::abs(grid[i + 1] - grid[i] - h) > 1e-9 * h) {
      throw std::invalid_argument("expected a uniform theta grid");
    }
  }
  return h;
}

}  // namespace detail

// Max over interior grid points of |u + (4/(qj(qj+2))) Delta u - b u^{s-1}|,
// with Delta u = u'' + cot(theta) u' and u'' obtained from the stored
// derivative by a fourth-order five-point stencil.  Two regions are excluded
// because the differencing (not the solution) dominates there: the collar
// theta > pi - 0.15, where generic solutions carry a log(pi - theta) mode
// with unbounded higher derivatives, and points below 5% of the profile's
// peak, where the fractional power u^{s-1} is not Lipschitz and its
// u^{s-5}-scale derivatives defeat any fixed-order stencil near a zero
// crossing.
inline double el_residual(const OdeProblem& prob, const RadialSolution& sol) {
  const int n = static_cast<int>(sol.theta_grid.size());
  if (n < 8) throw std::invalid_argument("el_residual: solution grid too short");
  const double h = detail::uniform_spacing(sol.theta_grid);
  const double m = prob.qj();
  double peak = 0.0;
  for (double u : sol.u_values) peak = std::max(peak, u);
  const double floor = 0.05 * peak;
  double worst = 0.0;
  for (int i = 2; i + 2 < n; ++i) {
    const double th = sol.theta_grid[i];
    if (th > M_PI - 0.15) break;
    const double u = sol.u_values[i];
    if (u < floor) continue;
    const double upp = detail::d1_central4(sol.du_values, i, h);
    const double lap = upp + std::cos(th) / std::sin(th) * sol.du_values[i];
    const double res =
        std::abs(u + 4.0 / (m * (m + 2.0)) * lap - prob.b_el * std::pow(u, prob.s - 1.0));
    worst = std::max(worst, res);
  }
  return worst;
}

// Conservation-law diagnostic in the radial variable r = tan(theta/2).  With
// E(r) = (1/2)(1+r^2)^2 u'(r)^2 + Phi(u) and Phi the antiderivative of the
// implemented r-form nonlinearity, the canonical equation implies
//
//   E'(r) = -((1 - r^4)/r) u'(r)^2 .
//
// Returned is the max deviation between the numerically differentiated E and
// that dissipation term over grid points with r in [r_min, r_max].
inline double energy_diagnostic(const OdeProblem& prob, const RadialSolution& sol,
                                double r_min = 0.1, double r_max = 10.0) {
  const int n = static_cast<int>(sol.theta_grid.size());
  if (n < 8) throw std::invalid_argument("energy_diagnostic: solution grid too short");
  const double h = detail::uniform_spacing(sol.theta_grid);
  std::vector<double> energy(n);
  for (int i = 0; i < n; ++i) {
    // (1+r^2)^2 u'(r)^2 = 4 u'(theta)^2, so E = 2 u'(theta)^2 + Phi(u).
    energy[i] = 2.0 * sol.du_values[i] * sol.du_values[i] + prob.Phi(sol.u_values[i]);
  }
  double worst = 0.0;
  for (int i = 2; i + 2 < n; ++i) {
    const double th = sol.theta_grid[i];
    const double r = std::tan(0.5 * th);
    if (r < r_min || r > r_max) continue;
    const double conf = 1.0 + r * r;
    const double dEdr = detail::d1_central4(energy, i, h) * 2.0 / conf;
    const double ur = sol.du_values[i] * 2.0 / conf;
    const double dissipation = -(1.0 - r * r * r * r) / r * ur * ur;
    worst = std::max(worst, std::abs(dEdr - dissipation));
  }
  return worst;
}

}  // namespace wehrl
