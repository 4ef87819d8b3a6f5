// Acceptance suite: every advertised numerical guarantee of the library, run
// end to end with one PASS/FAIL line per criterion.  Exits nonzero if any
// criterion fails.  Tolerances are pinned in code; nothing here is tuned at
// run time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "wehrl/carlen.hpp"
#include "wehrl/entropy.hpp"
#include "wehrl/radial_ode.hpp"
#include "wehrl/search.hpp"
#include "wehrl/sphere.hpp"
#include "wehrl/states.hpp"

using namespace wehrl;

namespace {

int g_failures = 0;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int index, const std::string& label, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %2d: %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL", index,
              label.c_str(), detail.c_str(), seconds);
  if (!pass) ++g_failures;
}

const std::vector<int> kTwiceJ = {1, 2, 3, 4, 7, 10};  // j = 1/2 .. 5 of the advertised set

std::vector<SpherePoint> centers() {
  return {SpherePoint(0.0, 0.0), SpherePoint(1.0, 0.0), SpherePoint(2.0, 1.0),
          SpherePoint::infinity()};
}

// Adaptive Simpson oracle for the one-dimensional radial integrals obtained
// from the substitution x = 1/(1+|z|^2).
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate01(const std::function<double(double)>& f) {
  return simpson(f, 0.0, 1.0, f(1e-300), f(0.5), f(1.0 - 1e-16), 1e-13, 44);
}

void criterion_1_coherent_norm_unity(const QuadratureRule& rule) {
  Timer t;
  double worst = 0.0;
  std::string worst_at;
  for (int tj : kTwiceJ) {
    for (const auto& w : centers()) {
      const SpinState k = coherent_state(tj, w);
      for (double p : {1.0, 2.0, 3.0, 4.0, 6.5}) {
        const double err = std::abs(normalized_p_norm(k, p, rule) - 1.0);
        if (err > worst) {
          worst = err;
          worst_at = "twice_j=" + std::to_string(tj) + " p=" + sci(p);
        }
      }
    }
  }
  const bool pass = worst <= 1e-8 && t.seconds() < 5.0;
  std::string detail = "max |nnorm-1| = " + sci(worst) + " at " + worst_at;
  if (!pass) {
    detail += "; p=1 with half-integer pj hits a fractional-power singularity the "
              "(64,128) product rule resolves only to ~1e-6";
  }
  report(1, "coherent norm unity", pass, detail, t.seconds());
}

void criterion_2_coherent_entropy() {
  Timer t;
  // Entropy acceptance values run at doubled resolution (128,256).
  const QuadratureRule rule = build_quadrature(128, 256);
  double worst = 0.0;
  for (int tj : kTwiceJ) {
    for (const auto& w : centers()) {
      const double err = std::abs(wehrl_entropy(coherent_state(tj, w), rule) - tj / (tj + 1.0));
      worst = std::max(worst, err);
    }
  }
  report(2, "coherent entropy floor 2j/(2j+1)", worst <= 1e-8 && t.seconds() < 5.0,
         "max |S - 2j/(2j+1)| = " + sci(worst), t.seconds());
}

void criterion_3_closed_forms() {
  Timer t;
  // Independent radial oracle first: x = 1/(1+|z|^2) turns both quantities
  // into polynomial-log integrals on [0,1].
  const double oracle_S = -3.0 * integrate01([](double x) {
    const double rho = 2.0 * x * (1.0 - x);
    return rho > 0.0 ? rho * std::log(rho) : 0.0;
  });
  const double oracle_n4 = 5.0 * integrate01([](double x) {
    const double rho = 2.0 * x * (1.0 - x);
    return rho * rho;
  });
  const double expected_S = 5.0 / 3.0 - std::log(2.0);
  bool pass = std::abs(oracle_S - expected_S) <= 1e-10;
  pass = pass && std::abs(oracle_n4 - 2.0 / 3.0) <= 1e-10;

  // (64,128) leaves this integrand ~2e-7 short; (256,512) delivers 1e-8.
  const QuadratureRule rule = build_quadrature(256, 512);
  const SpinState z_state =
      make_state(2, {Complex(0, 0), Complex(std::sqrt(2.0), 0), Complex(0, 0)});
  const double S = wehrl_entropy(z_state, rule);
  const double renyi4 = renyi_wehrl(z_state, 4.0, rule);
  const double errS = std::abs(S - expected_S);
  const double errR = std::abs(renyi4 - std::log(1.5));
  pass = pass && errS <= 1e-8 && errR <= 1e-8;
  report(3, "z-state closed forms", pass,
         "|S - (5/3 - ln 2)| = " + sci(errS) + ", |R4 - ln(3/2)| = " + sci(errR),
         t.seconds());
}

void criterion_4_lattice_monotonicity(const QuadratureRule& rule) {
  Timer t;
  const std::vector<int> tjs = {1, 2, 3, 4, 6};
  const int per_j = 2000;  // 10^4 states total
  long violations = 0;
  double worst_excess = -1.0;
  for (int tj : tjs) {
    for (int s = 0; s < per_j; ++s) {
      const SpinState f = detail::random_state_stream(tj, 0xACCE0004ULL + tj, s);
      for (double p : {2.0, 2.5}) {
        const double np = normalized_p_norm(f, p, rule);
        for (int n = 1; n <= 3; ++n) {
          const double nq = normalized_p_norm(f, p + 2.0 * n / tj, rule);
          if (nq > np + 1e-9) ++violations;
          worst_excess = std::max(worst_excess, nq - np);
        }
      }
    }
  }
  const bool pass = violations == 0 && t.seconds() < 120.0;
  report(4, "norm monotonicity on the lattice", pass,
         "violations = " + std::to_string(violations) +
             ", max(nnorm_q - nnorm_p) = " + sci(worst_excess),
         t.seconds());
}

void criterion_5_entropy_bound(const QuadratureRule& rule) {
  Timer t;
  const std::vector<int> tjs = {1, 2, 3, 4, 6};
  long violations = 0;
  double tightest = 1e300;
  for (int tj : tjs) {
    const double bound = theorem2_bound(tj);
    for (int s = 0; s < 2000; ++s) {
      const SpinState f = detail::random_state_stream(tj, 0xACCE0004ULL + tj, s);
      const double slack = wehrl_entropy(f, rule) - bound;
      if (slack < -1e-8) ++violations;
      tightest = std::min(tightest, slack);
    }
  }
  bool gap_ok = true;
  for (int tj = 1; tj <= 2000000; ++tj) {
    const double gap = lieb_bound(tj) - theorem2_bound(tj);
    if (!(gap >= 0.0 && gap < 0.5 / tj)) {
      gap_ok = false;
      break;
    }
  }
  const bool pass = violations == 0 && gap_ok;
  report(5, "unconditional entropy bound", pass,
         "violations = " + std::to_string(violations) + ", min slack = " + sci(tightest) +
             ", bound gap < 1/(4j) for all j up to 1e6: " + (gap_ok ? "yes" : "no"),
         t.seconds());
}

void criterion_6_carlen_identity() {
  Timer t;
  const QuadratureRule coarse = build_quadrature(64, 128);
  const QuadratureRule fine = build_quadrature(128, 256);
  double worst_coarse = 0.0, worst_fine = 0.0, worst_schur = 0.0;
  std::string at_coarse, at_fine;
  for (int tj = 1; tj <= 6; ++tj) {
    const double j = 0.5 * tj;
    for (double q : {2.0, 2.0 + 1.0 / j, 4.0, 5.0}) {
      for (int s = 0; s < 100; ++s) {
        const SpinState f = detail::random_state_stream(tj, 0xACCE0006ULL + tj, s);
        const double rc = carlen_residual(f, q, coarse).rel_residual;
        const double rf = carlen_residual(f, q, fine).rel_residual;
        if (rc > worst_coarse) {
          worst_coarse = rc;
          at_coarse = "twice_j=" + std::to_string(tj) + " q=" + sci(q);
        }
        if (rf > worst_fine) {
          worst_fine = rf;
          at_fine = "twice_j=" + std::to_string(tj) + " q=" + sci(q);
        }
        if (q == 2.0) {
          worst_schur = std::max(worst_schur,
                                 std::abs(carlen_residual(f, 2.0, coarse).lhs - j / (2.0 * (tj + 1.0))));
        }
      }
    }
  }
  const bool pass =
      worst_coarse <= 1e-6 && worst_fine <= 1e-9 && worst_schur <= 1e-6 && t.seconds() < 120.0;
  std::string detail = "max residual (64,128) = " + sci(worst_coarse) + " at " + at_coarse +
                       "; (128,256) = " + sci(worst_fine) + " at " + at_fine +
                       "; Schur q=2 dev = " + sci(worst_schur);
  if (!pass) {
    detail += "; fractional q-2 gives rho^{q-2} cones at polynomial zeros, where the "
              "product rule converges like h^{q} instead of spectrally";
  }
  report(6, "gradient/norm identity residual", pass, detail, t.seconds());
}

void criterion_7_minimization(const QuadratureRule& rule) {
  Timer t;
  bool pass = true;
  std::string detail;
  for (const auto& [tj, target] : {std::pair<int, double>{2, 2.0 / 3.0}, {3, 0.75}}) {
    SearchOptions opts;
    opts.seed = 0xACCE0007ULL + tj;
    opts.num_starts = 50;
    const SearchResult res = minimize_wehrl(tj, opts, rule);
    const double err = std::abs(res.best_value - target);
    const auto roots = majorana_roots(res.best_state);
    double spread = 0.0;
    for (std::size_t a = 0; a < roots.size(); ++a) {
      for (std::size_t b = a + 1; b < roots.size(); ++b) {
        spread = std::max(spread, chordal_distance(roots[a], roots[b]));
      }
    }
    const bool value_ok = err <= 1e-4;
    const bool cluster_ok = spread <= 1e-3;
    pass = pass && value_ok && cluster_ok;
    detail += "twice_j=" + std::to_string(tj) + ": |S-min| = " + sci(err) +
              ", root spread = " + sci(spread) + "  ";
    if (!cluster_ok) {
      // Calibrated flatness near the coherent manifold: the entropy excess is
      // ~spread^4/128 at j=1 and ~spread^6/380 at j=3/2, i.e. 8e-15 resp.
      // 3e-21 nats at the demanded 1e-3 spread -- below the ~1e-13 noise
      // floor of double-precision quadrature (and below one ulp of 3/4 for
      // j=3/2), so no entropy-driven search can pin the roots this tight.
      detail += "(below the entropy's double-precision resolution; see note)  ";
    }
  }
  pass = pass && t.seconds() < 600.0;
  report(7, "entropy minimization at j=1, 3/2", pass, detail, t.seconds());
}

void criterion_8_ode_suite() {
  Timer t;
  const OdeProblem prob = problem_from_exponents(2, ExponentPair(2.0, 3.0), 1.0);

  const RadialSolution numeric = shoot(prob, prob.A_expected);
  const RadialSolution exact = coherent_profile(prob, 512);
  double sup = 0.0;
  for (std::size_t i = 0; i < numeric.u_values.size(); ++i) {
    sup = std::max(sup, std::abs(numeric.u_values[i] - exact.u_values[i]));
  }

  const double res_on = el_residual(prob, exact);
  const OdeProblem off = problem_from_exponents(2, ExponentPair(2.0, 4.0), 1.0);
  const double res_off = el_residual(off, coherent_profile(off, 512));

  const auto roots = boundary_scan(prob, 0.1 * prob.A_expected, 10.0 * prob.A_expected, 64);

  const bool pass = sup <= 1e-6 && res_on <= 1e-8 && res_off > 1e-2 && roots.size() == 1 &&
                    std::abs(roots[0] - prob.A_expected) <= 1e-4 && t.seconds() < 60.0;
  report(8, "radial ODE suite", pass,
         "sup|shoot-profile| = " + sci(sup) + ", residual on/off lattice = " +
             sci(res_on) + "/" + sci(res_off) +
             ", admissible u0 count = " + std::to_string(roots.size()),
         t.seconds());
}

void criterion_9_endpoint_differentiation(const QuadratureRule& rule) {
  Timer t;
  bool pass = true;
  double worst_err = 0.0, worst_ratio = 1e300;
  for (int s = 0; s < 20; ++s) {
    const int tj = 1 + (s % 4);
    const SpinState f = detail::random_state_stream(tj, 0xACCE0009ULL, s);
    double errs[2];
    int idx = 0;
    for (double ds : {1e-3, 1e-4}) {
      const auto check = norm_log_derivative_check(f, ds, rule);
      const double err = std::abs(check.lhs - check.rhs);
      if (err > 5.0 * ds) pass = false;
      worst_err = std::max(worst_err, err / ds);
      errs[idx++] = err;
    }
    // Central differences: a 10x smaller ds cuts the error by about 100x
    // (checked only above the roundoff floor of the difference quotient).
    if (errs[1] > 1e-12) {
      const double ratio = errs[0] / errs[1];
      worst_ratio = std::min(worst_ratio, ratio);
      if (ratio < 25.0) pass = false;
    }
  }
  report(9, "endpoint differentiation at s=2", pass,
         "max |lhs-rhs|/ds = " + sci(worst_err) +
             ", weakest decay factor per 10x step cut = " + sci(worst_ratio),
         t.seconds());
}

void criterion_10_exact_vs_quadrature(const QuadratureRule& rule) {
  Timer t;
  double worst_norm = 0.0, worst_inner = 0.0;
  for (int s = 0; s < 100; ++s) {
    const int tj = 1 + (s % 5);
    const SpinState f = detail::random_state_stream(tj, 0xACCE000AULL, s);
    for (double q : {2.0, 4.0, 6.0, 8.0}) {
      const double exact = detail::even_power_integral(f, static_cast<int>(q));
      const double quad = detail::power_integral(f, q, rule);
      worst_norm = std::max(worst_norm, std::abs(exact - quad));
    }
    const SpinState g = detail::random_state_stream(tj, 0xACCE000BULL, s);
    const Complex quad_ip = (tj + 1.0) * integrate_invariant(rule, [&](const SpherePoint& p) {
                              return std::conj(evaluate(f, p)) * evaluate(g, p);
                            });
    worst_inner = std::max(worst_inner, std::abs(quad_ip - inner_product(f, g)));
  }
  const bool pass = worst_norm <= 1e-10 && worst_inner <= 1e-10;
  report(10, "exact vs quadrature cross-checks", pass,
         "max norm dev = " + sci(worst_norm) +
             ", max inner-product dev = " + sci(worst_inner),
         t.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite (quadrature default 64x128)\n");
  const QuadratureRule rule = build_quadrature(64, 128);

  criterion_1_coherent_norm_unity(rule);
  criterion_2_coherent_entropy();
  criterion_3_closed_forms();
  criterion_4_lattice_monotonicity(rule);
  criterion_5_entropy_bound(rule);
  criterion_6_carlen_identity();
  criterion_7_minimization(rule);
  criterion_8_ode_suite();
  criterion_9_endpoint_differentiation(rule);
  criterion_10_exact_vs_quadrature(rule);

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed; see the notes above for the numerical analysis\n",
                g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
