#pragma once

// Global optimization over the normalized state space: multistart projected
// gradient descent with numerical gradients, in either raw coefficient
// coordinates (on the unit sphere of the orthonormal basis) or Majorana root
// coordinates.  Each start draws its own RNG stream from (seed, start index),
// so results do not depend on how starts are scheduled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "wehrl/entropy.hpp"
#include "wehrl/sphere.hpp"
#include "wehrl/states.hpp"

namespace wehrl {

enum class Parametrization { coefficients, majorana_roots };

struct SearchOptions {
  std::uint64_t seed = 0;
  int num_starts = 50;
  int max_iters = 300;
  double gradient_step = 1e-5;
  double tolerance = 1e-13;
  Parametrization parametrization = Parametrization::coefficients;

  void validate() const {
    if (num_starts < 1) throw std::invalid_argument("SearchOptions: num_starts must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("SearchOptions: max_iters must be >= 1");
    if (!(gradient_step > 0.0)) throw std::invalid_argument("SearchOptions: gradient_step must be > 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("SearchOptions: tolerance must be > 0");
  }
};

struct SearchResult {
  SpinState best_state;
  double best_value = 0.0;
  std::vector<double> per_start_values;
  bool converged = false;
  int iterations_used = 0;
};

namespace detail {

// Engine for the stream (seed, index); SplitMix64 scrambling of the pair.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return std::mt19937_64(x);
}

// Box-Muller on explicit uniforms, so the draw sequence is pinned down by the
// engine alone (stdlib normal_distribution implementations differ).
inline double standard_normal(std::mt19937_64& eng) {
  const double u1 = ((eng() >> 11) + 1.0) * 0x1.0p-53;  // in (0, 1]
  const double u2 = (eng() >> 11) * 0x1.0p-53;          // in [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Cached per-node values of the orthonormal basis e_k = sqrt(C(2j,k)) z^k
// times the conformal factor, so objectives cost one short dot product per
// node instead of a Horner pass.
struct NodeBasis {
  int twice_j;
  std::size_t n_nodes;
  std::vector<Complex> table;  // [node][k], row-major
  const QuadratureRule* rule;

  NodeBasis(int tj, const QuadratureRule& r) : twice_j(tj), n_nodes(r.size()), rule(&r) {
    const int dim = tj + 1;
    table.resize(n_nodes * dim);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const Complex z = r.nodes[i];
      const double conf = std::pow(1.0 + std::norm(z), -0.5 * tj);
      Complex zk(1.0, 0.0);
      for (int k = 0; k <= tj; ++k) {
        table[i * dim + k] = std::sqrt(binomial(tj, k)) * zk * conf;
        zk *= z;
      }
    }
  }

  // |f(z_i)|^2 for the unit vector x in the orthonormal basis.
  void husimi_values(const std::vector<Complex>& x, std::vector<double>& out) const {
    const int dim = twice_j + 1;
    out.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      Complex acc(0.0, 0.0);
      const Complex* row = &table[i * dim];
      for (int k = 0; k < dim; ++k) acc += row[k] * x[k];
      out[i] = std::norm(acc);
    }
  }
};

inline std::vector<Complex> unit_orthonormal_vector(int dim, std::mt19937_64& eng) {
  std::vector<Complex> x(dim);
  double nrm2 = 0.0;
  for (auto& c : x) {
    const double re = standard_normal(eng);
    const double im = standard_normal(eng);
    c = Complex(re, im);
    nrm2 += std::norm(c);
  }
  const double inv = 1.0 / std::sqrt(nrm2);
  for (auto& c : x) c *= inv;
  return x;
}

inline SpinState state_from_orthonormal(int twice_j, const std::vector<Complex>& x) {
  std::vector<Complex> c(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    c[k] = x[k] * std::sqrt(binomial(twice_j, static_cast<int>(k)));
  }
  return SpinState{SpinQuantumNumber(twice_j), std::move(c)};
}

struct DescentOutcome {
  std::vector<double> coords;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Plain gradient descent with central-difference gradients, backtracking line
// search and a projection applied after every trial step (used to renormalize
// sphere coordinates; the gradient is taken of the projected objective, which
// keeps the step tangent to the constraint).  Minimizes `objective`; stops
// when an accepted step improves by less than opts.tolerance.
template <typename Objective, typename Project>
DescentOutcome descend(std::vector<double> x, Objective&& objective, Project&& project,
                       const SearchOptions& opts) {
  project(x);
  DescentOutcome out;
  double value = objective(x);
  double step = 0.1;
  const int dim = static_cast<int>(x.size());
  std::vector<double> grad(dim), trial;
  for (int it = 0; it < opts.max_iters; ++it) {
    out.iterations = it + 1;
    double gnorm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double h = opts.gradient_step;
      trial = x;
      trial[i] = x[i] + h;
      project(trial);
      const double fp = objective(trial);
      trial = x;
      trial[i] = x[i] - h;
      project(trial);
      const double fm = objective(trial);
      grad[i] = (fp - fm) / (2.0 * h);
      gnorm2 += grad[i] * grad[i];
    }
    if (gnorm2 < 1e-24) {
      out.converged = true;
      break;
    }
    bool improved = false;
    while (step > 1e-14) {
      trial = x;
      for (int i = 0; i < dim; ++i) trial[i] -= step * grad[i];
      project(trial);
      const double tv = objective(trial);
      if (tv < value - 1e-4 * step * gnorm2) {
        const double gain = value - tv;
        x = trial;
        value = tv;
        step *= 2.0;
        improved = true;
        if (gain < opts.tolerance) out.converged = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) out.converged = true;
    if (out.converged) break;
  }
  out.coords = std::move(x);
  out.value = value;
  return out;
}

}  // namespace detail

// Unitarily invariant random state: iid standard complex Gaussian coordinates
// in the orthonormal basis, normalized.  Identical seeds give identical
// states.
inline SpinState random_state(int twice_j, std::uint64_t seed) {
  SpinQuantumNumber jj(twice_j);
  auto eng = detail::stream_engine(seed, 0);
  const auto x = detail::unit_orthonormal_vector(jj.dim(), eng);
  return detail::state_from_orthonormal(twice_j, x);
}

namespace detail {

inline SpinState random_state_stream(int twice_j, std::uint64_t seed, std::uint64_t index) {
  auto eng = stream_engine(seed, index);
  const auto x = unit_orthonormal_vector(twice_j + 1, eng);
  return state_from_orthonormal(twice_j, x);
}

// Real coordinate vector <-> unit vector in C^{dim}.
inline std::vector<Complex> to_complex(const std::vector<double>& x) {
  const std::size_t dim = x.size() / 2;
  std::vector<Complex> c(dim);
  for (std::size_t k = 0; k < dim; ++k) c[k] = Complex(x[2 * k], x[2 * k + 1]);
  return c;
}

inline void project_unit(std::vector<double>& x) {
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& v : x) v *= inv;
}

// Generic multistart driver.  `make_objective` builds the per-start objective
// (shared cached tables are fine); `start_coords` draws initial coordinates.
template <typename ObjectiveFactory, typename StartFactory, typename StateFromCoords>
SearchResult multistart(const SearchOptions& opts, ObjectiveFactory&& objective,
                        StartFactory&& start_coords, StateFromCoords&& state_of, bool maximize) {
  opts.validate();
  SearchResult result;
  result.per_start_values.reserve(opts.num_starts);
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  std::vector<double> best_coords;
  bool best_converged = false;
  int best_iters = 0;
  for (int s = 0; s < opts.num_starts; ++s) {
    auto x0 = start_coords(s);
    auto outcome = descend(
        std::move(x0),
        [&](const std::vector<double>& x) { return maximize ? -objective(x) : objective(x); },
        [&](std::vector<double>& x) { project_unit(x); }, opts);
    const double value = maximize ? -outcome.value : outcome.value;
    result.per_start_values.push_back(value);
    const bool better = maximize ? (value > best) : (value < best);
    if (better) {
      best = value;
      best_coords = outcome.coords;
      best_converged = outcome.converged;
      best_iters = outcome.iterations;
    }
  }
  result.best_value = best;
  result.best_state = normalized(state_of(best_coords));
  result.converged = best_converged;
  result.iterations_used = best_iters;
  return result;
}

}  // namespace detail

// Multistart minimization of the Wehrl entropy over normalized states.
// The majorana_roots parametrization works in stereographic root coordinates
// (dimension-exact but singular at collisions); coefficients is the default.
inline SearchResult minimize_wehrl(int twice_j, const SearchOptions& opts,
                                   const QuadratureRule& rule) {
  SpinQuantumNumber jj(twice_j);
  detail::NodeBasis basis(twice_j, rule);
  std::vector<double> husimi;
  const double pref = twice_j + 1.0;

  const auto entropy_of_unit = [&](const std::vector<Complex>& x) {
    basis.husimi_values(x, husimi);
    std::vector<double> terms(husimi.size());
    for (std::size_t i = 0; i < husimi.size(); ++i) {
      const double a2 = husimi[i];
      terms[i] = (a2 < 1e-300) ? 0.0 : rule.weights[i] * a2 * std::log(a2);
    }
    return -pref * detail::pairwise_sum(terms);
  };

  if (opts.parametrization == Parametrization::majorana_roots) {
    // Root coordinates (re, im per root).  Entropy is evaluated through the
    // expanded polynomial; the objective handles the normalization itself, so
    // no projection is applied.
    const auto objective = [&](const std::vector<double>& x) {
      std::vector<SpherePoint> roots(twice_j);
      for (int k = 0; k < twice_j; ++k) roots[k] = SpherePoint(x[2 * k], x[2 * k + 1]);
      const SpinState f = state_from_roots(twice_j, roots);
      std::vector<Complex> xo(jj.dim());
      for (int k = 0; k <= twice_j; ++k) {
        xo[k] = f.coeffs[k] / std::sqrt(detail::binomial(twice_j, k));
      }
      return entropy_of_unit(xo);
    };
    opts.validate();
    SearchResult result;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_coords;
    bool best_converged = false;
    int best_iters = 0;
    for (int s = 0; s < opts.num_starts; ++s) {
      const SpinState f0 = detail::random_state_stream(twice_j, opts.seed, s);
      const auto roots = majorana_roots(f0);
      std::vector<double> x0;
      x0.reserve(2 * twice_j);
      bool ok = true;
      for (const auto& r : roots) {
        if (r.infinite) {
          ok = false;  // measure-zero draw; skip rather than special-case
          break;
        }
        x0.push_back(r.z.real());
        x0.push_back(r.z.imag());
      }
      if (!ok) continue;
      auto outcome = detail::descend(std::move(x0), objective, [](std::vector<double>&) {}, opts);
      result.per_start_values.push_back(outcome.value);
      if (outcome.value < best) {
        best = outcome.value;
        best_coords = outcome.coords;
        best_converged = outcome.converged;
        best_iters = outcome.iterations;
      }
    }
    if (best_coords.empty()) {
      throw std::runtime_error("minimize_wehrl: no start produced finite root coordinates");
    }
    std::vector<SpherePoint> roots(twice_j);
    for (int k = 0; k < twice_j; ++k) roots[k] = SpherePoint(best_coords[2 * k], best_coords[2 * k + 1]);
    result.best_value = best;
    result.best_state = state_from_roots(twice_j, roots);
    result.converged = best_converged;
    result.iterations_used = best_iters;
    return result;
  }

  return detail::multistart(
      opts,
      [&](const std::vector<double>& x) { return entropy_of_unit(detail::to_complex(x)); },
      [&](int s) {
        auto eng = detail::stream_engine(opts.seed, s);
        const auto x = detail::unit_orthonormal_vector(jj.dim(), eng);
        std::vector<double> out(2 * x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
          out[2 * k] = x[k].real();
          out[2 * k + 1] = x[k].imag();
        }
        return out;
      },
      [&](const std::vector<double>& x) {
        return detail::state_from_orthonormal(twice_j, detail::to_complex(x));
      },
      /*maximize=*/false);
}

// Multistart maximization of nnorm_q / nnorm_p over normalized states.  Both
// norms are evaluated by quadrature on the shared Husimi values, so p = q
// gives exactly 1.
inline SearchResult maximize_norm_ratio(int twice_j, const ExponentPair& exponents,
                                        const SearchOptions& opts, const QuadratureRule& rule) {
  SpinQuantumNumber jj(twice_j);
  detail::NodeBasis basis(twice_j, rule);
  std::vector<double> husimi;
  const double j = 0.5 * twice_j;
  const double p = exponents.p;
  const double q = exponents.q;

  const auto ratio_of_unit = [&](const std::vector<Complex>& x) {
    basis.husimi_values(x, husimi);
    std::vector<double> tp(husimi.size()), tq(husimi.size());
    for (std::size_t i = 0; i < husimi.size(); ++i) {
      tp[i] = rule.weights[i] * std::pow(husimi[i], 0.5 * p);
      tq[i] = rule.weights[i] * std::pow(husimi[i], 0.5 * q);
    }
    const double np = std::pow((p * j + 1.0) * detail::pairwise_sum(tp), 1.0 / p);
    const double nq = std::pow((q * j + 1.0) * detail::pairwise_sum(tq), 1.0 / q);
    return nq / np;
  };

  return detail::multistart(
      opts,
      [&](const std::vector<double>& x) { return ratio_of_unit(detail::to_complex(x)); },
      [&](int s) {
        auto eng = detail::stream_engine(opts.seed, s);
        const auto x = detail::unit_orthonormal_vector(jj.dim(), eng);
        std::vector<double> out(2 * x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
          out[2 * k] = x[k].real();
          out[2 * k + 1] = x[k].imag();
        }
        return out;
      },
      [&](const std::vector<double>& x) {
        return detail::state_from_orthonormal(twice_j, detail::to_complex(x));
      },
      /*maximize=*/true);
}

struct ScanRow {
  int n = 0;
  double q = 0.0;
  double max_ratio = 0.0;
  int violations = 0;
};

struct ScanReport {
  int twice_j = 0;
  double p = 0.0;
  int num_samples = 0;
  std::uint64_t seed = 0;
  std::vector<ScanRow> rows;

  int total_violations() const {
    int total = 0;
    for (const auto& r : rows) total += r.violations;
    return total;
  }
};

// For n = 1..n_max and random normalized states, tabulates the worst ratio
// nnorm_{p+n/j} / nnorm_p and counts violations of the <= 1 + 1e-9 bound.
inline ScanReport monotonicity_scan(int twice_j, double p, int n_max, int num_samples,
                                    std::uint64_t seed, const QuadratureRule& rule) {
  SpinQuantumNumber jj(twice_j);
  if (!(p >= 1.0)) throw std::invalid_argument("monotonicity_scan: p must be >= 1");
  if (!(p > 2.0 / twice_j)) {
    throw std::invalid_argument("monotonicity_scan: requires p > 1/j");
  }
  if (n_max < 1) throw std::invalid_argument("monotonicity_scan: n_max must be >= 1");
  if (num_samples < 1) throw std::invalid_argument("monotonicity_scan: num_samples must be >= 1");

  ScanReport report;
  report.twice_j = twice_j;
  report.p = p;
  report.num_samples = num_samples;
  report.seed = seed;
  report.rows.resize(n_max);
  for (int n = 1; n <= n_max; ++n) {
    report.rows[n - 1].n = n;
    report.rows[n - 1].q = p + 2.0 * n / twice_j;
    report.rows[n - 1].max_ratio = 0.0;
  }
  for (int s = 0; s < num_samples; ++s) {
    const SpinState f = detail::random_state_stream(twice_j, seed, s);
    const double np = normalized_p_norm(f, p, rule);
    for (int n = 1; n <= n_max; ++n) {
      const double nq = normalized_p_norm(f, report.rows[n - 1].q, rule);
      const double ratio = nq / np;
      auto& row = report.rows[n - 1];
      row.max_ratio = std::max(row.max_ratio, ratio);
      if (nq > np + 1e-9) ++row.violations;
    }
  }
  return report;
}

}  // namespace wehrl
