#pragma once

// Normalized p-norms, Wehrl and Renyi-Wehrl entropies, and the two lower
// bounds they are tested against.
//
// Two normalizations coexist in this module and must not be conflated:
//
//   nnorm_p(f)  = ((pj+1) int |f|^p dmu)^{1/p}    (coherent vectors have
//                                                  nnorm_p = 1 for every p)
//   plain_p(f)  = (int |f|^p dmu)^{1/p}           (norm of the probability
//                                                  measure, nnorm/(pj+1)^{1/p})
//
// The entropies use nnorm; the interpolation/endpoint-differentiation
// machinery uses plain_p.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wehrl/sphere.hpp"
#include "wehrl/states.hpp"

namespace wehrl {

struct ExponentPair {
  double p = 1.0;
  double q = 1.0;
  std::optional<int> lattice_n;  // set when q = p + n/j by construction

  ExponentPair(double p_, double q_) : p(p_), q(q_) {
    if (!(p >= 1.0)) throw std::invalid_argument("ExponentPair: p must be >= 1");
    if (!(q >= p)) throw std::invalid_argument("ExponentPair: q must be >= p");
  }

  // q = p + n/j on the proven lattice.
  static ExponentPair lattice(double p, int n, int twice_j) {
    if (n < 0) throw std::invalid_argument("ExponentPair::lattice: n must be >= 0");
    ExponentPair e(p, p + 2.0 * n / twice_j);
    e.lattice_n = n;
    return e;
  }

  bool on_lattice(int twice_j, double tol = 1e-12) const {
    if (!lattice_n) return false;
    return std::abs(q - p - 2.0 * (*lattice_n) / twice_j) <= tol;
  }
};

namespace detail {

inline bool is_even_integer(double p) {
  const double r = std::round(p);
  return std::abs(p - r) <= 1e-12 && static_cast<long long>(r) % 2 == 0;
}

// int |f|^p dmu for even integer p, by expanding Q = P^{p/2} and summing the
// diagonal moments a!(pj-a)!/(pj+1)!.  Exact up to rounding.
inline double even_power_integral(const SpinState& f, int p) {
  const int half = p / 2;
  std::vector<Complex> Q = {Complex(1.0, 0.0)};
  for (int i = 0; i < half; ++i) Q = convolve(Q, f.coeffs);
  const int pj = half * f.twice_j();  // = p*j, an integer here
  std::vector<double> terms(Q.size());
  for (std::size_t a = 0; a < Q.size(); ++a) {
    terms[a] = std::norm(Q[a]) * moment_value(static_cast<int>(a), pj);
  }
  return pairwise_sum(terms);
}

// int |f|^p dmu by quadrature.
inline double power_integral(const SpinState& f, double p, const QuadratureRule& rule) {
  const std::size_t n = rule.size();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = std::norm(evaluate(f, SpherePoint(rule.nodes[i])));
    terms[i] = rule.weights[i] * std::pow(a2, 0.5 * p);
  }
  return pairwise_sum(terms);
}

inline double power_integral_dispatch(const SpinState& f, double p, const QuadratureRule& rule) {
  if (is_even_integer(p)) return even_power_integral(f, static_cast<int>(std::round(p)));
  return power_integral(f, p, rule);
}

inline void require_normalized(const SpinState& f, const char* where) {
  const double n = norm2(f);
  if (std::abs(n - 1.0) > 1e-10) {
    throw std::invalid_argument(std::string(where) + ": state must satisfy ||f||_2 = 1, got ||f||_2 = " +
                                std::to_string(n));
  }
}

}  // namespace detail

// nnorm_p(f) = ((pj+1) int |f|^p dmu)^{1/p}.  Even integer p bypasses the
// rule through the exact moment expansion.
inline double normalized_p_norm(const SpinState& f, double p, const QuadratureRule& rule) {
  if (!(p >= 1.0)) throw std::invalid_argument("normalized_p_norm: p must be >= 1");
  const double pj = p * f.j();
  return std::pow((pj + 1.0) * detail::power_integral_dispatch(f, p, rule), 1.0 / p);
}

// plain_p(f) = (int |f|^p dmu)^{1/p}, the norm w.r.t. the rotation-invariant
// probability measure.
inline double plain_p_norm(const SpinState& f, double p, const QuadratureRule& rule) {
  if (!(p > 0.0)) throw std::invalid_argument("plain_p_norm: p must be > 0");
  return std::pow(detail::power_integral_dispatch(f, p, rule), 1.0 / p);
}

// Wehrl entropy S_j(|f|^2) = -(2j+1) int |f|^2 ln |f|^2 dmu for ||f||_2 = 1.
// The integrand x ln x is extended by its limit 0 at x = 0; quadrature nodes
// never sit exactly on polynomial zeros, but underflow is clamped.
inline double wehrl_entropy(const SpinState& f, const QuadratureRule& rule) {
  detail::require_normalized(f, "wehrl_entropy");
  const std::size_t n = rule.size();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = std::norm(evaluate(f, SpherePoint(rule.nodes[i])));
    terms[i] = (a2 < 1e-300) ? 0.0 : rule.weights[i] * a2 * std::log(a2);
  }
  return -(f.twice_j() + 1.0) * detail::pairwise_sum(terms);
}

// Renyi-Wehrl entropy of index q/2 in the normalized convention:
// (2/(2-q)) ln(nnorm_q^q).  Vanishes exactly on coherent vectors.
inline double renyi_wehrl(const SpinState& f, double q, const QuadratureRule& rule) {
  if (!(q > 2.0)) throw std::invalid_argument("renyi_wehrl: q must be > 2");
  detail::require_normalized(f, "renyi_wehrl");
  const double nq = normalized_p_norm(f, q, rule);
  return (2.0 / (2.0 - q)) * q * std::log(nq);
}

// Mixed-state extension: rho(z) = sum_k |f_k(z)|^2 for an orthogonal family
// with sum ||f_k||_2^2 = 1.
inline double mixed_wehrl(const MixedState& mixed, const QuadratureRule& rule) {
  if (mixed.members.empty()) throw std::invalid_argument("mixed_wehrl: empty family");
  const int tj = mixed.members.front().twice_j();
  double total = 0.0;
  for (std::size_t k = 0; k < mixed.members.size(); ++k) {
    if (mixed.members[k].twice_j() != tj) {
      throw std::invalid_argument("mixed_wehrl: members must share one twice_j");
    }
    total += inner_product(mixed.members[k], mixed.members[k]).real();
    for (std::size_t l = k + 1; l < mixed.members.size(); ++l) {
      if (std::abs(inner_product(mixed.members[k], mixed.members[l])) > 1e-10) {
        throw std::invalid_argument("mixed_wehrl: members must be pairwise orthogonal");
      }
    }
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("mixed_wehrl: sum of squared norms must be 1, got " +
                                std::to_string(total));
  }
  const std::size_t n = rule.size();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double rho = 0.0;
    for (const auto& f : mixed.members) rho += std::norm(evaluate(f, SpherePoint(rule.nodes[i])));
    terms[i] = (rho < 1e-300) ? 0.0 : rule.weights[i] * rho * std::log(rho);
  }
  return -(tj + 1.0) * detail::pairwise_sum(terms);
}

// Conjectured sharp bound 2j/(2j+1), attained on coherent vectors.
inline double lieb_bound(int twice_j) {
  SpinQuantumNumber jj(twice_j);
  return twice_j / (twice_j + 1.0);
}

// Proven bound 2j ln(1 + 1/(2j+1)); log1p keeps it stable for large j.
inline double theorem2_bound(int twice_j) {
  SpinQuantumNumber jj(twice_j);
  return twice_j * std::log1p(1.0 / (twice_j + 1.0));
}

struct EntropyReport {
  int twice_j = 0;
  double wehrl = 0.0;
  std::vector<std::pair<double, double>> renyi_values;  // (q, value)
  double thm2_bound = 0.0;
  double lieb_bound = 0.0;
  double slack_thm2 = 0.0;
  double slack_lieb = 0.0;
};

// Normalizes a copy of the state and assembles entropy, Renyi values at
// q in {2 + 1/j, 2 + 2/j, 4}, both bounds and their slacks.
inline EntropyReport entropy_report(const SpinState& f, const QuadratureRule& rule) {
  const SpinState g = normalized(f);
  EntropyReport rep;
  rep.twice_j = g.twice_j();
  rep.wehrl = wehrl_entropy(g, rule);
  const double inv_j = 2.0 / g.twice_j();
  for (double q : {2.0 + inv_j, 2.0 + 2.0 * inv_j, 4.0}) {
    rep.renyi_values.emplace_back(q, renyi_wehrl(g, q, rule));
  }
  rep.thm2_bound = theorem2_bound(g.twice_j());
  rep.lieb_bound = lieb_bound(g.twice_j());
  rep.slack_thm2 = rep.wehrl - rep.thm2_bound;
  rep.slack_lieb = rep.wehrl - rep.lieb_bound;
  return rep;
}

struct LogDerivativeCheck {
  double lhs = 0.0;  // s d/ds|_{s=2} plain_s(f)^s, by central differences
  double rhs = 0.0;  // int |f|^2 ln |f|^2 dmu, by quadrature
};

// Endpoint differentiation at s = 2: both sides of
//   s d/ds|_{s=2} (int |f|^s dmu) = int |f|^2 ln|f|^2 dmu
// returned for comparison; the finite difference is second order in ds.
inline LogDerivativeCheck norm_log_derivative_check(const SpinState& f, double ds,
                                                    const QuadratureRule& rule) {
  if (!(ds > 0.0 && ds <= 1e-3)) {
    throw std::invalid_argument("norm_log_derivative_check: need 0 < ds <= 1e-3");
  }
  detail::require_normalized(f, "norm_log_derivative_check");
  const double gp = detail::power_integral(f, 2.0 + ds, rule);
  const double gm = detail::power_integral(f, 2.0 - ds, rule);
  LogDerivativeCheck out;
  out.lhs = 2.0 * (gp - gm) / (2.0 * ds);
  const std::size_t n = rule.size();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = std::norm(evaluate(f, SpherePoint(rule.nodes[i])));
    terms[i] = (a2 < 1e-300) ? 0.0 : rule.weights[i] * a2 * std::log(a2);
  }
  out.rhs = detail::pairwise_sum(terms);
  return out;
}

}  // namespace wehrl
