#pragma once

// The gradient/norm identity at the heart of the norm bound:
//
//   int |d|f|^{q/2}|^2 d^2z/pi  =  (qj/4) int |f|^q dmu,
//
// where d is the complex Wirtinger derivative, together with its
// epsilon-regularized form and the variational functionals built from it.
// The regularized identity reads LHS(eps) = RHS(eps) - E(eps) with the
// error term E(eps) below; this sign is fixed by integration by parts and
// verified numerically (see the regularized-identity tests).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wehrl/entropy.hpp"
#include "wehrl/sphere.hpp"
#include "wehrl/states.hpp"

namespace wehrl {

struct CarlenCheck {
  double lhs = 0.0;           // flat-measure gradient integral
  double rhs = 0.0;           // (qj/4) int |f|^q dmu
  double rel_residual = 0.0;  // |lhs - rhs| / max(|rhs|, 1e-300)
};

namespace detail {

// |d[(|P|^2+eps)^{q/4} (1+|z|^2)^{-qj/2}]|^2 at a finite point, from
//   d(...) = (q/4)(|P|^2+eps)^{q/4-1} conj(P) P' (1+|z|^2)^{-qj/2}
//          - (qj/2)(|P|^2+eps)^{q/4} conj(z) (1+|z|^2)^{-qj/2-1}.
inline double grad_sq_regularized(const SpinState& f, double q, Complex z, double eps) {
  const double j = f.j();
  const Complex P = f.poly(z);
  const Complex Pd = f.poly_derivative(z);
  const double m2 = std::norm(P) + eps;
  const double conf = 1.0 + std::norm(z);
  const double cpow = std::pow(conf, -0.25 * q * j);  // conf^{-qj/4}, split to avoid overflow
  const Complex grad = (0.25 * q) * std::pow(m2, 0.25 * q - 1.0) * std::conj(P) * Pd * (cpow * cpow) -
                       (0.5 * q * j) * std::pow(m2, 0.25 * q) * std::conj(z) * (cpow * cpow / conf);
  return std::norm(grad);
}

}  // namespace detail

// |d|f|^{q/2}|^2 evaluated analytically.  Exactly at a polynomial zero the
// factor |P|^{q/2-2} is singular for q < 4; that is a numeric-domain error.
inline double abs_power_gradient_sq(const SpinState& f, double q, const SpherePoint& p) {
  if (!(q > 0.0)) throw std::invalid_argument("abs_power_gradient_sq: q must be > 0");
  if (p.infinite) throw std::invalid_argument("abs_power_gradient_sq: point must be finite");
  const Complex P = f.poly(p.z);
  if (std::norm(P) == 0.0 && q < 4.0) {
    throw numeric_domain_error("abs_power_gradient_sq: evaluation at a zero of the polynomial part");
  }
  return detail::grad_sq_regularized(f, q, p.z, 0.0);
}

// lhs = int_flat |d|f|^{q/2}|^2 and rhs = (qj/4) int |f|^q dmu on the same
// rule.  Nodes ending up essentially on a polynomial zero (|P|^2 < 1e-24)
// are re-evaluated with the eps-regularized integrand at eps = 1e-30, which
// mirrors the regularization used to prove the identity.
inline CarlenCheck carlen_residual(const SpinState& f, double q, const QuadratureRule& rule) {
  if (!(q > 0.0)) throw std::invalid_argument("carlen_residual: q must be > 0");
  const double qj = q * f.j();
  CarlenCheck out;
  out.lhs = integrate_flat(rule, [&](const SpherePoint& p) {
    const double m2 = std::norm(f.poly(p.z));
    const double eps = (m2 < 1e-24) ? 1e-30 : 0.0;
    return detail::grad_sq_regularized(f, q, p.z, eps);
  });
  out.rhs = 0.25 * qj *
            integrate_invariant(rule, [&](const SpherePoint& p) {
              return Complex(std::pow(husimi(f, p), 0.5 * q), 0.0);
            }).real();
  out.rel_residual = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.rhs), 1e-300);
  return out;
}

// E(eps) = (eps q / 8) int (|P|^2+eps)^{q/2-2} |P'|^2 (1+|z|^2)^{-qj} d^2z/pi.
inline double carlen_epsilon_error(const SpinState& f, double q, double eps,
                                   const QuadratureRule& rule) {
  if (!(q > 0.0)) throw std::invalid_argument("carlen_epsilon_error: q must be > 0");
  if (eps < 0.0) throw std::invalid_argument("carlen_epsilon_error: eps must be >= 0");
  if (eps == 0.0) return 0.0;
  const double qj = q * f.j();
  return 0.125 * eps * q *
         integrate_flat(rule, [&](const SpherePoint& p) {
           const double m2 = std::norm(f.poly(p.z)) + eps;
           const double conf = 1.0 + std::norm(p.z);
           return std::pow(m2, 0.5 * q - 2.0) * std::norm(f.poly_derivative(p.z)) *
                  std::pow(conf, -qj);
         });
}

struct RegularizedCarlen {
  double lhs = 0.0;
  double rhs = 0.0;
  double error_term = 0.0;  // identity: lhs = rhs - error_term
};

// All three pieces of the regularized identity on one rule.
inline RegularizedCarlen carlen_regularized(const SpinState& f, double q, double eps,
                                            const QuadratureRule& rule) {
  if (!(q > 0.0)) throw std::invalid_argument("carlen_regularized: q must be > 0");
  if (eps < 0.0) throw std::invalid_argument("carlen_regularized: eps must be >= 0");
  const double qj = q * f.j();
  RegularizedCarlen out;
  out.lhs = integrate_flat(rule, [&](const SpherePoint& p) {
    return detail::grad_sq_regularized(f, q, p.z, eps);
  });
  out.rhs = 0.25 * qj *
            integrate_invariant(rule, [&](const SpherePoint& p) {
              const double m2 = std::norm(f.poly(p.z)) + eps;
              const double conf = 1.0 + std::norm(p.z);
              return Complex(std::pow(m2, 0.5 * q) * std::pow(conf, -qj), 0.0);
            }).real();
  out.error_term = carlen_epsilon_error(f, q, eps, rule);
  return out;
}

// J(u) = ||u||_2^2 - (4/(qj(qj+2))) int |d u|^2 d^2z/pi with u = |f|^{q/2};
// coherent vectors give 1/(qj+2) when ||f||_2 = 1.
inline double variational_functional(const SpinState& f, double q, const ExponentPair& exponents,
                                     const QuadratureRule& rule) {
  if (std::abs(q - exponents.q) > 1e-12) {
    throw std::invalid_argument("variational_functional: q must match exponents.q");
  }
  const double qj = q * f.j();
  const double u22 = detail::power_integral_dispatch(f, q, rule);
  const double grad = integrate_flat(rule, [&](const SpherePoint& p) {
    const double m2 = std::norm(f.poly(p.z));
    const double eps = (m2 < 1e-24) ? 1e-30 : 0.0;
    return detail::grad_sq_regularized(f, q, p.z, eps);
  });
  return u22 - 4.0 / (qj * (qj + 2.0)) * grad;
}

struct Step1Ratios {
  double ratio_plain = 0.0;   // plain_q(f)^q / plain_p(f)^q
  double ratio_carlen = 0.0;  // same value, rewritten through the identity
};

// The two algebraic routes to the optimization ratio; they agree identically
// for every state, which is what the check verifies.
inline Step1Ratios step1_ratio_check(const SpinState& f, const ExponentPair& exponents,
                                     const QuadratureRule& rule) {
  if (norm2(f) == 0.0) throw std::invalid_argument("step1_ratio_check: zero state");
  const double p = exponents.p;
  const double q = exponents.q;
  const double qj = q * f.j();
  const double nq_q = detail::power_integral_dispatch(f, q, rule);             // plain_q^q
  const double np_q = std::pow(detail::power_integral_dispatch(f, p, rule), q / p);  // plain_p^q
  const double grad = integrate_flat(rule, [&](const SpherePoint& pt) {
    const double m2 = std::norm(f.poly(pt.z));
    const double eps = (m2 < 1e-24) ? 1e-30 : 0.0;
    return detail::grad_sq_regularized(f, q, pt.z, eps);
  });
  Step1Ratios out;
  out.ratio_plain = nq_q / np_q;
  out.ratio_carlen = (nq_q - 4.0 / (qj * (qj + 2.0)) * grad) / ((1.0 - 1.0 / (qj + 2.0)) * np_q);
  return out;
}

}  // namespace wehrl
