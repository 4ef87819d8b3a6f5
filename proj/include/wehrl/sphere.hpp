#pragma once

// Integration on the Riemann sphere S = C u {inf} in stereographic
// coordinates.  Two measures appear throughout the library:
//
//   invariant:  dmu(z) = d^2z / (pi (1+|z|^2)^2)     (total mass 1)
//   flat:       d^2z / pi
//
// A product rule (Gauss-Legendre in x = cos(theta), uniform in azimuth)
// discretizes the invariant measure; the flat measure is reached by
// reweighting with (1+|z|^2)^2.  Exact rational moment integrals serve as
// oracles for everything built on top.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wehrl {

using Complex = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Thrown when an integrand or evaluation leaves the numeric domain
// (non-finite value, evaluation at a pole, ...).
class numeric_domain_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point on the Riemann sphere: either a finite complex coordinate or the
// point at infinity.
struct SpherePoint {
  Complex z{0.0, 0.0};
  bool infinite = false;

  SpherePoint() = default;
  SpherePoint(Complex value) : z(value) {}  // NOLINT: implicit by design
  SpherePoint(double re, double im) : z(re, im) {}

  static SpherePoint infinity() {
    SpherePoint p;
    p.infinite = true;
    return p;
  }

  bool is_finite() const { return !infinite; }

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return a.z == b.z;
  }
};

// antipode: z -> -1/conj(z), with 0 <-> inf.  An involution.
inline SpherePoint antipode(const SpherePoint& p) {
  if (p.infinite) return SpherePoint(0.0, 0.0);
  if (p.z == Complex(0.0, 0.0)) return SpherePoint::infinity();
  return SpherePoint(-1.0 / std::conj(p.z));
}

// Chordal distance on the sphere of diameter 2 (embedding radius 1).
inline double chordal_distance(const SpherePoint& a, const SpherePoint& b) {
  const auto lift = [](const SpherePoint& p) {
    return p.infinite ? 0.0 : 1.0 / std::sqrt(1.0 + std::norm(p.z));
  };
  if (a.infinite && b.infinite) return 0.0;
  if (a.infinite) return 2.0 * lift(b);
  if (b.infinite) return 2.0 * lift(a);
  return 2.0 * std::abs(a.z - b.z) * lift(a) * lift(b);
}

namespace detail {

// Deterministic pairwise summation; the reduction tree depends only on n,
// so results are reproducible for a fixed rule regardless of the caller.
template <typename T>
T pairwise_sum(const T* data, std::size_t n) {
  if (n <= 16) {
    T acc{};
    for (std::size_t i = 0; i < n; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

// Gauss-Legendre nodes/weights on (-1, 1) by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int mid = (n + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    // Tricomi-style initial guess, then Newton.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * pp * pp);
  }
}

}  // namespace detail

// Product quadrature for the invariant probability measure.  Nodes are
// z = tan(theta/2) e^{i phi} with x = cos(theta) at Gauss-Legendre points
// and phi uniform; all nodes are finite and avoid z = 0 and infinity.
struct QuadratureRule {
  std::vector<Complex> nodes;
  std::vector<double> weights;
  int n_polar = 0;
  int n_azimuth = 0;

  std::size_t size() const { return nodes.size(); }
};

inline QuadratureRule build_quadrature(int n_polar, int n_azimuth) {
  if (n_polar < 2) throw std::invalid_argument("build_quadrature: n_polar must be >= 2");
  if (n_azimuth < 4) throw std::invalid_argument("build_quadrature: n_azimuth must be >= 4");
  std::vector<double> xs, ws;
  detail::gauss_legendre(n_polar, xs, ws);
  QuadratureRule rule;
  rule.n_polar = n_polar;
  rule.n_azimuth = n_azimuth;
  rule.nodes.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  rule.weights.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  for (int i = 0; i < n_polar; ++i) {
    // r = tan(theta/2) = sqrt((1-x)/(1+x)) for x = cos(theta) in (-1,1).
    const double r = std::sqrt((1.0 - xs[i]) / (1.0 + xs[i]));
    const double w = ws[i] / (2.0 * n_azimuth);
    for (int k = 0; k < n_azimuth; ++k) {
      const double phi = 2.0 * M_PI * k / n_azimuth;
      rule.nodes.emplace_back(r * std::cos(phi), r * std::sin(phi));
      rule.weights.push_back(w);
    }
  }
  return rule;
}

// int g dmu  ~=  sum_i w_i g(z_i).
template <typename F>
Complex integrate_invariant(const QuadratureRule& rule, F&& g) {
  std::vector<Complex> terms(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Complex v = g(SpherePoint(rule.nodes[i]));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw numeric_domain_error("integrate_invariant: non-finite integrand at node " +
                                 std::to_string(i) + " (z = " + std::to_string(rule.nodes[i].real()) +
                                 " + " + std::to_string(rule.nodes[i].imag()) + "i)");
    }
    terms[i] = rule.weights[i] * v;
  }
  return detail::pairwise_sum(terms);
}

// int g d^2z/pi  ~=  sum_i w_i (1+|z_i|^2)^2 g(z_i).
template <typename F>
double integrate_flat(const QuadratureRule& rule, F&& g) {
  std::vector<double> terms(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double conf = 1.0 + std::norm(rule.nodes[i]);
    const double v = g(SpherePoint(rule.nodes[i]));
    if (!std::isfinite(v)) {
      throw numeric_domain_error("integrate_flat: non-finite integrand at node " +
                                 std::to_string(i) + " (z = " + std::to_string(rule.nodes[i].real()) +
                                 " + " + std::to_string(rule.nodes[i].imag()) + "i)");
    }
    terms[i] = rule.weights[i] * conf * conf * v;
  }
  return detail::pairwise_sum(terms);
}

namespace detail {

inline BigInt factorial_big(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

// Exact moment of the invariant measure:
//   int |z|^{2k} / (1+|z|^2)^m dmu(z) = int_0^inf t^k (1+t)^{-m-2} dt
//                                     = k! (m-k)! / (m+1)!
// Arbitrary-precision integer arithmetic, valid for 0 <= k <= m.
inline Rational exact_moment(int k, int m) {
  if (k < 0 || m < 0) throw std::invalid_argument("exact_moment: negative index");
  if (k > m) throw std::invalid_argument("exact_moment: k > m gives a divergent integral");
  return Rational(detail::factorial_big(k) * detail::factorial_big(m - k),
                  detail::factorial_big(m + 1));
}

// Double-precision moment; exact rational up to m = 4096.  Beyond that the
// value is accumulated as a paired product i/(m-k+i) in extended precision
// (a plain exp(lgamma...) difference only reaches ~1e-11 at this scale, the
// log values being ~1e4); relative error <= 1e-13.
inline double moment_value(int k, int m) {
  if (k < 0 || m < 0) throw std::invalid_argument("moment_value: negative index");
  if (k > m) throw std::invalid_argument("moment_value: k > m gives a divergent integral");
  if (m <= 4096) return static_cast<double>(exact_moment(k, m));
  long double acc = 1.0L / (m + 1.0L);
  for (int i = 1; i <= k; ++i) acc *= static_cast<long double>(i) / (m - k + i);
  return static_cast<double>(acc);
}

}  // namespace wehrl
