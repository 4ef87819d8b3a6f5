#pragma once

// The Hilbert space F_j of a single spin: a state is a conformal factor
// (1+|z|^2)^{-j} times a polynomial of degree at most 2j,
//
//   f(z) = (1+|z|^2)^{-j} sum_{k=0}^{2j} c_k z^k,
//
// with the inner product <f,g> = (2j+1)/pi int conj(f) g d^2z/(1+|z|^2)^2.
// Evaluation, the reproducing kernel, coherent vectors, the SU(2) Moebius
// action, the Husimi density and the root (stellar) parametrization all
// live here.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wehrl/sphere.hpp"

namespace wehrl {

// j in (1/2) N, stored doubled so half-integers stay exact.
struct SpinQuantumNumber {
  int twice_j;

  explicit SpinQuantumNumber(int tj) : twice_j(tj) {
    if (tj < 1) throw std::invalid_argument("SpinQuantumNumber: twice_j must be >= 1");
  }
  double j() const { return 0.5 * twice_j; }
  int dim() const { return twice_j + 1; }
};

namespace detail {

// Exact binomial coefficient, returned as a double (correct to rounding).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  BigInt b = 1;
  for (int i = 1; i <= k; ++i) {
    b *= (n - k + i);
    b /= i;
  }
  return static_cast<double>(b);
}

inline std::vector<Complex> convolve(const std::vector<Complex>& a,
                                     const std::vector<Complex>& b) {
  std::vector<Complex> out(a.size() + b.size() - 1, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) out[i + k] += a[i] * b[k];
  return out;
}

}  // namespace detail

struct SpinState {
  SpinQuantumNumber jj{1};
  std::vector<Complex> coeffs{Complex(1.0, 0.0), Complex(0.0, 0.0)};  // c_0 .. c_{2j}

  SpinState() = default;
  SpinState(SpinQuantumNumber j_, std::vector<Complex> c) : jj(j_), coeffs(std::move(c)) {}

  int twice_j() const { return jj.twice_j; }
  double j() const { return jj.j(); }

  // Polynomial part P(z) = sum c_k z^k and its derivative, by Horner.
  Complex poly(Complex z) const {
    Complex acc(0.0, 0.0);
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
    return acc;
  }
  Complex poly_derivative(Complex z) const {
    Complex acc(0.0, 0.0);
    for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * z + double(k) * coeffs[k];
    return acc;
  }
};

inline SpinState make_state(int twice_j, std::vector<Complex> coeffs) {
  SpinQuantumNumber jj(twice_j);
  if (static_cast<int>(coeffs.size()) != jj.dim()) {
    throw std::invalid_argument("make_state: expected " + std::to_string(jj.dim()) +
                                " coefficients, got " + std::to_string(coeffs.size()));
  }
  return SpinState{jj, std::move(coeffs)};
}

// f(z), evaluated stably on the whole sphere.  For |z| > 1 the polynomial is
// summed in powers of 1/z against the bounded prefactor z^{2j}(1+|z|^2)^{-j},
// so huge |z| neither overflows nor loses the limit f(inf) = c_{2j}.
inline Complex evaluate(const SpinState& f, const SpherePoint& p) {
  const int n = f.twice_j();
  if (p.infinite) return f.coeffs.back();
  const Complex z = p.z;
  const double t = std::norm(z);
  if (t <= 1.0) {
    return f.poly(z) * std::pow(1.0 + t, -0.5 * n);
  }
  const Complex u = 1.0 / z;
  Complex acc(0.0, 0.0);
  for (int k = 0; k <= n; ++k) acc = acc * u + f.coeffs[k];
  // z^n (1+|z|^2)^{-n/2} = phase^n * (t/(1+t))^{n/2}; written via 1/t so that
  // |z| beyond 1e154 (where t itself overflows) still evaluates cleanly.
  const Complex phase = z / std::abs(z);
  const double mod = std::pow(1.0 / (1.0 + std::norm(u)), 0.5 * n);
  return acc * std::pow(phase, n) * mod;
}

inline double husimi(const SpinState& f, const SpherePoint& p) {
  return std::norm(evaluate(f, p));
}

// Reproducing kernel K(z,w) = (1+z conj(w))^{2j} (1+|z|^2)^{-j} (1+|w|^2)^{-j},
// with K(z,inf) = z^{2j}(1+|z|^2)^{-j} and K(inf,w) = conj(w)^{2j}(1+|w|^2)^{-j}.
inline Complex kernel(int twice_j, const SpherePoint& zp, const SpherePoint& wp) {
  const int n = SpinQuantumNumber(twice_j).twice_j;
  if (zp.infinite && wp.infinite) return Complex(1.0, 0.0);
  if (zp.infinite) {
    const double sw = std::hypot(1.0, std::abs(wp.z));
    return std::pow(std::conj(wp.z) / sw, n);
  }
  if (wp.infinite) {
    const double sz = std::hypot(1.0, std::abs(zp.z));
    return std::pow(zp.z / sz, n);
  }
  const double sz = std::hypot(1.0, std::abs(zp.z));
  const double sw = std::hypot(1.0, std::abs(wp.z));
  // (1 + z conj(w)) / (sz sw), assembled factor-by-factor so |z||w| ~ 1e300
  // cannot overflow in the numerator.
  const Complex base = (1.0 / sz) * (1.0 / sw) + (zp.z / sz) * (std::conj(wp.z) / sw);
  return std::pow(base, n);
}

// Coherent vector K(.,w):  c_k = C(2j,k) conj(w)^k (1+|w|^2)^{-j};
// for w = inf, c_k = delta_{k,2j}.
inline SpinState coherent_state(int twice_j, const SpherePoint& w) {
  SpinQuantumNumber jj(twice_j);
  std::vector<Complex> c(jj.dim(), Complex(0.0, 0.0));
  if (w.infinite) {
    c.back() = 1.0;
    return SpinState{jj, std::move(c)};
  }
  const double s = std::hypot(1.0, std::abs(w.z));
  const Complex a = std::conj(w.z) / s;  // |a| < 1
  const double b = 1.0 / s;              // 0 < b <= 1
  // c_k = C(2j,k) a^k b^{2j-k}
  for (int k = 0; k <= twice_j; ++k) {
    c[k] = detail::binomial(twice_j, k) * std::pow(a, k) * std::pow(b, twice_j - k);
  }
  return SpinState{jj, std::move(c)};
}

// Exact inner product <f,g> = sum_k conj(c_k) d_k / C(2j,k), conjugate linear
// in the first entry.  This closed form follows from the diagonal moments
// int |z|^{2k}(1+|z|^2)^{-2j} dmu = k!(2j-k)!/(2j+1)! and is used everywhere
// a machine-precision oracle is wanted instead of quadrature.
inline Complex inner_product(const SpinState& f, const SpinState& g) {
  if (f.twice_j() != g.twice_j()) {
    throw std::invalid_argument("inner_product: mismatched twice_j");
  }
  const int n = f.twice_j();
  Complex acc(0.0, 0.0);
  for (int k = 0; k <= n; ++k) {
    acc += std::conj(f.coeffs[k]) * g.coeffs[k] / detail::binomial(n, k);
  }
  return acc;
}

// ||f||_2 in the normalization of the space (coherent vectors have norm 1).
inline double norm2(const SpinState& f) {
  return std::sqrt(std::max(0.0, inner_product(f, f).real()));
}

inline SpinState normalized(const SpinState& f) {
  const double n = norm2(f);
  if (!(n > 0.0)) throw std::invalid_argument("normalized: zero state");
  SpinState out = f;
  for (auto& c : out.coeffs) c /= n;
  return out;
}

// An SU(2) element ((alpha, -conj(beta)), (beta, conj(alpha))).
struct SU2Element {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};

  SU2Element() = default;
  SU2Element(Complex a, Complex b) : alpha(a), beta(b) {
    const double s = std::norm(a) + std::norm(b);
    if (std::abs(s - 1.0) > 1e-12) {
      throw std::invalid_argument("SU2Element: |alpha|^2 + |beta|^2 must be 1");
    }
  }

  static SU2Element identity() { return SU2Element(); }

  // Matrix product (group law).
  friend SU2Element operator*(const SU2Element& g1, const SU2Element& g2) {
    SU2Element g;
    g.alpha = g1.alpha * g2.alpha - std::conj(g1.beta) * g2.beta;
    g.beta = g1.beta * g2.alpha + std::conj(g1.alpha) * g2.beta;
    return g;
  }

  // Moebius action on the sphere: z -> (alpha z - conj(beta)) / (beta z + conj(alpha)).
  SpherePoint moebius(const SpherePoint& p) const {
    if (p.infinite) {
      if (std::abs(beta) == 0.0) return SpherePoint::infinity();
      return SpherePoint(alpha / beta);
    }
    const Complex num = alpha * p.z - std::conj(beta);
    const Complex den = beta * p.z + std::conj(alpha);
    if (std::abs(den) == 0.0) return SpherePoint::infinity();
    return SpherePoint(num / den);
  }

  // Element whose Moebius map sends 0 to w.
  static SU2Element taking_origin_to(const SpherePoint& w) {
    if (w.infinite) return SU2Element(Complex(0.0, 0.0), Complex(-1.0, 0.0));
    const double s = std::hypot(1.0, std::abs(w.z));
    return SU2Element(Complex(1.0 / s, 0.0), -std::conj(w.z) / s);
  }
};

// The Moebius substitution combined with the unimodular multiplier.  The
// argument is transformed by the INVERSE matrix of g, so that T_{g1} T_{g2}
// = T_{g1 g2} and T_g moves coherent centers by the element's own Moebius
// map (T_g K(.,w) is collinear with K(., g w)).  Writing the inverse map
// u = (conj(alpha) z + conj(beta)) / (-beta z + alpha), the SU(2) identity
// |conj(alpha) z + conj(beta)|^2 + |beta z - alpha|^2 = 1 + |z|^2 turns
// (1+|u|^2)^{-j} into |{-beta} z + alpha|^{2j} (1+|z|^2)^{-j}; the phase of
// the unimodular multiplier promotes that modulus to the analytic factor
// (-beta z + alpha)^{2j}.  Hence
//
//   (T_g f)(z) = (1+|z|^2)^{-j} sum_k c_k (conj(alpha) z + conj(beta))^k
//                                         (-beta z + alpha)^{2j-k},
//
// a binomial convolution of the coefficients.  This holomorphic representative
// fixes the phase convention for the whole library.
inline SpinState apply_su2(const SU2Element& g, const SpinState& f) {
  const int n = f.twice_j();
  std::vector<std::vector<Complex>> low(n + 1), high(n + 1);
  low[0] = {Complex(1.0, 0.0)};
  high[0] = {Complex(1.0, 0.0)};
  const std::vector<Complex> la = {std::conj(g.beta), std::conj(g.alpha)};  // conj(alpha) z + conj(beta)
  const std::vector<Complex> hb = {g.alpha, -g.beta};                       // -beta z + alpha
  for (int k = 1; k <= n; ++k) {
    low[k] = detail::convolve(low[k - 1], la);
    high[k] = detail::convolve(high[k - 1], hb);
  }
  std::vector<Complex> out(n + 1, Complex(0.0, 0.0));
  for (int k = 0; k <= n; ++k) {
    if (f.coeffs[k] == Complex(0.0, 0.0)) continue;
    const auto term = detail::convolve(low[k], high[n - k]);
    for (int m = 0; m <= n; ++m) out[m] += f.coeffs[k] * term[m];
  }
  return SpinState{f.jj, std::move(out)};
}

namespace detail {

// Parlett-Reinsch style balancing by powers of two (norm-1 variant).
inline void balance(Eigen::MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  bool converged = false;
  while (!converged) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        r += std::abs(A(i, k));
        c += std::abs(A(k, i));
      }
      if (r == 0.0 || c == 0.0) continue;
      double f = 1.0;
      const double s = r + c;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c > r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s && f != 1.0) {
        converged = false;
        A.col(i) *= f;
        A.row(i) /= f;
      }
    }
  }
}

inline std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs) {
  // coeffs: c_0 .. c_d with c_d != 0.
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d == 0) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -coeffs[i] / coeffs[d];
  balance(companion);
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(companion, /*computeU=*/false);
  std::vector<Complex> roots(d);
  for (int i = 0; i < d; ++i) roots[i] = schur.matrixT()(i, i);
  return roots;
}

}  // namespace detail

// The 2j roots of the polynomial part, with (2j - degree) copies of the point
// at infinity appended.  Companion-matrix eigenvalues with balancing.
inline std::vector<SpherePoint> majorana_roots(const SpinState& f) {
  const int n = f.twice_j();
  double maxc = 0.0;
  for (const auto& c : f.coeffs) maxc = std::max(maxc, std::abs(c));
  if (maxc == 0.0) throw std::invalid_argument("majorana_roots: zero state");
  int degree = 0;
  for (int k = n; k >= 0; --k) {
    if (std::abs(f.coeffs[k]) > 1e-14 * maxc) {
      degree = k;
      break;
    }
  }
  std::vector<SpherePoint> roots;
  roots.reserve(n);
  if (degree > 0) {
    std::vector<Complex> trimmed(f.coeffs.begin(), f.coeffs.begin() + degree + 1);
    for (const auto& r : detail::polynomial_roots(trimmed)) roots.emplace_back(r);
  }
  for (int k = degree; k < n; ++k) roots.push_back(SpherePoint::infinity());
  return roots;
}

// Inverse of the root parametrization: the polynomial with the given finite
// roots (monic) and |roots at infinity| = 2j - degree, normalized to ||f||_2 = 1.
inline SpinState state_from_roots(int twice_j, const std::vector<SpherePoint>& roots) {
  SpinQuantumNumber jj(twice_j);
  if (static_cast<int>(roots.size()) != twice_j) {
    throw std::invalid_argument("state_from_roots: expected " + std::to_string(twice_j) +
                                " roots, got " + std::to_string(roots.size()));
  }
  std::vector<Complex> poly = {Complex(1.0, 0.0)};
  for (const auto& r : roots) {
    if (r.infinite) continue;
    poly = detail::convolve(poly, {-r.z, Complex(1.0, 0.0)});
  }
  std::vector<Complex> c(jj.dim(), Complex(0.0, 0.0));
  std::copy(poly.begin(), poly.end(), c.begin());
  return normalized(SpinState{jj, std::move(c)});
}

// Greedy clustering of sphere points by chordal distance; returns
// (representative, multiplicity) pairs.  Used to read off root multiplicities.
inline std::vector<std::pair<SpherePoint, int>> cluster_points(
    const std::vector<SpherePoint>& points, double tol = 1e-7) {
  std::vector<std::pair<SpherePoint, int>> clusters;
  for (const auto& p : points) {
    bool placed = false;
    for (auto& [rep, mult] : clusters) {
      if (chordal_distance(rep, p) <= tol) {
        ++mult;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.emplace_back(p, 1);
  }
  return clusters;
}

struct RootRotation {
  SpinState state;
  SU2Element g;
  bool all_roots_at_infinity = false;  // constant polynomial part (coherent at 0)
};

// Rotate one finite root of the polynomial part to infinity, so the image
// state vanishes there (leading coefficient zero).  States already vanishing
// at infinity come back unchanged with g = identity.
inline RootRotation rotate_root_to_infinity(const SpinState& f) {
  const int n = f.twice_j();
  double maxc = 0.0;
  for (const auto& c : f.coeffs) maxc = std::max(maxc, std::abs(c));
  if (maxc == 0.0) throw std::invalid_argument("rotate_root_to_infinity: zero state");
  if (std::abs(f.coeffs[n]) <= 1e-14 * maxc) {
    const auto roots = majorana_roots(f);
    const bool all_inf =
        std::all_of(roots.begin(), roots.end(), [](const SpherePoint& r) { return r.infinite; });
    return RootRotation{f, SU2Element::identity(), all_inf};
  }
  // Full degree: all 2j roots are finite.  Send the largest-modulus root r to
  // infinity with the element whose Moebius map has beta r + conj(alpha) = 0;
  // evaluating the image at infinity then lands on f(r) = 0.
  const auto roots = majorana_roots(f);
  Complex r = roots.front().z;
  for (const auto& rp : roots) {
    if (std::abs(rp.z) > std::abs(r)) r = rp.z;
  }
  const double s = std::hypot(1.0, std::abs(r));
  SU2Element g(-std::conj(r) / s, Complex(1.0 / s, 0.0));
  SpinState rotated = apply_su2(g, f);
  return RootRotation{std::move(rotated), g, false};
}

// Orthogonal family {f_k} with sum ||f_k||_2^2 = 1; the mixed-state density
// is rho(z) = sum_k |f_k(z)|^2.
struct MixedState {
  std::vector<SpinState> members;
};

}  // namespace wehrl
