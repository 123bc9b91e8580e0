#pragma once

// Reference computations that avoid the library's log-space kernels.

#include <cmath>
#include <complex>
#include <utility>

#include "sphere_growth/maps.hpp"

namespace oracle {

using C = std::complex<double>;

// (f(z), f'(z)) by plain complex arithmetic.
inline std::pair<C, C> value_and_derivative(const sphere_growth::MapSpec& f, C z) {
  using sphere_growth::MapKind;
  const C l = f.lambda();
  switch (f.kind()) {
    case MapKind::Exp: {
      const C e = std::exp(l * z);
      return {e, l * e};
    }
    case MapKind::Sin: return {std::sin(l * z), l * std::cos(l * z)};
    case MapKind::Cos: return {std::cos(l * z), -l * std::sin(l * z)};
    case MapKind::Tan: {
      const C c = std::cos(l * z);
      return {std::tan(l * z), l / (c * c)};
    }
    default: break;
  }
  C p = 0.0, dp = 0.0, q = 0.0, dq = 0.0;
  const auto& a = f.numerator().coeffs();
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  const auto& b = f.denominator().coeffs();
  for (auto it = b.rbegin(); it != b.rend(); ++it) {
    dq = dq * z + q;
    q = q * z + *it;
  }
  return {p / q, (dp * q - p * dq) / (q * q)};
}

// (f^n(z), (f^n)'(z)) by the chain rule.
inline std::pair<C, C> iterate_with_derivative(const sphere_growth::MapSpec& f, C z, int n) {
  C w = z, d = 1.0;
  for (int k = 0; k < n; ++k) {
    const auto [v, dv] = value_and_derivative(f, w);
    d *= dv;
    w = v;
  }
  return {w, d};
}

// |(f^n)'(z)|^2 / (1 + |f^n(z)|^2)^2.
inline double density(const sphere_growth::MapSpec& f, C z, int n) {
  const auto [w, d] = iterate_with_derivative(f, z, n);
  const double s = 1.0 + std::norm(w);
  return std::norm(d) / (s * s);
}

// Spherical derivative (1+|z|^2)|g'(z)|/(1+|g(z)|^2) of g = f^n.
inline double spherical_derivative(const sphere_growth::MapSpec& f, C z, int n) {
  const auto [w, d] = iterate_with_derivative(f, z, n);
  return (1.0 + std::norm(z)) * std::abs(d) / (1.0 + std::norm(w));
}

// (1/pi) times the integral of g over the disk D(c, r), by a midpoint rule in
// polar coordinates.
template <class G>
double polar_disk_mean(G g, C c, double r, int nr, int nt) {
  const double pi = std::acos(-1.0);
  double sum = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double rho = (i + 0.5) * r / nr;
    for (int j = 0; j < nt; ++j) {
      const double t = (j + 0.5) * 2.0 * pi / nt;
      sum += g(c + std::polar(rho, t)) * rho;
    }
  }
  return sum * (r / nr) * (2.0 * pi / nt) / pi;
}

// S(z^(2^n), D(0, a)) for the 2^n-fold cover of D(0, a^(2^n)).
inline double monomial_disk_area(int d, int n, double a) {
  const double s = std::pow(a, std::pow(d, n));
  return std::pow(d, n) * s * s / (1.0 + s * s);
}

}  // namespace oracle
