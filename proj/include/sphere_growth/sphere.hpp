#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>

namespace sphere_growth {

using ComplexPoint = std::complex<double>;

/// A point of the Riemann sphere: either a finite complex number or infinity.
class SpherePoint {
 public:
  SpherePoint() = default;
  SpherePoint(ComplexPoint z) : value_(z) {}  // NOLINT: implicit by intent

  static SpherePoint infinity() {
    SpherePoint p;
    p.value_.reset();
    return p;
  }

  bool is_infinity() const { return !value_.has_value(); }
  bool is_finite() const { return value_.has_value(); }

  /// Precondition: is_finite().
  ComplexPoint value() const { return *value_; }

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) { return a.value_ == b.value_; }

 private:
  std::optional<ComplexPoint> value_ = ComplexPoint{};
};

/// Coordinates on the sphere in one of the two standard charts. The chart is
/// picked so that |coord| <= 1, which keeps every iterate representable: a
/// point w with |w| > 1 is stored as coord = 1/w with reciprocal = true, and
/// infinity is {0, true}.
struct ChartPoint {
  ComplexPoint coord{};
  bool reciprocal = false;

  static ChartPoint from(ComplexPoint z) {
    if (std::abs(z) <= 1.0) return {z, false};
    return {1.0 / z, true};
  }
  static ChartPoint from(const SpherePoint& p) {
    if (p.is_infinity()) return {ComplexPoint{}, true};
    return from(p.value());
  }

  SpherePoint to_sphere() const {
    if (!reciprocal) return SpherePoint(coord);
    if (coord == ComplexPoint{}) return SpherePoint::infinity();
    const ComplexPoint w = 1.0 / coord;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return SpherePoint::infinity();
    return SpherePoint(w);
  }
};

/// Unit vector in R^3 obtained by inverse stereographic projection.
using SphereVector = std::array<double, 3>;

inline SphereVector to_vector(const ChartPoint& p) {
  const double n2 = std::norm(p.coord);
  const double s = 1.0 + n2;
  if (!p.reciprocal) {
    return {2.0 * p.coord.real() / s, 2.0 * p.coord.imag() / s, (n2 - 1.0) / s};
  }
  // 1/u = conj(u)/|u|^2, so the first two components carry conj(u).
  return {2.0 * p.coord.real() / s, -2.0 * p.coord.imag() / s, (1.0 - n2) / s};
}

inline SphereVector north_pole() { return {0.0, 0.0, 1.0}; }

/// Chordal distance normalized so that antipodal points are at distance 1.
inline double chordal_distance(const SphereVector& a, const SphereVector& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return 0.5 * std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double chordal_distance(const SpherePoint& a, const SpherePoint& b) {
  return chordal_distance(to_vector(ChartPoint::from(a)), to_vector(ChartPoint::from(b)));
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// log(1 + |w|^2) given log|w|.
inline double log1p_sq_from_log(double log_abs) { return softplus(2.0 * log_abs); }

}  // namespace sphere_growth
