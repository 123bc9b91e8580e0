#pragma once

#include <vector>

#include "sphere_growth/maps.hpp"

namespace sphere_growth {

/// Orbits of entire maps stop once an iterate leaves this disk.
inline constexpr double kEscapeRadius = 1e100;

enum class OrbitStatus { Complete, Saturated, CriticalHit };

struct OrbitTrace {
  std::vector<SpherePoint> points;   // w_0 .. w_k
  std::vector<double> log_factors;   // log chordal_deriv(f, w_j) for each step taken
  double log_chordal_sum = 0.0;      // sum of log_factors, -inf on CriticalHit
  OrbitStatus status = OrbitStatus::Complete;
  int status_step = 0;               // step at which Saturated/CriticalHit occurred
};

/// Rejects tan-family iteration beyond a single application.
void check_iterable(const MapSpec& map, int n);

OrbitTrace orbit(const MapSpec& map, ComplexPoint z, int n);
/// Rational maps only: orbits may start at infinity.
OrbitTrace orbit(const MapSpec& map, const SpherePoint& z, int n);

/// log of |(f^n)'(z)|^2 / (1 + |f^n(z)|^2)^2 through the chordal telescoping
/// product. -inf at critical hits; throws SaturatedOrbit for escaped orbits.
double log_density(const MapSpec& map, ComplexPoint z, int n);

/// Allocation-free orbit summary used by the quadrature kernels.
struct OrbitSummary {
  double log_chordal_sum = 0.0;
  OrbitStatus status = OrbitStatus::Complete;
  SphereVector image{};  // f^n(start) on the unit sphere, north pole once saturated
};

OrbitSummary summarize_orbit(const MapSpec& map, const ChartPoint& start, int n);
OrbitSummary summarize_orbit(const MapSpec& map, ComplexPoint start, int n);

}  // namespace sphere_growth
