#include "sphere_growth/orbit.hpp"

#include <cmath>
#include <limits>

#include "sphere_growth/errors.hpp"

namespace sphere_growth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogEscape = std::log(kEscapeRadius);

struct NoRecord {
  void point(const SpherePoint&) {}
  void factor(double) {}
};

struct TraceRecord {
  OrbitTrace* trace;
  void point(const SpherePoint& p) { trace->points.push_back(p); }
  void factor(double f) { trace->log_factors.push_back(f); }
};

template <class Record>
OrbitSummary rational_kernel(const MapSpec& map, ChartPoint w, int n, Record rec, int* status_step) {
  OrbitSummary s;
  for (int k = 0; k < n; ++k) {
    const auto step = map.rational_step(w);
    rec.factor(step.log_factor);
    if (step.log_factor == -kInf) {
      s.log_chordal_sum = -kInf;
      s.status = OrbitStatus::CriticalHit;
      *status_step = k;
      s.image = to_vector(w);
      return s;
    }
    s.log_chordal_sum += step.log_factor;
    w = step.next;
    rec.point(w.to_sphere());
  }
  s.image = to_vector(w);
  return s;
}

template <class Record>
OrbitSummary transcendental_kernel(const MapSpec& map, ComplexPoint w, int n, Record rec, int* status_step) {
  OrbitSummary s;
  for (int k = 0; k < n; ++k) {
    const auto step = map.transcendental_step(w, kLogEscape);
    rec.factor(step.log_factor);
    if (step.log_factor == -kInf) {
      s.log_chordal_sum = -kInf;
      s.status = OrbitStatus::CriticalHit;
      *status_step = k;
      s.image = to_vector(ChartPoint::from(w));
      return s;
    }
    s.log_chordal_sum += step.log_factor;
    if (map.kind() == MapKind::Tan) {
      // Single application only; a pole lands exactly on infinity.
      const SpherePoint next = step.next ? SpherePoint(*step.next) : SpherePoint::infinity();
      rec.point(next);
      s.image = to_vector(ChartPoint::from(next));
      return s;
    }
    if (!step.next) {
      s.status = OrbitStatus::Saturated;
      *status_step = k + 1;
      s.image = north_pole();
      return s;
    }
    w = *step.next;
    rec.point(SpherePoint(w));
  }
  s.image = to_vector(ChartPoint::from(w));
  return s;
}

OrbitTrace finish(const OrbitSummary& s, OrbitTrace trace, int status_step) {
  trace.log_chordal_sum = s.log_chordal_sum;
  trace.status = s.status;
  trace.status_step = status_step;
  return trace;
}

}  // namespace

void check_iterable(const MapSpec& map, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "iteration count must be non-negative");
  if (map.kind() == MapKind::Tan && n >= 2) {
    throw Error(ErrorKind::MeromorphicIterationUnsupported,
                "tan family supports a single application only (pre-poles make deeper iterates unbounded)");
  }
}

OrbitTrace orbit(const MapSpec& map, ComplexPoint z, int n) {
  check_iterable(map, n);
  OrbitTrace trace;
  trace.points.push_back(SpherePoint(z));
  int status_step = 0;
  const OrbitSummary s = map.is_rational()
                             ? rational_kernel(map, ChartPoint::from(z), n, TraceRecord{&trace}, &status_step)
                             : transcendental_kernel(map, z, n, TraceRecord{&trace}, &status_step);
  return finish(s, std::move(trace), status_step);
}

OrbitTrace orbit(const MapSpec& map, const SpherePoint& z, int n) {
  if (z.is_finite()) return orbit(map, z.value(), n);
  if (!map.is_rational()) throw Error(ErrorKind::EntireAtInfinity, "orbit of a transcendental map from infinity");
  check_iterable(map, n);
  OrbitTrace trace;
  trace.points.push_back(z);
  int status_step = 0;
  const OrbitSummary s = rational_kernel(map, ChartPoint::from(z), n, TraceRecord{&trace}, &status_step);
  return finish(s, std::move(trace), status_step);
}

double log_density(const MapSpec& map, ComplexPoint z, int n) {
  check_iterable(map, n);
  const OrbitSummary s = summarize_orbit(map, z, n);
  if (s.status == OrbitStatus::CriticalHit) return -kInf;
  if (s.status == OrbitStatus::Saturated) {
    throw Error(ErrorKind::SaturatedOrbit, "orbit left the escape disk before step n");
  }
  return 2.0 * s.log_chordal_sum - 2.0 * std::log1p(std::norm(z));
}

OrbitSummary summarize_orbit(const MapSpec& map, const ChartPoint& start, int n) {
  int unused = 0;
  if (map.is_rational()) return rational_kernel(map, start, n, NoRecord{}, &unused);
  const SpherePoint p = start.to_sphere();
  if (p.is_infinity()) throw Error(ErrorKind::EntireAtInfinity, "orbit of a transcendental map from infinity");
  return transcendental_kernel(map, p.value(), n, NoRecord{}, &unused);
}

OrbitSummary summarize_orbit(const MapSpec& map, ComplexPoint start, int n) {
  int unused = 0;
  if (map.is_rational()) return rational_kernel(map, ChartPoint::from(start), n, NoRecord{}, &unused);
  return transcendental_kernel(map, start, n, NoRecord{}, &unused);
}

}  // namespace sphere_growth
