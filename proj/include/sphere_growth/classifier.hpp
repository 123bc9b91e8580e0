#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sphere_growth/maps.hpp"
#include "sphere_growth/parallel.hpp"
#include "sphere_growth/quadrature.hpp"
#include "sphere_growth/region.hpp"

namespace sphere_growth {

struct GrowthFlags {
  bool saturated = false;
  bool max_depth_hit = false;
};

struct GrowthSeries {
  std::vector<int> n_values;
  std::vector<double> logS;  // log S(f^n, D(z, r)); -inf when the area underflows to 0
  std::vector<AreaEstimate> areas;
  std::optional<double> slope;  // least squares over the trailing window
  double r_used = 0.0;
  GrowthFlags flags;
  std::optional<int> first_saturated_n;
};

/// Least-squares slope of logS against n over the trailing ceil(len/2)
/// entries, skipping non-finite ones. Needs at least 3 finite values.
std::optional<double> trailing_slope(const std::vector<int>& n_values, const std::vector<double>& logS);

/// Default quadrature settings for growth series: slopes need about four
/// digits, and tighter relative tolerances cost orders of magnitude more at
/// large n.
Tolerance growth_tolerance();

GrowthSeries growth_series(const MapSpec& map, ComplexPoint z, double r, int n_max,
                           const Tolerance& tol = growth_tolerance(), Parallelism par = {});

struct Thresholds {
  double tau_J = 0.2;   // slope above which growth counts as exponential
  double V_min = 10.0;  // minimal growth factor S_last / S_first
  double B_F = 1e3;     // bound on S for a Fatou verdict
};

enum class VerdictKind { Julia, Fatou, Inconclusive };

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::string reason;  // set for Inconclusive

  static Verdict julia() { return {VerdictKind::Julia, {}}; }
  static Verdict fatou() { return {VerdictKind::Fatou, {}}; }
  static Verdict inconclusive(std::string why) { return {VerdictKind::Inconclusive, std::move(why)}; }
  friend bool operator==(const Verdict& a, const Verdict& b) { return a.kind == b.kind && a.reason == b.reason; }
};

std::string to_string(const Verdict& v);

Verdict classify_point(const GrowthSeries& series, const Thresholds& th = {});

/// Classifies at r and at r/2; disagreement degrades to Inconclusive.
Verdict classify_two_radius(const MapSpec& map, ComplexPoint z, double r, int n_max,
                            const Tolerance& tol = growth_tolerance(),
                            const Thresholds& th = {}, Parallelism par = {});

struct DegreeEstimate {
  std::optional<double> log_d;
  GrowthSeries series;
};

/// Trailing-window slope of log S(f^n, D(z, r)), n = 1..n_max.
DegreeEstimate estimate_log_degree(const MapSpec& map, ComplexPoint z, double r, int n_max,
                                   const Tolerance& tol = growth_tolerance(), Parallelism par = {});

/// Escape-time iteration of z^2 + c; true once |z| exceeds bailout.
bool escape_oracle(ComplexPoint c, ComplexPoint z, int n_max, double bailout = 4.0);

/// Quadrature settings that keep a 64x64 grid in the minutes range.
Tolerance grid_tolerance();

struct GridJob {
  Region rect = Region::rect({-1.5, -1.5}, {1.5, 1.5});
  int nx = 64;
  int ny = 64;
  double r = 0.05;
  int n_max = 6;
  Tolerance tol = grid_tolerance();
  Thresholds thresholds;

  void validate() const;
  /// Node (i, j): column i from the left, row j from the top, at cell centers.
  ComplexPoint node(int i, int j) const;
};

/// Row-major, row 0 is the top (largest imaginary part).
struct GridResult {
  int nx = 0;
  int ny = 0;
  std::vector<Verdict> verdicts;
  std::vector<std::optional<double>> slopes;

  const Verdict& at(int i, int j) const { return verdicts[static_cast<std::size_t>(j) * nx + i]; }
};

GridResult render_grid(const MapSpec& map, const GridJob& job, Parallelism par = {});

/// PGM (P2), gray 0 = Fatou, 128 = Inconclusive, 255 = Julia.
std::string to_pgm(const GridResult& g, const std::string& comment = {});
/// One CSV row per grid row, slopes in %.17g, empty cell when undefined.
std::string slopes_csv(const GridResult& g);

}  // namespace sphere_growth
