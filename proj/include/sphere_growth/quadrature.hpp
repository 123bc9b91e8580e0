#pragma once

#include <cstdint>
#include <string>

#include "sphere_growth/maps.hpp"
#include "sphere_growth/parallel.hpp"
#include "sphere_growth/region.hpp"

namespace sphere_growth {

struct Tolerance {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  int max_depth = 12;  // quadtree levels, at most 24

  void validate() const;
};

struct AreaEstimate {
  double value = 0.0;
  double error_est = 0.0;
  std::size_t cells = 0;
  bool max_depth_hit = false;
  std::size_t saturated_cells = 0;
  bool overflow = false;

  /// Saturated orbits contribute only their partial product.
  bool is_lower_bound() const { return saturated_cells > 0; }
  bool flagged() const { return max_depth_hit || saturated_cells > 0 || overflow; }
};

/// Ahlfors-Shimizu area S(f^n, U): (1/pi) times the integral of the
/// spherical density over U. Adaptive quadtree, deterministic for any
/// worker count.
AreaEstimate spherical_area(const MapSpec& map, int n, const Region& region, const Tolerance& tol,
                            Parallelism par = {});

/// Same rules with the refinement pattern frozen: every cell is split down to
/// `depth`. The sample points then scale with the region, so the result is a
/// smooth function of a disk's radius. error_est compares the last two levels.
AreaEstimate spherical_area_uniform(const MapSpec& map, int n, const Region& region, int depth,
                                    Parallelism par = {});

/// (1/pi) times the integral of |(f^n)'|^2 over U.
AreaEstimate euclidean_area(const MapSpec& map, int n, const Region& region, const Tolerance& tol,
                            Parallelism par = {});

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Stratified Monte Carlo cross-check of spherical_area: floor(sqrt(samples))^2
/// strata over the bounding box, one uniform draw each.
McEstimate mc_area(const MapSpec& map, int n, const Region& region, std::size_t samples, std::uint64_t seed);

/// value,error_est,cells,flags with flags joined by '|' (or "none").
std::string csv_header_area();
std::string to_csv_row(const AreaEstimate& a);
std::string flags_string(const AreaEstimate& a);

}  // namespace sphere_growth
