#pragma once

#include <optional>
#include <vector>

#include "sphere_growth/maps.hpp"
#include "sphere_growth/parallel.hpp"
#include "sphere_growth/quadrature.hpp"

namespace sphere_growth {

/// Proximity function m(r, f^n): mean of log+|f^n| over |z| = r by the
/// periodic trapezoid rule (2^12 nodes, doubled to at most 2^16).
double m_of_r(const MapSpec& map, double r, int n = 1);

/// Integrated pole counting function N(r, f), evaluated exactly from the
/// pole list. Zero for entire maps.
double N_of_r(const MapSpec& map, double r);

/// Uniform quadtree depth for the S(t) samples inside T0.
inline constexpr int kT0Depth = 6;

struct T0Estimate {
  double value = 0.0;
  double error_est = 0.0;
  double tail = 0.0;  // closed-form estimate of the integral over (0, r*1e-4)
  int nodes = 0;
  bool converged = false;
  bool max_depth_hit = false;
  std::size_t saturated_cells = 0;
  bool overflow = false;
};

/// Ahlfors-Shimizu characteristic: integral of S(t, f^n)/t over (0, r).
/// Trapezoid in log t from 64 nodes, doubled with Romberg extrapolation
/// until the last two extrapolants agree to 1e-6. S(t) comes from the uniform-depth
/// rule so that it varies smoothly with t.
T0Estimate T0_of_r(const MapSpec& map, int n, double r, int depth = kT0Depth, Parallelism par = {});

struct CharacteristicsSample {
  double r = 0.0;
  double S_r = 0.0;
  double T0 = 0.0;
  double m = 0.0;
  double N = 0.0;
  double T = 0.0;         // m + N
  double logplusM = 0.0;  // NaN for the tan family
};

CharacteristicsSample characteristics_sample(const MapSpec& map, double r, const Tolerance& tol = {},
                                             Parallelism par = {});

struct ShimizuRow {
  double r = 0.0;
  double T0 = 0.0;
  double T = 0.0;
  double log_plus_f0 = 0.0;
  double deviation = 0.0;  // |T0 - T - log+|f(0)||
  double slack = 0.0;      // log(2)/2 - deviation
  double budget = 0.0;     // allowed negative slack
  bool pass = false;
};

/// |T0(r) - T(r) - log+|f(0)|| <= log(2)/2 at each radius, for f^n.
/// Rational iterates are expanded symbolically for m and N.
std::vector<ShimizuRow> check_shimizu_identity(const MapSpec& map, int n, const std::vector<double>& radii,
                                               int t0_depth = kT0Depth, Parallelism par = {});

struct SandwichReport {
  double r = 0.0;
  double R = 0.0;
  double T_r = 0.0;
  double T_R = 0.0;
  double log_plus_M = 0.0;
  double factor = 0.0;       // (R + r)/(R - r)
  double left_slack = 0.0;   // log+M(r) - T(r)
  double right_slack = 0.0;  // factor*T(R) - log+M(r)
  bool pass = false;
};

/// T(r) <= log+M(r) <= (R+r)/(R-r) T(R) for entire maps.
SandwichReport check_modulus_sandwich(const MapSpec& map, double r, double R);

/// log M(r, f^k). Uses the iterated recursion M^k when the maximum is known
/// to sit on the positive real axis (exp with lambda > 0, polynomials with
/// non-negative real coefficients) and a maximum over the circle otherwise.
IteratedModulus log_max_modulus_iterate(const MapSpec& map, int k, double r);

struct RatioDiagnostic {
  double r = 0.0;
  std::optional<double> ratio;  // log M(2r, f^k) / log M(r, f^k); empty when log M(r) <= 0
  int k_index = 1;
};

struct GrowthReport {
  std::vector<RatioDiagnostic> rows;
  std::optional<double> grid_min_proxy;  // finite-grid stand-in for the liminf
};

GrowthReport growth_d(const MapSpec& map, int k, const std::vector<double>& radii);

struct HadamardReport {
  double k = 0.0;
  std::optional<double> empirical_threshold;  // none: not found in the scan range
  bool dense_pass = false;
  double dense_min_margin = 0.0;  // min over pairs of log(M2/M1) - k log(r2/r1)
  double pair_margin = 0.0;       // the same quantity at (r1, r2)
  bool pair_pass = false;
  bool r1_above_threshold = false;
};

/// M(r2)/M(r1) >= (r2/r1)^k, with the smallest radius beyond which it holds
/// found by scanning 0.5..64.
HadamardReport hadamard_ratio_check(const MapSpec& map, double k, double r1, double r2);

struct LoglogGapReport {
  std::vector<double> g;  // g_n for n = 1..computed
  bool truncated = false;
  bool increasing = false;  // strictly, from n = 2 on
  std::optional<double> empirical_threshold;
  bool r0_above_threshold = false;
};

/// g_n = (1/n) log log(M^n(r1)/M^n(r0)) with M^n the iterated maximum modulus.
LoglogGapReport iterate_loglog_gap(const MapSpec& map, double r0, double r1, int n_max);

struct CoveringRow {
  int n = 0;
  double lhs = 0.0;  // S(f^{n+k}, U)
  double rhs = 0.0;  // S(f^n, V)
  double budget = 0.0;
  bool pass = false;
  bool flagged = false;
};

/// S(f^{n+k}, U) >= S(f^n, V) whenever V lies inside f^k(U).
std::vector<CoveringRow> check_covering_inequality(const MapSpec& map, int k, const Region& U, const Region& V,
                                                   const std::vector<int>& n_values, const Tolerance& tol = {},
                                                   Parallelism par = {});

/// For f = z^d: U = Annulus(0, 1, 2) and V = Annulus(0, 1.1, 2^d - 0.1), so
/// that V sits inside f(U) = Annulus(0, 1, 2^d).
std::pair<Region, Region> monomial_covering_instance(int d);

}  // namespace sphere_growth
