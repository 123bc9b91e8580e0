// Acceptance criteria, one PASS/FAIL line each. Exit status is the number of
// failed lines.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../oracles.hpp"
#include "sphere_growth/characteristics.hpp"
#include "sphere_growth/classifier.hpp"
#include "sphere_growth/quadrature.hpp"

using namespace sphere_growth;
using C = std::complex<double>;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double time_limit_s;  // 0: none
  std::function<Outcome()> run;
};

const MapSpec z2 = MapSpec::polynomial({0.0, 0.0, 1.0});
const MapSpec z3 = MapSpec::polynomial({0.0, 0.0, 0.0, 1.0});
const MapSpec z3z = MapSpec::polynomial({0.0, 1.0, 0.0, 1.0});
const MapSpec exp_map = MapSpec::exp_family();
const MapSpec cos_map = MapSpec::cos_family();

struct Case {
  std::string label;
  MapSpec map;
  int n;
  Region region;
  Tolerance tol;
};

// Adaptive values reused by the Monte-Carlo comparison.
std::map<std::string, AreaEstimate> adaptive_cache;

AreaEstimate adaptive(const Case& c) {
  auto it = adaptive_cache.find(c.label);
  if (it != adaptive_cache.end()) return it->second;
  const AreaEstimate a = spherical_area(c.map, c.n, c.region, c.tol);
  adaptive_cache.emplace(c.label, a);
  return a;
}

std::vector<Case> sphere_cases() {
  return {{"z^2 n=1 sphere", z2, 1, Region::whole_sphere(), Tolerance{}},
          {"z^3 n=1 sphere", z3, 1, Region::whole_sphere(), Tolerance{}},
          {"z^2 n=2 sphere", z2, 2, Region::whole_sphere(), Tolerance{}}};
}

std::vector<Case> identity_cases() {
  return {{"id D(0,1)", z2, 0, Region::disk(0.0, 1.0), Tolerance{}},
          {"id D(0,2)", z2, 0, Region::disk(0.0, 2.0), Tolerance{}}};
}

std::vector<Case> covering_cases() {
  std::vector<Case> v;
  for (int n = 1; n <= 4; ++n) {
    v.push_back({fmt::format("z^2 n={} D(0,0.4)", n), z2, n, Region::disk(0.0, 0.4), Tolerance{0.0, 1e-6, 12}});
  }
  return v;
}

std::string fmt_g(double v) { return fmt::format("{:.6g}", v); }

Outcome sphere_degree() {
  const double expected[] = {2.0, 3.0, 4.0};
  const double tol[] = {1e-3, 1e-3, 1e-2};
  bool pass = true;
  std::string d;
  const auto cases = sphere_cases();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const AreaEstimate a = adaptive(cases[i]);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Each case has its own 30 s limit.
    pass = pass && std::abs(a.value - expected[i]) <= tol[i] && secs < 30.0;
    d += fmt::format("{}{}={:.7f} in {:.1f}s", i ? "; " : "", cases[i].label, a.value, secs);
  }
  return {pass, d};
}

Outcome identity_closed_form() {
  bool pass = true;
  std::string d;
  for (const Case& c : identity_cases()) {
    const double r = std::get<Disk>(c.region.shape()).r;
    const double exact = r * r / (1.0 + r * r);
    const AreaEstimate a = adaptive(c);
    pass = pass && std::abs(a.value - exact) <= 1e-6;
    d += fmt::format("{}{} err={:.2e}", d.empty() ? "" : "; ", c.label, a.value - exact);
  }
  return {pass, d};
}

Outcome degree_law(const MapSpec& f, double lo, double hi) {
  const DegreeEstimate e = estimate_log_degree(f, 1.0, 0.1, 8);
  if (!e.log_d) return {false, "slope undefined"};
  return {*e.log_d >= lo && *e.log_d <= hi, fmt::format("log_d={:.5f} in [{}, {}]", *e.log_d, lo, hi)};
}

Outcome covering_closed_form() {
  bool pass = true;
  double prev = std::numeric_limits<double>::infinity();
  std::string d;
  for (const Case& c : covering_cases()) {
    const AreaEstimate a = adaptive(c);
    const double exact = oracle::monomial_disk_area(2, c.n, 0.4);
    const double rel = std::abs(a.value / exact - 1.0);
    pass = pass && rel <= 0.01 && a.value < prev;
    prev = a.value;
    d += fmt::format("{}n={} rel={:.1e}", d.empty() ? "" : "; ", c.n, rel);
  }
  return {pass, d};
}

struct Named {
  const char* name;
  MapSpec map;
};
const std::vector<Named> catalog = {{"exp", exp_map}, {"cos", cos_map}, {"z^2", z2}, {"z^3+z", z3z}};
const std::vector<double> radii = {0.5, 1.0, 2.0, 4.0};

Outcome shimizu() {
  bool pass = true;
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& [name, f] : catalog) {
    for (const ShimizuRow& row : check_shimizu_identity(f, 1, radii)) {
      pass = pass && row.slack >= -1e-3;
      if (row.slack < worst) {
        worst = row.slack;
        where = fmt::format("{} r={}", name, row.r);
      }
    }
  }
  return {pass, fmt::format("min slack {:.4g} at {}", worst, where)};
}

Outcome sandwich() {
  bool pass = true;
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& [name, f] : catalog) {
    for (double r : radii) {
      const SandwichReport s = check_modulus_sandwich(f, r, 2.0 * r);
      pass = pass && s.pass;
      const double slack = std::min(s.left_slack, s.right_slack);
      if (slack < worst) {
        worst = slack;
        where = fmt::format("{} r={}", name, r);
      }
    }
  }
  return {pass, fmt::format("min slack {:.3g} at {}", worst, where)};
}

Outcome covering_inequality() {
  const auto [U, V] = monomial_covering_instance(2);
  bool pass = true;
  std::string d;
  for (const CoveringRow& row : check_covering_inequality(z2, 1, U, V, {1, 2, 3, 4})) {
    pass = pass && row.pass;
    d += fmt::format("{}n={} {:.5g}>={:.5g}", d.empty() ? "" : "; ", row.n, row.lhs, row.rhs);
  }
  return {pass, d};
}

Outcome non_effective() {
  const Region u = Region::disk(2.0, 0.25);
  const double e1 = euclidean_area(z2, 1, u, Tolerance{}).value;
  const double e4 = euclidean_area(z2, 4, u, Tolerance{}).value;
  double s_max = 0.0;
  for (int n = 1; n <= 6; ++n) s_max = std::max(s_max, spherical_area(z2, n, u, Tolerance{}).value);
  return {e4 >= 10.0 * e1 && s_max < 1.1,
          fmt::format("Euclidean n=4/n=1 = {:.4g}; max spherical n<=6 = {:.4g}", e4 / e1, s_max)};
}

Outcome proximity_oracle() {
  double worst = 0.0;
  for (double r : {1.0, 2.0, 4.0, 8.0}) worst = std::max(worst, std::abs(m_of_r(exp_map, r) - r / std::numbers::pi));
  return {worst <= 1e-8, fmt::format("max |m - r/pi| = {:.2e}", worst)};
}

Outcome growth_ratio() {
  const std::vector<double> grid = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  double worst = 0.0;
  for (const auto& row : growth_d(exp_map, 1, grid).rows) {
    worst = std::max(worst, row.ratio ? std::abs(*row.ratio - 2.0) : INFINITY);
  }
  bool above = true;
  double lowest = INFINITY;
  for (const auto& row : growth_d(exp_map, 2, {1.0, 2.0, 4.0, 8.0, 16.0}).rows) {
    above = above && row.ratio && *row.ratio > 2.0;
    if (row.ratio) lowest = std::min(lowest, *row.ratio);
  }
  return {worst <= 1e-10 && above, fmt::format("k=1 max |ratio-2| = {:.1e}; k=2 min ratio = {:.4g}", worst, lowest)};
}

Outcome monte_carlo() {
  bool pass = true;
  double worst = 0.0;
  std::string where;
  std::vector<Case> all = sphere_cases();
  for (auto v : {identity_cases(), covering_cases()}) all.insert(all.end(), v.begin(), v.end());
  for (const Case& c : all) {
    const AreaEstimate a = adaptive(c);
    const McEstimate m = mc_area(c.map, c.n, c.region, 1000000, 42);
    const double z = std::abs(a.value - m.value) / m.std_error;
    pass = pass && z <= 3.0;
    if (z > worst) {
      worst = z;
      where = c.label;
    }
  }
  return {pass, fmt::format("{} cases, max |adaptive - mc| = {:.2f} std errors ({})", all.size(), worst, where)};
}

Outcome grid_reproduction() {
  GridJob job;
  const GridResult g = render_grid(z2, job);
  const double band = job.r + 0.05;
  std::size_t scored = 0, agree = 0, julia_in_band = 0, band_nodes = 0;
  for (int j = 0; j < job.ny; ++j) {
    for (int i = 0; i < job.nx; ++i) {
      const double m = std::abs(job.node(i, j));
      const VerdictKind k = g.at(i, j).kind;
      if (m > 1.0 - band && m < 1.0 + band) {
        ++scored;
        ++band_nodes;
        agree += k == VerdictKind::Julia;
        julia_in_band += k == VerdictKind::Julia;
      } else if (m < 0.8 || m > 1.25) {
        ++scored;
        agree += k == VerdictKind::Fatou;
      }
    }
  }
  const double share = static_cast<double>(agree) / static_cast<double>(scored);
  return {share >= 0.90, fmt::format("agreement {:.4f} over {} scored nodes ({} of {} band nodes Julia)", share, scored,
                                     julia_in_band, band_nodes)};
}

Outcome exp_increments() {
  const GrowthSeries s = growth_series(exp_map, 1.0, 0.2, 5);
  std::string d;
  for (std::size_t i = 0; i < s.logS.size(); ++i) {
    d += fmt::format("{}{}{}", i ? ", " : "logS=", fmt_g(s.logS[i]), s.areas[i].flagged() ? "*" : "");
  }
  bool pass = true;
  double prev_inc = -INFINITY;
  for (std::size_t i = 1; i < s.logS.size(); ++i) {
    const double inc = s.logS[i] - s.logS[i - 1];
    pass = pass && inc > prev_inc;
    prev_inc = inc;
  }
  return {pass, d + " (* flagged)"};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<Criterion> criteria = {
      {"1", "sphere degree identity", 90.0, sphere_degree},
      {"2", "identity closed form", 5.0, identity_closed_form},
      {"3a", "degree law z^2", 120.0, [] { return degree_law(z2, 0.62, 0.77); }},
      {"3b", "degree law z^3", 120.0, [] { return degree_law(z3, 0.99, 1.21); }},
      {"4", "covering closed form", 60.0, covering_closed_form},
      {"5", "Shimizu bound", 120.0, shimizu},
      {"6", "modulus sandwich", 60.0, sandwich},
      {"7", "covering inequality", 60.0, covering_inequality},
      {"8", "Euclidean vs spherical area", 60.0, non_effective},
      {"9", "m(r, exp) = r/pi", 0.0, proximity_oracle},
      {"10", "growth ratio", 0.0, growth_ratio},
      {"11", "Monte-Carlo agreement", 0.0, monte_carlo},
      {"12", "z^2 grid reproduction", 600.0, grid_reproduction},
      {"exp", "exp at z=1 increments strictly increasing", 0.0, exp_increments},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt::format("{:.1f}s", secs);
    if (c.time_limit_s > 0.0) {
      timing += fmt::format(" of {:.0f}s", c.time_limit_s);
      if (secs > c.time_limit_s) {
        o.pass = false;
        timing += " EXCEEDED";
      }
    }
    failed += !o.pass;
    fmt::print("{} [{}] {}: {} ({})\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail, timing);
  }
  fmt::print("{} of {} failed\n", failed, criteria.size());
  return failed;
}
