#include "sphere_growth/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sphere_growth/errors.hpp"
#include "sphere_growth/orbit.hpp"

namespace sphere_growth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kLogEscapeStep = 700.0;

// Scan grid shared by the threshold searches: 0.5 * 2^(j/8) up to 64.
std::vector<double> scan_grid(int per_octave) {
  std::vector<double> g;
  const int steps = 7 * per_octave;
  for (int j = 0; j <= steps; ++j) g.push_back(0.5 * std::exp2(static_cast<double>(j) / per_octave));
  return g;
}

double log_plus(double v) { return v > 0.0 ? v : 0.0; }

// log|f^n(z)|; +inf once an intermediate iterate overflows.
double log_abs_iterate(const MapSpec& map, int n, ComplexPoint z) {
  if (n == 0) return std::log(std::abs(z));
  if (n == 1) return log_abs_eval(map, z);
  if (map.is_rational()) {
    ChartPoint w = ChartPoint::from(z);
    for (int k = 0; k < n; ++k) w = map.rational_step(w).next;
    const double lc = std::log(std::abs(w.coord));
    return w.reciprocal ? -lc : lc;
  }
  ComplexPoint w = z;
  for (int k = 0; k < n - 1; ++k) {
    const auto step = map.transcendental_step(w, kLogEscapeStep);
    if (!step.next) return kInf;
    w = *step.next;
  }
  return log_abs_eval(map, w);
}

// Poles of tan(lambda z): (pi/2 + k pi)/lambda.
template <class Fn>
void for_each_tan_pole_within(const MapSpec& map, double radius, Fn fn) {
  const double scale = std::abs(map.lambda());
  const double lim = radius * scale;
  for (long k = 0; kPi / 2.0 + static_cast<double>(k) * kPi < lim + 1.0; ++k) {
    const double a = kPi / 2.0 + static_cast<double>(k) * kPi;
    // +/- pairs: pi/2 + k pi and -(pi/2 + k pi)
    fn(a / scale);
    fn(a / scale);
  }
}

void check_circle_clear(const MapSpec& map, double r) {
  if (map.is_rational()) {
    for (const auto& q : map.poles()) {
      if (std::abs(std::abs(q.value) - r) < 1e-9) throw Error(ErrorKind::PoleOnCircle, "pole within 1e-9 of |z| = r");
    }
  } else if (map.kind() == MapKind::Tan) {
    for_each_tan_pole_within(map, r, [&](double p) {
      if (std::abs(p - r) < 1e-9) throw Error(ErrorKind::PoleOnCircle, "pole within 1e-9 of |z| = r");
    });
  }
}

// Maximum of a 2pi-periodic function: dense samples then golden section.
template <class Fn>
double maximize_on_circle(Fn g, int samples) {
  const double h = 2.0 * kPi / samples;
  int best = 0;
  double best_val = -kInf;
  for (int j = 0; j < samples; ++j) {
    const double v = g(h * j);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  if (!std::isfinite(best_val)) return best_val;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = h * (best - 1), b = h * (best + 1);
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = g(d);
    }
  }
  return std::max({best_val, gc, gd});
}

bool maximum_on_positive_axis(const MapSpec& map) {
  if (map.kind() == MapKind::Exp) return map.lambda().imag() == 0.0 && map.lambda().real() > 0.0;
  if (!map.is_polynomial()) return false;
  const ComplexPoint den = map.denominator().leading();
  if (den.imag() != 0.0 || den.real() <= 0.0) return false;
  return std::all_of(map.numerator().coeffs().begin(), map.numerator().coeffs().end(),
                     [](ComplexPoint c) { return c.imag() == 0.0 && c.real() >= 0.0; });
}

IteratedModulus from_log(double log_m) { return {log_m, log_m > 0.0 ? std::log(log_m) : -kInf}; }

void require_entire(const MapSpec& map, const char* what) {
  if (!map.is_entire()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " needs an entire map");
}

void require_transcendental_entire(const MapSpec& map, const char* what) {
  if (!map.is_entire() || map.is_rational()) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " needs a transcendental entire map");
  }
}

}  // namespace

double m_of_r(const MapSpec& map, double r, int n) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "radius must be positive and finite");
  check_iterable(map, n);
  if (map.is_rational() && n >= 2) return m_of_r(rational_iterate(map, n), r, 1);
  if (n >= 1) check_circle_clear(map, r);

  auto sample = [&](double theta) { return log_plus(log_abs_iterate(map, n, std::polar(r, theta))); };
  std::size_t nodes = 4096;
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) sum += sample(2.0 * kPi * static_cast<double>(j) / static_cast<double>(nodes));
  double value = sum / static_cast<double>(nodes);
  while (nodes < 65536) {
    // Midpoints of the current nodes complete the doubled rule.
    for (std::size_t j = 0; j < nodes; ++j) {
      sum += sample(2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(nodes));
    }
    nodes *= 2;
    const double next = sum / static_cast<double>(nodes);
    const double change = std::abs(next - value);
    value = next;
    if (change < 1e-9) break;
  }
  return value;
}

double N_of_r(const MapSpec& map, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "radius must be positive and finite");
  if (map.kind() == MapKind::Tan) {
    double acc = 0.0;
    for_each_tan_pole_within(map, r, [&](double p) {
      if (p < r) acc += std::log(r / p);
    });
    return acc;
  }
  if (!map.is_rational()) return 0.0;
  double acc = 0.0;
  for (const auto& p : map.poles()) {
    const double ap = std::abs(p.value);
    if (ap == 0.0) {
      acc += p.multiplicity * std::log(r);
    } else if (ap < r) {
      acc += p.multiplicity * std::log(r / ap);
    }
  }
  return acc;
}

T0Estimate T0_of_r(const MapSpec& map, int n, double r, int depth, Parallelism par) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "radius must be positive and finite");
  check_iterable(map, n);
  constexpr int kLevels = 5;
  const double lo = std::log(r * 1e-4), hi = std::log(r);

  std::vector<AreaEstimate> s;  // samples on the finest grid so far, index = node
  int nodes = 64;
  auto sample_at = [&](int idx, int count) {
    const double u = lo + (hi - lo) * static_cast<double>(idx) / static_cast<double>(count - 1);
    return spherical_area_uniform(map, n, Region::disk(0.0, std::exp(u)), depth, Parallelism{1});
  };
  s.resize(static_cast<std::size_t>(nodes));
  parallel_for(s.size(), par, [&](std::size_t i) { s[i] = sample_at(static_cast<int>(i), nodes); });

  auto trapezoid = [&](const std::vector<AreaEstimate>& v) {
    const double h = (hi - lo) / static_cast<double>(v.size() - 1);
    double acc = 0.0, err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double w = (i == 0 || i + 1 == v.size()) ? 0.5 * h : h;
      acc += w * v[i].value;
      err += w * v[i].error_est;
    }
    return std::pair{acc, err};
  };

  std::vector<std::vector<double>> romberg;
  romberg.push_back({trapezoid(s).first});
  T0Estimate out;
  double change = kInf;
  for (int level = 1; level < kLevels; ++level) {
    const int fine = 2 * nodes - 1;
    std::vector<AreaEstimate> next(static_cast<std::size_t>(fine));
    for (int i = 0; i < nodes; ++i) next[static_cast<std::size_t>(2 * i)] = s[static_cast<std::size_t>(i)];
    parallel_for(static_cast<std::size_t>(nodes - 1), par, [&](std::size_t i) {
      next[2 * i + 1] = sample_at(static_cast<int>(2 * i + 1), fine);
    });
    s = std::move(next);
    nodes = fine;
    std::vector<double> row{trapezoid(s).first};
    for (int j = 1; j <= level; ++j) {
      const double f = std::pow(4.0, j);
      row.push_back(row[j - 1] + (row[j - 1] - romberg.back()[j - 1]) / (f - 1.0));
    }
    change = std::abs(row.back() - row[row.size() - 2]);
    romberg.push_back(std::move(row));
    if (change <= 1e-6 * std::max(1.0, std::abs(romberg.back().back()))) {
      out.converged = true;
      break;
    }
  }

  // S(t) ~ c t^2 below the first node, so the tail integral is S(t_min)/2.
  out.tail = 0.5 * s.front().value;
  out.value = romberg.back().back() + out.tail;
  out.error_est = trapezoid(s).second + change + s.front().error_est;
  out.nodes = nodes;
  for (const auto& a : s) {
    out.max_depth_hit = out.max_depth_hit || a.max_depth_hit;
    out.saturated_cells += a.saturated_cells;
    out.overflow = out.overflow || a.overflow;
  }
  return out;
}

CharacteristicsSample characteristics_sample(const MapSpec& map, double r, const Tolerance& tol, Parallelism par) {
  CharacteristicsSample c;
  c.r = r;
  c.S_r = spherical_area(map, 1, Region::disk(0.0, r), tol, par).value;
  c.T0 = T0_of_r(map, 1, r, kT0Depth, par).value;
  c.m = m_of_r(map, r);
  c.N = N_of_r(map, r);
  c.T = c.m + c.N;
  c.logplusM = map.kind() == MapKind::Tan ? std::numeric_limits<double>::quiet_NaN()
                                          : log_plus(log_max_modulus(map, r));
  return c;
}

std::vector<ShimizuRow> check_shimizu_identity(const MapSpec& map, int n, const std::vector<double>& radii,
                                               int t0_depth, Parallelism par) {
  check_iterable(map, n);
  const double f0 = log_abs_iterate(map, n, 0.0);
  if (f0 == kInf) throw Error(ErrorKind::InvalidArgument, "f(0) must be finite");
  const MapSpec counted = (map.is_rational() && n != 1) ? rational_iterate(map, n) : map;
  std::vector<ShimizuRow> rows;
  for (double r : radii) {
    ShimizuRow row;
    row.r = r;
    const T0Estimate t0 = T0_of_r(map, n, r, t0_depth, par);
    row.T0 = t0.value;
    row.T = m_of_r(map, r, n) + (map.is_rational() || n == 1 ? N_of_r(counted, r) : 0.0);
    row.log_plus_f0 = log_plus(f0);
    row.deviation = std::abs(row.T0 - row.T - row.log_plus_f0);
    row.slack = 0.5 * std::log(2.0) - row.deviation;
    row.budget = 2.0 * t0.error_est + 1e-6;
    row.pass = row.slack >= -row.budget;
    rows.push_back(row);
  }
  return rows;
}

SandwichReport check_modulus_sandwich(const MapSpec& map, double r, double R) {
  require_entire(map, "modulus sandwich");
  if (!(r > 0.0) || !(R > r)) throw Error(ErrorKind::InvalidArgument, "need 0 < r < R");
  SandwichReport s;
  s.r = r;
  s.R = R;
  s.T_r = m_of_r(map, r);
  s.T_R = m_of_r(map, R);
  s.log_plus_M = log_plus(log_max_modulus(map, r));
  s.factor = (R + r) / (R - r);
  s.left_slack = s.log_plus_M - s.T_r;
  s.right_slack = s.factor * s.T_R - s.log_plus_M;
  const double budget = 1e-8 * (1.0 + s.log_plus_M);
  s.pass = s.left_slack >= -budget && s.right_slack >= -budget;
  return s;
}

IteratedModulus log_max_modulus_iterate(const MapSpec& map, int k, double r) {
  require_entire(map, "maximum modulus of an iterate");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  if (k == 1) return from_log(log_max_modulus(map, r));
  if (maximum_on_positive_axis(map)) return iterated_max_modulus(map, r, k).back();
  const double v = maximize_on_circle([&](double t) { return log_abs_iterate(map, k, std::polar(r, t)); }, 1024);
  if (std::isfinite(v)) return from_log(v);
  // The composed map overflows somewhere on the circle; M^k bounds it above.
  return iterated_max_modulus(map, r, k).back();
}

GrowthReport growth_d(const MapSpec& map, int k, const std::vector<double>& radii) {
  require_entire(map, "growth_d");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  GrowthReport rep;
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
    RatioDiagnostic d;
    d.r = r;
    d.k_index = k;
    const IteratedModulus a = log_max_modulus_iterate(map, k, r);
    const IteratedModulus b = log_max_modulus_iterate(map, k, 2.0 * r);
    if (a.log_m > 1e-12) {
      double ratio = std::isfinite(a.log_m) && std::isfinite(b.log_m) ? b.log_m / a.log_m
                                                                       : std::exp(b.loglog_m - a.loglog_m);
      if (std::isfinite(ratio)) d.ratio = ratio;
    }
    if (d.ratio && (!rep.grid_min_proxy || *d.ratio < *rep.grid_min_proxy)) rep.grid_min_proxy = d.ratio;
    rep.rows.push_back(d);
  }
  return rep;
}

HadamardReport hadamard_ratio_check(const MapSpec& map, double k, double r1, double r2) {
  require_transcendental_entire(map, "hadamard_ratio_check");
  if (!(r1 > 0.0) || !(r2 > r1)) throw Error(ErrorKind::InvalidArgument, "need 0 < r1 < r2");
  HadamardReport rep;
  rep.k = k;
  auto margin = [&](double a, double b, double la, double lb) { return lb - la - k * std::log(b / a); };

  const std::vector<double> grid = scan_grid(8);
  std::vector<double> L(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) L[i] = log_max_modulus(map, grid[i]);
  std::size_t first_ok = grid.size();
  for (std::size_t i = grid.size() - 1; i-- > 0;) {
    if (margin(grid[i], grid[i + 1], L[i], L[i + 1]) < 0.0) break;
    first_ok = i;
  }
  // One scan step of margin: the scan only checks pairs of grid neighbours,
  // and the first passing pair can straddle the true crossing.
  if (first_ok + 1 < grid.size() - 1) {
    rep.empirical_threshold = grid[first_ok + 1];
    // Consecutive margins add up, so checking neighbours covers every pair.
    const std::vector<double> dense = scan_grid(32);
    double prev_r = 0.0, prev_l = 0.0;
    bool have_prev = false;
    rep.dense_min_margin = kInf;
    for (double t : dense) {
      if (t < *rep.empirical_threshold) continue;
      const double lt = log_max_modulus(map, t);
      if (have_prev) rep.dense_min_margin = std::min(rep.dense_min_margin, margin(prev_r, t, prev_l, lt));
      prev_r = t;
      prev_l = lt;
      have_prev = true;
    }
    rep.dense_pass = rep.dense_min_margin >= 0.0;
    rep.r1_above_threshold = r1 >= *rep.empirical_threshold;
  }
  rep.pair_margin = margin(r1, r2, log_max_modulus(map, r1), log_max_modulus(map, r2));
  rep.pair_pass = rep.pair_margin >= 0.0;
  return rep;
}

LoglogGapReport iterate_loglog_gap(const MapSpec& map, double r0, double r1, int n_max) {
  require_transcendental_entire(map, "iterate_loglog_gap");
  if (!(r0 > 0.0) || !(r1 > r0)) throw Error(ErrorKind::InvalidArgument, "need 0 < r0 < r1");
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 1");
  LoglogGapReport rep;

  const std::vector<double> grid = scan_grid(8);
  std::optional<double> threshold;
  for (std::size_t i = grid.size(); i-- > 0;) {
    if (!(log_max_modulus(map, grid[i]) > std::log(grid[i]))) break;
    threshold = grid[i];
  }
  rep.empirical_threshold = threshold;
  rep.r0_above_threshold = threshold && r0 >= *threshold;

  const auto a = iterated_max_modulus(map, r0, n_max);
  const auto b = iterated_max_modulus(map, r1, n_max);
  for (int i = 0; i < n_max; ++i) {
    const double L0 = a[static_cast<std::size_t>(i)].log_m, L1 = b[static_cast<std::size_t>(i)].log_m;
    const double LL0 = a[static_cast<std::size_t>(i)].loglog_m, LL1 = b[static_cast<std::size_t>(i)].loglog_m;
    double log_gap;
    if (std::isfinite(L0) && std::isfinite(L1)) {
      log_gap = std::log(L1 - L0);
    } else if (std::isfinite(LL1) && LL0 < LL1) {
      log_gap = LL1 + std::log1p(-std::exp(LL0 - LL1));
    } else {
      rep.truncated = true;
      break;
    }
    rep.g.push_back(log_gap / static_cast<double>(i + 1));
  }
  rep.increasing = true;
  for (std::size_t i = 2; i < rep.g.size(); ++i) {
    if (!(rep.g[i] > rep.g[i - 1])) rep.increasing = false;
  }
  return rep;
}

std::vector<CoveringRow> check_covering_inequality(const MapSpec& map, int k, const Region& U, const Region& V,
                                                   const std::vector<int>& n_values, const Tolerance& tol,
                                                   Parallelism par) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "k must be non-negative");
  std::vector<CoveringRow> rows;
  for (int n : n_values) {
    CoveringRow row;
    row.n = n;
    const AreaEstimate lhs = spherical_area(map, n + k, U, tol, par);
    const AreaEstimate rhs = spherical_area(map, n, V, tol, par);
    row.lhs = lhs.value;
    row.rhs = rhs.value;
    row.budget = lhs.error_est + rhs.error_est;
    row.pass = row.lhs - row.rhs >= -row.budget;
    row.flagged = lhs.flagged() || rhs.flagged();
    rows.push_back(row);
  }
  return rows;
}

std::pair<Region, Region> monomial_covering_instance(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "degree must be at least 2");
  return {Region::annulus(0.0, 1.0, 2.0), Region::annulus(0.0, 1.1, std::exp2(d) - 0.1)};
}

}  // namespace sphere_growth
