#include "sphere_growth/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "sphere_growth/errors.hpp"
#include "sphere_growth/orbit.hpp"

namespace sphere_growth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOverflowLog = 700.0;
// Adjacent 3x3 samples whose images are farther apart than this (chordal,
// antipodal = 1) force a split even when the two estimates agree: both
// rules can miss a feature thinner than the sample spacing.
constexpr double kMaxImageSpread = 0.25;
constexpr int kRootDepth = 3;
constexpr int kBoundarySamples = 4;  // per axis

struct Sample {
  double value = 0.0;
  bool saturated = false;
  bool overflow = false;
  SphereVector image{};
};

Sample from_log(double log_value, bool saturated, SphereVector image) {
  Sample s;
  s.saturated = saturated;
  s.image = image;
  if (log_value > kOverflowLog) {
    s.overflow = true;
    s.value = kInf;
  } else {
    s.value = std::exp(log_value);  // exp(-inf) = 0 at critical points
  }
  return s;
}

struct SphericalIntegrand {
  const MapSpec& map;
  int n;
  bool reciprocal_chart;

  Sample operator()(ComplexPoint z) const {
    const OrbitSummary o = map.is_rational() ? summarize_orbit(map, ChartPoint{z, reciprocal_chart}, n)
                                             : summarize_orbit(map, z, n);
    const double lv = 2.0 * o.log_chordal_sum - 2.0 * std::log1p(std::norm(z));
    return from_log(lv, o.status == OrbitStatus::Saturated, o.image);
  }
};

struct EuclideanIntegrand {
  const MapSpec& map;
  int n;

  Sample operator()(ComplexPoint z) const {
    double sum = 0.0;
    bool saturated = false;
    if (map.is_rational()) {
      ChartPoint w = ChartPoint::from(z);
      for (int k = 0; k < n; ++k) {
        if (w.reciprocal && w.coord == ComplexPoint{}) return from_log(kInf, false, north_pole());
        sum += map.rational_log_abs_deriv(w);
        w = map.rational_step(w).next;
      }
      return from_log(2.0 * sum, false, to_vector(w));
    }
    ComplexPoint w = z;
    const double log_escape = std::log(kEscapeRadius);
    for (int k = 0; k < n; ++k) {
      sum += log_abs_deriv(map, w);
      const auto step = map.transcendental_step(w, log_escape);
      if (!step.next) {
        if (map.kind() == MapKind::Tan) break;
        saturated = true;
        w = ComplexPoint{};
        break;
      }
      w = *step.next;
    }
    return from_log(2.0 * sum, saturated, saturated ? north_pole() : to_vector(ChartPoint::from(w)));
  }
};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

struct Cell {
  int depth;
  std::uint64_t ix, iy;
};

struct CellEval {
  double value = 0.0;  // raw integral over the cell (no 1/pi)
  double spread = 0.0;
  bool saturated = false;
  bool overflow = false;
};

struct Accumulator {
  double value = 0.0;
  double err = 0.0;
  double var = 0.0;
  std::size_t cells = 0;
  std::size_t saturated_cells = 0;
  bool max_depth_hit = false;
  bool overflow = false;
};

template <class Integrand>
class Engine {
 public:
  Engine(const Region& region, const Tolerance& tol, const Integrand& f, bool uniform)
      : region_(region),
        box_(region.bounding_box()),
        tol_(tol),
        f_(f),
        region_area_(region.area()),
        uniform_(uniform) {}

  AreaEstimate run(Parallelism par) {
    const int root_depth = std::min(kRootDepth, tol_.max_depth - 1);
    const std::uint64_t side = std::uint64_t{1} << root_depth;
    const std::size_t roots = static_cast<std::size_t>(side * side);

    std::vector<CellRelation> rel(roots);
    std::vector<CellEval> coarse(roots);
    parallel_for(roots, par, [&](std::size_t i) {
      const Cell c{root_depth, i % side, i / side};
      rel[i] = region_.classify(box_of(c));
      if (rel[i] != CellRelation::Outside) coarse[i] = evaluate(c, rel[i] == CellRelation::Boundary);
    });
    double initial = 0.0;
    for (const auto& c : coarse) initial += c.value;
    const double budget = std::max(tol_.abs_tol * std::numbers::pi, tol_.rel_tol * std::abs(initial));
    tol_per_area_ = std::isfinite(budget) ? budget / region_area_ : 0.0;

    std::vector<Accumulator> acc(roots);
    parallel_for(roots, par, [&](std::size_t i) {
      const Cell c{root_depth, i % side, i / side};
      process(c, rel[i], coarse[i], acc[i]);
    });

    Accumulator total;
    for (const auto& a : acc) {
      total.value += a.value;
      total.err += a.err;
      total.var += a.var;
      total.cells += a.cells;
      total.saturated_cells += a.saturated_cells;
      total.max_depth_hit = total.max_depth_hit || a.max_depth_hit;
      total.overflow = total.overflow || a.overflow;
    }
    AreaEstimate out;
    out.cells = total.cells;
    out.saturated_cells = total.saturated_cells;
    out.max_depth_hit = total.max_depth_hit;
    out.overflow = total.overflow;
    if (total.overflow) {
      out.value = kInf;
      out.error_est = kInf;
    } else {
      out.value = total.value / std::numbers::pi;
      out.error_est = (total.err + std::sqrt(total.var)) / std::numbers::pi;
    }
    return out;
  }

 private:
  const Region& region_;
  Box box_;
  Tolerance tol_;
  const Integrand& f_;
  double region_area_;
  bool uniform_;  // refine everything to max_depth
  double tol_per_area_ = 0.0;

  Box box_of(const Cell& c) const {
    const double scale = std::ldexp(1.0, -c.depth);
    const double w = (box_.x1 - box_.x0) * scale, h = (box_.y1 - box_.y0) * scale;
    const double x0 = box_.x0 + static_cast<double>(c.ix) * w, y0 = box_.y0 + static_cast<double>(c.iy) * h;
    return {x0, y0, x0 + w, y0 + h};
  }

  // 3x3 midpoint tensor rule; `masked` multiplies by the region indicator.
  CellEval evaluate(const Cell& c, bool masked) const {
    const Box b = box_of(c);
    const double hx = (b.x1 - b.x0) / 3.0, hy = (b.y1 - b.y0) / 3.0;
    Sample s[3][3];
    CellEval e;
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        const ComplexPoint z{b.x0 + (i + 0.5) * hx, b.y0 + (j + 0.5) * hy};
        s[j][i] = f_(z);
        e.saturated = e.saturated || s[j][i].saturated;
        e.overflow = e.overflow || s[j][i].overflow;
        if (!masked || region_.contains(z)) sum += s[j][i].value;
      }
    }
    auto gap = [](const Sample& a, const Sample& b2) {
      if (a.saturated || b2.saturated) return 0.0;
      return chordal_distance(a.image, b2.image);
    };
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        if (i < 2) e.spread = std::max(e.spread, gap(s[j][i], s[j][i + 1]));
        if (j < 2) e.spread = std::max(e.spread, gap(s[j][i], s[j + 1][i]));
      }
    }
    e.value = sum / 9.0 * b.area();
    return e;
  }

  static std::array<Cell, 4> children(const Cell& c) {
    const std::uint64_t x = 2 * c.ix, y = 2 * c.iy;
    return {Cell{c.depth + 1, x, y}, Cell{c.depth + 1, x + 1, y}, Cell{c.depth + 1, x, y + 1},
            Cell{c.depth + 1, x + 1, y + 1}};
  }

  void process(const Cell& c, CellRelation rel, const CellEval& own, Accumulator& acc) const {
    if (rel == CellRelation::Outside) return;
    if (rel == CellRelation::Boundary) {
      if (c.depth >= tol_.max_depth) {
        boundary_leaf(c, acc);
        return;
      }
      for (const Cell& k : children(c)) {
        const CellRelation kr = region_.classify(box_of(k));
        if (kr == CellRelation::Inside) {
          process(k, kr, evaluate(k, false), acc);
        } else if (kr == CellRelation::Boundary) {
          process(k, kr, CellEval{}, acc);
        }
      }
      return;
    }

    const auto kids = children(c);
    std::array<CellEval, 4> ke;
    double fine = 0.0, spread = own.spread;
    bool saturated = false, overflow = false;
    for (int i = 0; i < 4; ++i) {
      ke[i] = evaluate(kids[i], false);
      fine += ke[i].value;
      spread = std::max(spread, ke[i].spread);
      saturated = saturated || ke[i].saturated;
      overflow = overflow || ke[i].overflow;
    }
    const double diff = std::abs(fine - own.value);
    const double cell_tol = tol_per_area_ * box_of(c).area();
    const bool converged = !uniform_ && diff <= cell_tol && spread <= kMaxImageSpread;
    const bool at_limit = c.depth + 1 >= tol_.max_depth;
    if (overflow) {
      acc.overflow = true;
      ++acc.cells;
      return;
    }
    if (converged || at_limit) {
      acc.value += fine;
      acc.err += std::isfinite(diff) ? diff : 0.0;
      ++acc.cells;
      if (saturated) ++acc.saturated_cells;
      if (!converged && !uniform_) acc.max_depth_hit = true;
      return;
    }
    for (int i = 0; i < 4; ++i) process(kids[i], CellRelation::Inside, ke[i], acc);
  }

  // Jittered stratified samples of integrand * indicator.
  void boundary_leaf(const Cell& c, Accumulator& acc) const {
    const Box b = box_of(c);
    std::uint64_t state = (static_cast<std::uint64_t>(c.depth) << 58) ^ (c.ix * 0x100000001b3ULL) ^
                          (c.iy * 0xc2b2ae3d27d4eb4fULL);
    const double hx = (b.x1 - b.x0) / kBoundarySamples, hy = (b.y1 - b.y0) / kBoundarySamples;
    double sum = 0.0, sum_sq = 0.0;
    bool saturated = false;
    for (int j = 0; j < kBoundarySamples; ++j) {
      for (int i = 0; i < kBoundarySamples; ++i) {
        const double u = unit_interval(splitmix64(state)), v = unit_interval(splitmix64(state));
        const ComplexPoint z{b.x0 + (i + u) * hx, b.y0 + (j + v) * hy};
        if (!region_.contains(z)) continue;
        const Sample s = f_(z);
        if (s.overflow) acc.overflow = true;
        saturated = saturated || s.saturated;
        sum += s.value;
        sum_sq += s.value * s.value;
      }
    }
    constexpr double m = kBoundarySamples * kBoundarySamples;
    const double mean = sum / m;
    const double var = std::max(0.0, sum_sq / m - mean * mean) / (m - 1.0);
    acc.value += mean * b.area();
    acc.var += var * b.area() * b.area();
    ++acc.cells;
    if (saturated) ++acc.saturated_cells;
  }
};

void check_region_for_map(const MapSpec& map, const Region& region) {
  if (region.is_whole_sphere() && !map.is_rational()) {
    throw Error(ErrorKind::EntireAtInfinity, "the whole sphere needs a rational map");
  }
}

AreaEstimate combine(const AreaEstimate& a, const AreaEstimate& b) {
  AreaEstimate out;
  out.value = a.value + b.value;
  out.error_est = a.error_est + b.error_est;
  out.cells = a.cells + b.cells;
  out.max_depth_hit = a.max_depth_hit || b.max_depth_hit;
  out.saturated_cells = a.saturated_cells + b.saturated_cells;
  out.overflow = a.overflow || b.overflow;
  return out;
}

template <class Integrand>
AreaEstimate integrate(const Region& region, const Tolerance& tol, const Integrand& f, Parallelism par,
                       bool uniform = false) {
  return Engine<Integrand>(region, tol, f, uniform).run(par);
}

// Uniform double in [0,1) from the top 53 bits; avoids the implementation
// freedom of std::uniform_real_distribution.
double uniform(std::mt19937_64& rng) { return unit_interval(rng()); }

struct McPart {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  double box_area = 0.0;
};

template <class Integrand>
McPart mc_run(const Region& region, std::size_t per_axis, const Integrand& f, std::mt19937_64& rng) {
  const Box b = region.bounding_box();
  McPart p;
  p.box_area = b.area();
  const double hx = (b.x1 - b.x0) / static_cast<double>(per_axis);
  const double hy = (b.y1 - b.y0) / static_cast<double>(per_axis);
  for (std::size_t j = 0; j < per_axis; ++j) {
    for (std::size_t i = 0; i < per_axis; ++i) {
      const double u = uniform(rng), v = uniform(rng);
      const ComplexPoint z{b.x0 + (static_cast<double>(i) + u) * hx, b.y0 + (static_cast<double>(j) + v) * hy};
      const double value = region.contains(z) ? f(z).value : 0.0;
      p.sum += value;
      p.sum_sq += value * value;
      ++p.count;
    }
  }
  return p;
}

std::pair<double, double> mc_finish(const McPart& p) {
  const double nn = static_cast<double>(p.count);
  const double mean = p.sum / nn;
  const double var = std::max(0.0, (p.sum_sq / nn - mean * mean) * nn / (nn - 1.0));
  const double scale = p.box_area / std::numbers::pi;
  return {scale * mean, scale * std::sqrt(var / nn)};
}

}  // namespace

void Tolerance::validate() const {
  if (!(abs_tol > 0.0 || rel_tol > 0.0) || abs_tol < 0.0 || rel_tol < 0.0 || std::isnan(abs_tol) ||
      std::isnan(rel_tol)) {
    throw Error(ErrorKind::InvalidArgument, "tolerance needs abs_tol > 0 or rel_tol > 0");
  }
  if (max_depth < 1 || max_depth > 24) throw Error(ErrorKind::InvalidArgument, "max_depth must be in 1..24");
}

AreaEstimate spherical_area(const MapSpec& map, int n, const Region& region, const Tolerance& tol, Parallelism par) {
  tol.validate();
  check_iterable(map, n);
  check_region_for_map(map, region);
  if (!region.is_whole_sphere()) return integrate(region, tol, SphericalIntegrand{map, n, false}, par);
  const Region unit = Region::disk(0.0, 1.0);
  return combine(integrate(unit, tol, SphericalIntegrand{map, n, false}, par),
                 integrate(unit, tol, SphericalIntegrand{map, n, true}, par));
}

AreaEstimate spherical_area_uniform(const MapSpec& map, int n, const Region& region, int depth, Parallelism par) {
  const Tolerance tol{1.0, 0.0, depth};
  tol.validate();
  check_iterable(map, n);
  if (region.is_whole_sphere()) throw Error(ErrorKind::InvalidArgument, "uniform rule needs a planar region");
  return integrate(region, tol, SphericalIntegrand{map, n, false}, par, true);
}

AreaEstimate euclidean_area(const MapSpec& map, int n, const Region& region, const Tolerance& tol, Parallelism par) {
  tol.validate();
  check_iterable(map, n);
  if (region.is_whole_sphere()) throw Error(ErrorKind::InvalidArgument, "euclidean area over the whole sphere");
  return integrate(region, tol, EuclideanIntegrand{map, n}, par);
}

McEstimate mc_area(const MapSpec& map, int n, const Region& region, std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw Error(ErrorKind::InvalidArgument, "mc_area needs at least 1000 samples");
  check_iterable(map, n);
  check_region_for_map(map, region);
  std::mt19937_64 rng(seed);
  const auto per_axis = static_cast<std::size_t>(std::sqrt(static_cast<double>(samples)));
  McEstimate out;
  if (!region.is_whole_sphere()) {
    const McPart p = mc_run(region, per_axis, SphericalIntegrand{map, n, false}, rng);
    std::tie(out.value, out.std_error) = mc_finish(p);
    out.samples = p.count;
    return out;
  }
  const Region unit = Region::disk(0.0, 1.0);
  const McPart a = mc_run(unit, per_axis, SphericalIntegrand{map, n, false}, rng);
  const McPart b = mc_run(unit, per_axis, SphericalIntegrand{map, n, true}, rng);
  const auto [va, ea] = mc_finish(a);
  const auto [vb, eb] = mc_finish(b);
  out.value = va + vb;
  out.std_error = std::hypot(ea, eb);
  out.samples = a.count + b.count;
  return out;
}

std::string csv_header_area() { return "value,error_est,cells,flags"; }

std::string flags_string(const AreaEstimate& a) {
  std::string f;
  auto add = [&](const char* s) {
    if (!f.empty()) f += '|';
    f += s;
  };
  if (a.max_depth_hit) add("max_depth_hit");
  if (a.saturated_cells > 0) add(fmt::format("saturated={}", a.saturated_cells).c_str());
  if (a.overflow) add("overflow");
  return f.empty() ? "none" : f;
}

std::string to_csv_row(const AreaEstimate& a) {
  return fmt::format("{:.17g},{:.17g},{},{}", a.value, a.error_est, a.cells, flags_string(a));
}

}  // namespace sphere_growth
