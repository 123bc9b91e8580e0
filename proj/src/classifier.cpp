#include "sphere_growth/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sphere_growth/errors.hpp"
#include "sphere_growth/orbit.hpp"

namespace sphere_growth {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::optional<double> trailing_slope(const std::vector<int>& n_values, const std::vector<double>& logS) {
  const std::size_t len = std::min(n_values.size(), logS.size());
  const std::size_t window = (len + 1) / 2;
  std::vector<double> xs, ys;
  for (std::size_t i = len - window; i < len; ++i) {
    if (std::isfinite(logS[i])) {
      xs.push_back(n_values[i]);
      ys.push_back(logS[i]);
    }
  }
  if (xs.size() < 3) return std::nullopt;
  const double m = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

GrowthSeries growth_series(const MapSpec& map, ComplexPoint z, double r, int n_max, const Tolerance& tol,
                           Parallelism par) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "r must be positive");
  if (n_max < 3) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 3");
  check_iterable(map, n_max);
  const Region disk = Region::disk(z, r);
  GrowthSeries s;
  s.r_used = r;
  for (int n = 1; n <= n_max; ++n) {
    const AreaEstimate a = spherical_area(map, n, disk, tol, par);
    s.n_values.push_back(n);
    s.areas.push_back(a);
    s.logS.push_back(a.overflow ? kInf : std::log(a.value));
    if (a.saturated_cells > 0) {
      s.flags.saturated = true;
      if (!s.first_saturated_n) s.first_saturated_n = n;
    }
    s.flags.max_depth_hit = s.flags.max_depth_hit || a.max_depth_hit;
  }
  s.slope = trailing_slope(s.n_values, s.logS);
  return s;
}

std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Julia: return "Julia";
    case VerdictKind::Fatou: return "Fatou";
    default: return "Inconclusive(" + v.reason + ")";
  }
}

Verdict classify_point(const GrowthSeries& series, const Thresholds& th) {
  const bool saturated = series.flags.saturated;
  std::optional<double> first, last;
  double sup_log = -kInf;
  bool trailing_vanished = false;
  for (double v : series.logS) {
    sup_log = std::max(sup_log, v);  // +inf from overflow dominates
    if (std::isfinite(v)) {
      if (!first) first = v;
      last = v;
    }
  }
  if (!series.logS.empty() && series.logS.back() == -kInf) trailing_vanished = true;
  const bool bounded = sup_log < std::log(th.B_F);

  if (series.slope) {
    const double slope = *series.slope;
    const double growth = (first && last) ? *last - *first : -kInf;
    if (slope > th.tau_J) {
      if (growth > std::log(th.V_min) || saturated) return Verdict::julia();
      return Verdict::inconclusive("weak growth");
    }
    // Saturated cells are growth evidence and never count towards Fatou.
    if (saturated) return Verdict::inconclusive("saturated");
    if (!bounded) return Verdict::inconclusive("large area");
    return Verdict::fatou();
  }
  if (saturated) return Verdict::inconclusive("saturated");
  if (trailing_vanished && bounded) return Verdict::fatou();
  return Verdict::inconclusive("insufficient data");
}

Verdict classify_two_radius(const MapSpec& map, ComplexPoint z, double r, int n_max, const Tolerance& tol,
                            const Thresholds& th, Parallelism par) {
  const Verdict a = classify_point(growth_series(map, z, r, n_max, tol, par), th);
  const Verdict b = classify_point(growth_series(map, z, 0.5 * r, n_max, tol, par), th);
  if (a.kind != b.kind) return Verdict::inconclusive("radius disagreement");
  return a;
}

DegreeEstimate estimate_log_degree(const MapSpec& map, ComplexPoint z, double r, int n_max, const Tolerance& tol,
                                   Parallelism par) {
  if (!map.is_rational() || *map.degree() < 2) {
    throw Error(ErrorKind::InvalidArgument, "degree estimate needs a rational map of degree >= 2");
  }
  DegreeEstimate d;
  d.series = growth_series(map, z, r, n_max, tol, par);
  d.log_d = d.series.slope;
  return d;
}

bool escape_oracle(ComplexPoint c, ComplexPoint z, int n_max, double bailout) {
  for (int k = 0; k <= n_max; ++k) {
    if (std::abs(z) > bailout) return true;
    z = z * z + c;
  }
  return false;
}

Tolerance grid_tolerance() { return Tolerance{1e-12, 1e-3, 6}; }

Tolerance growth_tolerance() { return Tolerance{1e-10, 1e-4, 12}; }

void GridJob::validate() const {
  if (!std::holds_alternative<Rect>(rect.shape())) throw Error(ErrorKind::InvalidArgument, "grid region must be a rect");
  if (nx < 1 || ny < 1) throw Error(ErrorKind::InvalidArgument, "grid needs nx >= 1 and ny >= 1");
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid radius must be positive");
  if (n_max < 3) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 3");
  tol.validate();
}

ComplexPoint GridJob::node(int i, int j) const {
  const Rect& R = std::get<Rect>(rect.shape());
  const double x = R.lo.real() + (i + 0.5) * (R.hi.real() - R.lo.real()) / nx;
  const double y = R.hi.imag() - (j + 0.5) * (R.hi.imag() - R.lo.imag()) / ny;
  return {x, y};
}

GridResult render_grid(const MapSpec& map, const GridJob& job, Parallelism par) {
  job.validate();
  check_iterable(map, job.n_max);
  GridResult g;
  g.nx = job.nx;
  g.ny = job.ny;
  const std::size_t count = static_cast<std::size_t>(job.nx) * static_cast<std::size_t>(job.ny);
  g.verdicts.resize(count);
  g.slopes.resize(count);
  parallel_for(count, par, [&](std::size_t idx) {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(job.nx));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(job.nx));
    try {
      const GrowthSeries s = growth_series(map, job.node(i, j), job.r, job.n_max, job.tol, Parallelism{1});
      g.verdicts[idx] = classify_point(s, job.thresholds);
      g.slopes[idx] = s.slope;
    } catch (const Error& e) {
      g.verdicts[idx] = Verdict::inconclusive(std::string(to_string(e.kind())));
    }
  });
  return g;
}

std::string to_pgm(const GridResult& g, const std::string& comment) {
  std::string out = "P2\n";
  if (!comment.empty()) out += "# " + comment + "\n";
  out += fmt::format("{} {}\n255\n", g.nx, g.ny);
  // Plain PGM readers expect lines of at most 70 characters.
  for (int j = 0; j < g.ny; ++j) {
    std::size_t line = 0;
    for (int i = 0; i < g.nx; ++i) {
      const VerdictKind k = g.at(i, j).kind;
      const std::string level = k == VerdictKind::Julia ? "255" : k == VerdictKind::Fatou ? "0" : "128";
      if (line > 0 && line + 1 + level.size() > 70) {
        out += '\n';
        line = 0;
      }
      if (line > 0) {
        out += ' ';
        ++line;
      }
      out += level;
      line += level.size();
    }
    out += '\n';
  }
  return out;
}

std::string slopes_csv(const GridResult& g) {
  std::string out;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) out += ',';
      const auto& s = g.slopes[static_cast<std::size_t>(j) * g.nx + i];
      if (s) out += fmt::format("{:.17g}", *s);
    }
    out += '\n';
  }
  return out;
}

}  // namespace sphere_growth
