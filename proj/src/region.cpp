#include "sphere_growth/region.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "sphere_growth/errors.hpp"

namespace sphere_growth {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Distances from c to the nearest and farthest points of a box.
std::pair<double, double> distance_range(ComplexPoint c, const Box& b) {
  const double nx = std::clamp(c.real(), b.x0, b.x1), ny = std::clamp(c.imag(), b.y0, b.y1);
  const double dmin = std::hypot(nx - c.real(), ny - c.imag());
  const double fx = std::max(std::abs(b.x0 - c.real()), std::abs(b.x1 - c.real()));
  const double fy = std::max(std::abs(b.y0 - c.imag()), std::abs(b.y1 - c.imag()));
  return {dmin, std::hypot(fx, fy)};
}

std::vector<double> parse_numbers(std::string_view body) {
  std::vector<double> out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string_view tok = body.substr(0, comma);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw Error(ErrorKind::InvalidArgument, "malformed number '" + std::string(tok) + "' in region");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

Region Region::disk(ComplexPoint center, double r) {
  if (!finite(center.real()) || !finite(center.imag()) || !(r > 0.0) || !finite(r)) {
    throw Error(ErrorKind::InvalidArgument, "disk needs a finite center and positive radius");
  }
  return Region(Disk{center, r});
}

Region Region::annulus(ComplexPoint center, double r_in, double r_out) {
  if (!finite(center.real()) || !finite(center.imag()) || !(r_in >= 0.0) || !(r_out > r_in) || !finite(r_out)) {
    throw Error(ErrorKind::InvalidArgument, "annulus needs 0 <= r_in < r_out");
  }
  return Region(Annulus{center, r_in, r_out});
}

Region Region::rect(ComplexPoint lo, ComplexPoint hi) {
  if (!(hi.real() > lo.real()) || !(hi.imag() > lo.imag()) || !finite(lo.real()) || !finite(lo.imag()) ||
      !finite(hi.real()) || !finite(hi.imag())) {
    throw Error(ErrorKind::InvalidArgument, "rect needs lo < hi in both coordinates");
  }
  return Region(Rect{lo, hi});
}

Region Region::parse(std::string_view text) {
  if (text == "sphere") return whole_sphere();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorKind::InvalidArgument, "region must look like kind:args");
  const std::string_view kind = text.substr(0, colon);
  const std::vector<double> v = parse_numbers(text.substr(colon + 1));
  if (kind == "disk" && v.size() == 3) return disk({v[0], v[1]}, v[2]);
  if (kind == "annulus" && v.size() == 4) return annulus({v[0], v[1]}, v[2], v[3]);
  if (kind == "rect" && v.size() == 4) return rect({v[0], v[1]}, {v[2], v[3]});
  throw Error(ErrorKind::InvalidArgument, "unrecognised region '" + std::string(text) + "'");
}

std::string Region::to_string() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          os << "disk:" << s.center.real() << ',' << s.center.imag() << ',' << s.r;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          os << "annulus:" << s.center.real() << ',' << s.center.imag() << ',' << s.r_in << ',' << s.r_out;
        } else if constexpr (std::is_same_v<T, Rect>) {
          os << "rect:" << s.lo.real() << ',' << s.lo.imag() << ',' << s.hi.real() << ',' << s.hi.imag();
        } else {
          os << "sphere";
        }
      },
      shape_);
  return os.str();
}

bool Region::contains(ComplexPoint z) const {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return std::abs(z - s.center) < s.r;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          const double d = std::abs(z - s.center);
          return d > s.r_in && d < s.r_out;
        } else if constexpr (std::is_same_v<T, Rect>) {
          return z.real() > s.lo.real() && z.real() < s.hi.real() && z.imag() > s.lo.imag() && z.imag() < s.hi.imag();
        } else {
          return true;
        }
      },
      shape_);
}

Box Region::bounding_box() const {
  return std::visit(
      [&](const auto& s) -> Box {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return {s.center.real() - s.r, s.center.imag() - s.r, s.center.real() + s.r, s.center.imag() + s.r};
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return {s.center.real() - s.r_out, s.center.imag() - s.r_out, s.center.real() + s.r_out,
                  s.center.imag() + s.r_out};
        } else if constexpr (std::is_same_v<T, Rect>) {
          return {s.lo.real(), s.lo.imag(), s.hi.real(), s.hi.imag()};
        } else {
          throw Error(ErrorKind::InvalidArgument, "the whole sphere has no planar bounding box");
        }
      },
      shape_);
}

double Region::area() const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return std::numbers::pi * s.r * s.r;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return std::numbers::pi * (s.r_out * s.r_out - s.r_in * s.r_in);
        } else if constexpr (std::is_same_v<T, Rect>) {
          return (s.hi.real() - s.lo.real()) * (s.hi.imag() - s.lo.imag());
        } else {
          // Two unit-disk charts.
          return 2.0 * std::numbers::pi;
        }
      },
      shape_);
}

CellRelation Region::classify(const Box& cell) const {
  return std::visit(
      [&](const auto& s) -> CellRelation {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          const auto [dmin, dmax] = distance_range(s.center, cell);
          if (dmax <= s.r) return CellRelation::Inside;
          if (dmin >= s.r) return CellRelation::Outside;
          return CellRelation::Boundary;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          const auto [dmin, dmax] = distance_range(s.center, cell);
          if (dmin >= s.r_in && dmax <= s.r_out) return CellRelation::Inside;
          if (dmax <= s.r_in || dmin >= s.r_out) return CellRelation::Outside;
          return CellRelation::Boundary;
        } else if constexpr (std::is_same_v<T, Rect>) {
          if (cell.x0 >= s.lo.real() && cell.x1 <= s.hi.real() && cell.y0 >= s.lo.imag() && cell.y1 <= s.hi.imag()) {
            return CellRelation::Inside;
          }
          if (cell.x1 <= s.lo.real() || cell.x0 >= s.hi.real() || cell.y1 <= s.lo.imag() || cell.y0 >= s.hi.imag()) {
            return CellRelation::Outside;
          }
          return CellRelation::Boundary;
        } else {
          return CellRelation::Inside;
        }
      },
      shape_);
}

}  // namespace sphere_growth
