#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "sphere_growth/sphere.hpp"

namespace sphere_growth {

struct Disk {
  ComplexPoint center;
  double r;
};

/// Open annulus r_in < |z - center| < r_out, 0 <= r_in < r_out.
struct Annulus {
  ComplexPoint center;
  double r_in;
  double r_out;
};

struct Rect {
  ComplexPoint lo;
  ComplexPoint hi;
};

struct WholeSphere {};

struct Box {
  double x0, y0, x1, y1;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

enum class CellRelation { Inside, Outside, Boundary };

class Region {
 public:
  using Shape = std::variant<Disk, Annulus, Rect, WholeSphere>;

  static Region disk(ComplexPoint center, double r);
  static Region annulus(ComplexPoint center, double r_in, double r_out);
  static Region rect(ComplexPoint lo, ComplexPoint hi);
  static Region whole_sphere() { return Region(WholeSphere{}); }

  /// Parses disk:x,y,r | annulus:x,y,r_in,r_out | rect:x0,y0,x1,y1 | sphere.
  static Region parse(std::string_view text);
  std::string to_string() const;

  const Shape& shape() const { return shape_; }
  bool is_whole_sphere() const { return std::holds_alternative<WholeSphere>(shape_); }

  /// Planar regions only.
  bool contains(ComplexPoint z) const;
  Box bounding_box() const;
  double area() const;
  CellRelation classify(const Box& cell) const;

 private:
  explicit Region(Shape s) : shape_(s) {}
  Shape shape_;
};

}  // namespace sphere_growth
