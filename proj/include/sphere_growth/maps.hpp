#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sphere_growth/polynomial.hpp"
#include "sphere_growth/sphere.hpp"

namespace sphere_growth {

enum class MapKind { Rational, Polynomial, Exp, Sin, Cos, Tan };

std::string_view to_string(MapKind kind);

/// Immutable description of a holomorphic map: either a rational map P/Q
/// (polynomials being the case Q = 1) or a member g(lambda * z) of the
/// exp/sin/cos/tan families. Copies share the precomputed evaluation data.
class MapSpec {
 public:
  static MapSpec rational(std::vector<ComplexPoint> num, std::vector<ComplexPoint> den);
  static MapSpec polynomial(std::vector<ComplexPoint> coeffs);
  static MapSpec exp_family(ComplexPoint lambda = 1.0);
  static MapSpec sin_family(ComplexPoint lambda = 1.0);
  static MapSpec cos_family(ComplexPoint lambda = 1.0);
  static MapSpec tan_family(ComplexPoint lambda = 1.0);
  static MapSpec identity() { return polynomial({0.0, 1.0}); }

  MapKind kind() const { return kind_; }
  bool is_rational() const { return kind_ == MapKind::Rational || kind_ == MapKind::Polynomial; }
  /// Polynomials and the exp/sin/cos families.
  bool is_entire() const;
  bool is_transcendental() const { return !is_rational(); }
  bool is_polynomial() const;

  ComplexPoint lambda() const { return lambda_; }

  /// Precondition: is_rational().
  const Polynomial& numerator() const { return rat_->num; }
  const Polynomial& denominator() const { return rat_->den; }
  const std::vector<PolynomialRoot>& poles() const { return rat_->poles; }

  /// max(deg P, deg Q) for rational maps, empty for transcendental ones.
  std::optional<int> degree() const;

  /// One step of a rational map in chart coordinates: the image point and
  /// log of the chordal derivative at the input. Both charts use the
  /// Wronskian form, which stays finite across poles.
  struct ChartStep {
    ChartPoint next;
    double log_factor;
  };
  ChartStep rational_step(const ChartPoint& w) const;
  /// Euclidean log|f'(w)| at a finite chart point; +inf at poles.
  double rational_log_abs_deriv(const ChartPoint& w) const;

  /// One step of an entire or tan map at a finite point. `next` is only
  /// filled in when log|f(w)| <= max_log_abs; otherwise the caller treats the
  /// orbit as escaped.
  struct FiniteStep {
    double log_factor;
    double log_abs_next;
    std::optional<ComplexPoint> next;
  };
  FiniteStep transcendental_step(ComplexPoint w, double max_log_abs) const;

 private:
  struct RationalData {
    Polynomial num, den;
    Polynomial dnum, dden;
    Polynomial rnum, rden, drnum, drden;  // reciprocal-chart versions
    std::vector<PolynomialRoot> poles;
    int degree = 0;
  };

  MapKind kind_ = MapKind::Polynomial;
  ComplexPoint lambda_ = 1.0;
  std::shared_ptr<const RationalData> rat_;

  static MapSpec make_rational(MapKind kind, Polynomial num, Polynomial den, bool check_common_roots = true);
  friend MapSpec compose(const MapSpec& f, const MapSpec& g);
  static MapSpec make_family(MapKind kind, ComplexPoint lambda);
};

// Stable log-moduli for the trigonometric families, u = x + iy.
double log_abs_sin(ComplexPoint u);
double log_abs_cos(ComplexPoint u);

/// f(z) on the sphere. Rational maps return infinity exactly at poles and are
/// defined at infinity through the reciprocal chart.
SpherePoint eval(const MapSpec& map, const SpherePoint& z);

/// log|f(z)| without forming f(z); +inf at poles.
double log_abs_eval(const MapSpec& map, ComplexPoint z);

/// log|f'(z)|, -inf at critical points.
double log_abs_deriv(const MapSpec& map, ComplexPoint z);

/// Sphere-to-sphere derivative (1+|w|^2)|f'(w)|/(1+|f(w)|^2).
double chordal_deriv(const MapSpec& map, const SpherePoint& w);
double log_chordal_deriv(const MapSpec& map, const SpherePoint& w);

std::optional<int> degree(const MapSpec& map);

/// log M(r, f): 1024 equispaced samples on |z| = r, then golden-section
/// refinement around the best sample.
double log_max_modulus(const MapSpec& map, double r);
double max_modulus(const MapSpec& map, double r);

/// log M^k(r, f) for k = 1..n where M^k = M(M^{k-1}). Each entry also keeps
/// log log M^k, which stays finite long after log M^k overflows.
struct IteratedModulus {
  double log_m;
  double loglog_m;
};
std::vector<IteratedModulus> iterated_max_modulus(const MapSpec& map, double r, int n);

/// Composition f(g(z)) of two rational maps, by polynomial arithmetic.
MapSpec compose(const MapSpec& f, const MapSpec& g);
/// f^n as an explicit rational map (identity for n = 0).
MapSpec rational_iterate(const MapSpec& f, int n);

// JSON: {"kind":"rational","num":[[re,im],...],"den":[...]},
// {"kind":"polynomial","coeffs":[...]}, {"kind":"exp","lambda":[re,im]}, ...
nlohmann::json to_json(const MapSpec& map);
MapSpec map_from_json(const nlohmann::json& j);

/// Accepts a JSON object or one of the shortcuts id, z2, z3, exp, sin, cos,
/// tan, quad:<re>,<im> (z^2 + c).
MapSpec parse_map_argument(std::string_view text);

}  // namespace sphere_growth
