#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sphere_growth/sphere.hpp"

namespace sphere_growth {

/// Dense complex polynomial, coefficients in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<ComplexPoint> coeffs);

  static Polynomial constant(ComplexPoint c) { return Polynomial({c}); }
  static Polynomial monomial(int power, ComplexPoint c = 1.0);

  const std::vector<ComplexPoint>& coeffs() const { return coeffs_; }

  /// Index of the highest nonzero coefficient; 0 for constants (including 0).
  int degree() const;
  ComplexPoint leading() const { return coeffs_.empty() ? ComplexPoint{} : coeffs_.back(); }
  bool is_zero() const;

  ComplexPoint operator()(ComplexPoint z) const;

  /// Value and first derivative in one Horner pass.
  std::pair<ComplexPoint, ComplexPoint> eval_with_derivative(ComplexPoint z) const;

  Polynomial derivative() const;

  /// z^d * p(1/z) for d >= degree(): the coefficient list reversed after
  /// padding to length d + 1.
  Polynomial reversed(int padded_degree) const;

  /// log|p(z)|, evaluated through the reversed polynomial when |z| > 1 so
  /// that huge arguments do not overflow.
  double log_abs(ComplexPoint z) const;

  /// Sum of |c_k| |z|^k, the natural scale for residual checks.
  double abs_scale(double abs_z) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(ComplexPoint s, const Polynomial& p);

 private:
  std::vector<ComplexPoint> coeffs_;
};

struct PolynomialRoot {
  ComplexPoint value;
  int multiplicity = 1;
};

/// Roots via companion-matrix eigenvalues, each polished by Newton steps.
/// Roots closer than merge_distance are merged into one entry with summed
/// multiplicity. Throws RootFindingFailed if a polished root leaves a
/// relative residual above 1e-8.
std::vector<PolynomialRoot> find_roots(const Polynomial& p, double merge_distance = 1e-7);

}  // namespace sphere_growth
