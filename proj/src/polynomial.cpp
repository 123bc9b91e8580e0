#include "sphere_growth/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sphere_growth/errors.hpp"

namespace sphere_growth {

Polynomial::Polynomial(std::vector<ComplexPoint> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Polynomial Polynomial::monomial(int power, ComplexPoint c) {
  std::vector<ComplexPoint> v(static_cast<std::size_t>(power) + 1, 0.0);
  v.back() = c;
  return Polynomial(std::move(v));
}

int Polynomial::degree() const {
  for (int k = static_cast<int>(coeffs_.size()) - 1; k > 0; --k) {
    if (coeffs_[static_cast<std::size_t>(k)] != ComplexPoint{}) return k;
  }
  return 0;
}

bool Polynomial::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](ComplexPoint c) { return c == ComplexPoint{}; });
}

ComplexPoint Polynomial::operator()(ComplexPoint z) const {
  ComplexPoint acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::pair<ComplexPoint, ComplexPoint> Polynomial::eval_with_derivative(ComplexPoint z) const {
  ComplexPoint p = 0.0, dp = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  return {p, dp};
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial({0.0});
  std::vector<ComplexPoint> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::reversed(int padded_degree) const {
  const int deg = degree();
  std::vector<ComplexPoint> r(static_cast<std::size_t>(padded_degree) + 1, 0.0);
  for (int k = 0; k <= deg; ++k) {
    r[static_cast<std::size_t>(padded_degree - k)] = coeffs_[static_cast<std::size_t>(k)];
  }
  return Polynomial(std::move(r));
}

double Polynomial::log_abs(ComplexPoint z) const {
  const double az = std::abs(z);
  if (az <= 1.0) return std::log(std::abs((*this)(z)));
  // p(z) = z^d * prev(1/z), prev(u) = sum c_k u^(d-k)
  const int deg = degree();
  const ComplexPoint u = 1.0 / z;
  ComplexPoint acc = 0.0;
  for (int k = 0; k <= deg; ++k) acc = acc * u + coeffs_[static_cast<std::size_t>(k)];
  return static_cast<double>(deg) * std::log(az) + std::log(std::abs(acc));
}

double Polynomial::abs_scale(double abs_z) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * abs_z + std::abs(*it);
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<ComplexPoint> r(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < a.coeffs_.size(); ++k) r[k] += a.coeffs_[k];
  for (std::size_t k = 0; k < b.coeffs_.size(); ++k) r[k] += b.coeffs_[k];
  return Polynomial(std::move(r));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<ComplexPoint> r(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(r));
}

Polynomial operator*(ComplexPoint s, const Polynomial& p) {
  std::vector<ComplexPoint> r = p.coeffs_;
  for (auto& c : r) c *= s;
  return Polynomial(std::move(r));
}

namespace {

ComplexPoint newton_polish(const Polynomial& p, ComplexPoint start) {
  ComplexPoint z = start;
  for (int it = 0; it < 50; ++it) {
    const auto [v, dv] = p.eval_with_derivative(z);
    if (v == ComplexPoint{} || dv == ComplexPoint{}) break;
    const ComplexPoint step = v / dv;
    z -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) break;
  }
  // Newton is only linear at clustered roots; never return something worse.
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(p(z)) > std::abs(p(start))) return start;
  return z;
}

}  // namespace

std::vector<PolynomialRoot> find_roots(const Polynomial& p, double merge_distance) {
  const int deg = p.degree();
  std::vector<PolynomialRoot> out;
  if (deg == 0) return out;
  const auto& c = p.coeffs();

  // Exact zero roots are split off so the origin keeps its exact multiplicity.
  int zero_mult = 0;
  while (zero_mult < deg && c[static_cast<std::size_t>(zero_mult)] == ComplexPoint{}) ++zero_mult;
  if (zero_mult > 0) out.push_back({ComplexPoint{}, zero_mult});

  const int m = deg - zero_mult;
  if (m > 0) {
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(m, m);
    const ComplexPoint lead = c[static_cast<std::size_t>(deg)];
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) {
      companion(i, m - 1) = -c[static_cast<std::size_t>(zero_mult + i)] / lead;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::RootFindingFailed, "companion eigenvalue solver did not converge");
    }
    const Polynomial reduced(std::vector<ComplexPoint>(c.begin() + zero_mult, c.begin() + deg + 1));
    std::vector<ComplexPoint> roots;
    roots.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const ComplexPoint z = newton_polish(reduced, solver.eigenvalues()(i));
      const double scale = reduced.abs_scale(std::abs(z));
      if (std::abs(reduced(z)) > 1e-8 * scale) {
        throw Error(ErrorKind::RootFindingFailed, "root residual above 1e-8 after Newton polish");
      }
      roots.push_back(z);
    }
    for (ComplexPoint z : roots) {
      auto near = std::find_if(out.begin(), out.end(), [&](const PolynomialRoot& r) {
        return std::abs(r.value - z) < merge_distance && !(r.value == ComplexPoint{} && zero_mult > 0);
      });
      if (near != out.end()) {
        near->value = (near->value * static_cast<double>(near->multiplicity) + z) /
                      static_cast<double>(near->multiplicity + 1);
        ++near->multiplicity;
      } else {
        out.push_back({z, 1});
      }
    }
  }
  return out;
}

}  // namespace sphere_growth
