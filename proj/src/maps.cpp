#include "sphere_growth/maps.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sphere_growth/errors.hpp"

namespace sphere_growth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kModulusSamples = 1024;
// Above this argument the catalog switches to closed-form log M recursions.
const double kLogMaxArgument = std::log(1e300);

double log_cosh(double v) {
  const double a = std::abs(v);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

bool finite(ComplexPoint z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

std::string_view to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Rational: return "rational";
    case MapKind::Polynomial: return "polynomial";
    case MapKind::Exp: return "exp";
    case MapKind::Sin: return "sin";
    case MapKind::Cos: return "cos";
    case MapKind::Tan: return "tan";
  }
  return "unknown";
}

double log_abs_sin(ComplexPoint u) {
  const double x = u.real(), ay = std::abs(u.imag());
  if (ay < 1.0) {
    const double s = std::sin(x), sh = std::sinh(ay);
    return 0.5 * std::log(s * s + sh * sh);
  }
  // sin^2 x + sinh^2 y = e^{2|y|}/4 * ((1 - e^{-2|y|})^2 + 4 sin^2 x e^{-2|y|})
  const double e = std::exp(-2.0 * ay), s = std::sin(x);
  return ay - std::numbers::ln2 + 0.5 * std::log((1.0 - e) * (1.0 - e) + 4.0 * s * s * e);
}

double log_abs_cos(ComplexPoint u) {
  const double x = u.real(), ay = std::abs(u.imag());
  if (ay < 1.0) {
    const double c = std::cos(x), sh = std::sinh(ay);
    return 0.5 * std::log(c * c + sh * sh);
  }
  const double e = std::exp(-2.0 * ay), c = std::cos(x);
  return ay - std::numbers::ln2 + 0.5 * std::log((1.0 - e) * (1.0 - e) + 4.0 * c * c * e);
}

// ---------------------------------------------------------------------------
// Construction

MapSpec MapSpec::make_rational(MapKind kind, Polynomial num, Polynomial den, bool check_common_roots) {
  for (const auto* p : {&num, &den}) {
    for (ComplexPoint c : p->coeffs()) {
      if (!finite(c)) throw Error(ErrorKind::InvalidMap, "non-finite coefficient");
    }
  }
  if (num.coeffs().back() == ComplexPoint{} || den.coeffs().back() == ComplexPoint{}) {
    throw Error(ErrorKind::InvalidMap, "leading coefficients must be nonzero");
  }
  auto data = std::make_shared<RationalData>();
  data->degree = std::max(num.degree(), den.degree());
  data->dnum = num.derivative();
  data->dden = den.derivative();
  data->rnum = num.reversed(data->degree);
  data->rden = den.reversed(data->degree);
  data->drnum = data->rnum.derivative();
  data->drden = data->rden.derivative();
  data->poles = find_roots(den);
  for (const auto& q : data->poles) {
    if (!check_common_roots) break;
    const double scale = num.abs_scale(std::abs(q.value));
    if (std::abs(num(q.value)) <= 1e-8 * scale) {
      throw Error(ErrorKind::InvalidMap, "numerator and denominator share a root");
    }
  }
  data->num = std::move(num);
  data->den = std::move(den);

  MapSpec m;
  m.kind_ = kind;
  m.rat_ = std::move(data);
  return m;
}

MapSpec MapSpec::rational(std::vector<ComplexPoint> num, std::vector<ComplexPoint> den) {
  if (num.empty() || den.empty()) throw Error(ErrorKind::InvalidMap, "empty coefficient list");
  return make_rational(MapKind::Rational, Polynomial(std::move(num)), Polynomial(std::move(den)));
}

MapSpec MapSpec::polynomial(std::vector<ComplexPoint> coeffs) {
  if (coeffs.empty()) throw Error(ErrorKind::InvalidMap, "empty coefficient list");
  return make_rational(MapKind::Polynomial, Polynomial(std::move(coeffs)), Polynomial::constant(1.0));
}

MapSpec MapSpec::make_family(MapKind kind, ComplexPoint lambda) {
  if (!finite(lambda) || lambda == ComplexPoint{}) {
    throw Error(ErrorKind::InvalidMap, "family parameter lambda must be finite and nonzero");
  }
  MapSpec m;
  m.kind_ = kind;
  m.lambda_ = lambda;
  return m;
}

MapSpec MapSpec::exp_family(ComplexPoint lambda) { return make_family(MapKind::Exp, lambda); }
MapSpec MapSpec::sin_family(ComplexPoint lambda) { return make_family(MapKind::Sin, lambda); }
MapSpec MapSpec::cos_family(ComplexPoint lambda) { return make_family(MapKind::Cos, lambda); }
MapSpec MapSpec::tan_family(ComplexPoint lambda) { return make_family(MapKind::Tan, lambda); }

bool MapSpec::is_polynomial() const { return is_rational() && rat_->den.degree() == 0; }

bool MapSpec::is_entire() const {
  switch (kind_) {
    case MapKind::Exp:
    case MapKind::Sin:
    case MapKind::Cos: return true;
    case MapKind::Tan: return false;
    default: return is_polynomial();
  }
}

std::optional<int> MapSpec::degree() const {
  if (!is_rational()) return std::nullopt;
  return rat_->degree;
}

// ---------------------------------------------------------------------------
// Stepping kernels

MapSpec::ChartStep MapSpec::rational_step(const ChartPoint& w) const {
  const RationalData& d = *rat_;
  const bool r = w.reciprocal;
  const ComplexPoint c = w.coord;
  const auto [p, dp] = (r ? d.rnum : d.num).eval_with_derivative(c);
  const auto [q, dq] = (r ? d.rden : d.den).eval_with_derivative(c);
  const double np = std::norm(p), nq = std::norm(q);
  if (np == 0.0 && nq == 0.0) return {ChartPoint{}, -kInf};
  const ComplexPoint wronskian = dp * q - p * dq;
  const double log_factor = std::log1p(std::norm(c)) + std::log(std::abs(wronskian)) - std::log(np + nq);
  if (np <= nq) return {ChartPoint{p / q, false}, log_factor};
  return {ChartPoint{q / p, true}, log_factor};
}

double MapSpec::rational_log_abs_deriv(const ChartPoint& w) const {
  const RationalData& d = *rat_;
  const bool r = w.reciprocal;
  const ComplexPoint c = w.coord;
  const auto [p, dp] = (r ? d.rnum : d.num).eval_with_derivative(c);
  const auto [q, dq] = (r ? d.rden : d.den).eval_with_derivative(c);
  const double base = std::log(std::abs(dp * q - p * dq)) - 2.0 * std::log(std::abs(q));
  // w = 1/c, so dw/dc = -1/c^2.
  return r ? base + 2.0 * std::log(std::abs(c)) : base;
}

MapSpec::FiniteStep MapSpec::transcendental_step(ComplexPoint w, double max_log_abs) const {
  const ComplexPoint u = lambda_ * w;
  const double log_lambda = std::log(std::abs(lambda_));
  const double log_w = std::log(std::abs(w));
  FiniteStep s{};
  double log_deriv = 0.0;
  switch (kind_) {
    case MapKind::Exp:
      s.log_abs_next = u.real();
      log_deriv = log_lambda + u.real();
      if (s.log_abs_next <= max_log_abs) s.next = std::exp(u);
      break;
    case MapKind::Sin:
      s.log_abs_next = log_abs_sin(u);
      log_deriv = log_lambda + log_abs_cos(u);
      if (s.log_abs_next <= max_log_abs) s.next = std::sin(u);
      break;
    case MapKind::Cos:
      s.log_abs_next = log_abs_cos(u);
      log_deriv = log_lambda + log_abs_sin(u);
      if (s.log_abs_next <= max_log_abs) s.next = std::cos(u);
      break;
    case MapKind::Tan: {
      const double ls = log_abs_sin(u), lc = log_abs_cos(u);
      s.log_abs_next = ls - lc;
      // (1+|w|^2)|lambda| / (|cos u|^2 + |sin u|^2), and the sum is cosh(2 Im u).
      s.log_factor = log1p_sq_from_log(log_w) + log_lambda - log_cosh(2.0 * u.imag());
      if (std::isfinite(s.log_abs_next) || s.log_abs_next < 0.0) s.next = std::tan(u);
      return s;
    }
    default: throw Error(ErrorKind::InvalidArgument, "transcendental_step called on a rational map");
  }
  s.log_factor = log1p_sq_from_log(log_w) + log_deriv - softplus(2.0 * s.log_abs_next);
  return s;
}

// ---------------------------------------------------------------------------
// Pointwise operations

SpherePoint eval(const MapSpec& map, const SpherePoint& z) {
  if (map.is_rational()) return map.rational_step(ChartPoint::from(z)).next.to_sphere();
  if (z.is_infinity()) throw Error(ErrorKind::EntireAtInfinity, "transcendental map evaluated at infinity");
  const ComplexPoint u = map.lambda() * z.value();
  ComplexPoint v;
  switch (map.kind()) {
    case MapKind::Exp: v = std::exp(u); break;
    case MapKind::Sin: v = std::sin(u); break;
    case MapKind::Cos: v = std::cos(u); break;
    default:
      if (std::cos(u) == ComplexPoint{}) return SpherePoint::infinity();
      v = std::tan(u);
  }
  if (!finite(v)) return SpherePoint::infinity();
  return SpherePoint(v);
}

double log_abs_eval(const MapSpec& map, ComplexPoint z) {
  const ComplexPoint u = map.lambda() * z;
  switch (map.kind()) {
    case MapKind::Exp: return u.real();
    case MapKind::Sin: return log_abs_sin(u);
    case MapKind::Cos: return log_abs_cos(u);
    case MapKind::Tan: return log_abs_sin(u) - log_abs_cos(u);
    default: return map.numerator().log_abs(z) - map.denominator().log_abs(z);
  }
}

double log_abs_deriv(const MapSpec& map, ComplexPoint z) {
  const ComplexPoint u = map.lambda() * z;
  const double log_lambda = std::log(std::abs(map.lambda()));
  switch (map.kind()) {
    case MapKind::Exp: return log_lambda + u.real();
    case MapKind::Sin: return log_lambda + log_abs_cos(u);
    case MapKind::Cos: return log_lambda + log_abs_sin(u);
    case MapKind::Tan: return log_lambda - 2.0 * log_abs_cos(u);
    default: break;
  }
  const int d = *map.degree();
  if (std::abs(z) <= 1.0) {
    const auto [p, dp] = map.numerator().eval_with_derivative(z);
    const auto [q, dq] = map.denominator().eval_with_derivative(z);
    return std::log(std::abs(dp * q - p * dq)) - 2.0 * std::log(std::abs(q));
  }
  // f(z) = g(1/z) with g = rev(P)/rev(Q), so |f'(z)| = |g'(1/z)| / |z|^2.
  const ComplexPoint v = 1.0 / z;
  const Polynomial rp = map.numerator().reversed(d), rq = map.denominator().reversed(d);
  const auto [p, dp] = rp.eval_with_derivative(v);
  const auto [q, dq] = rq.eval_with_derivative(v);
  return std::log(std::abs(dp * q - p * dq)) - 2.0 * std::log(std::abs(q)) - 2.0 * std::log(std::abs(z));
}

double log_chordal_deriv(const MapSpec& map, const SpherePoint& w) {
  if (map.is_rational()) return map.rational_step(ChartPoint::from(w)).log_factor;
  if (w.is_infinity()) throw Error(ErrorKind::EntireAtInfinity, "transcendental map evaluated at infinity");
  return map.transcendental_step(w.value(), kInf).log_factor;
}

double chordal_deriv(const MapSpec& map, const SpherePoint& w) { return std::exp(log_chordal_deriv(map, w)); }

std::optional<int> degree(const MapSpec& map) { return map.degree(); }

// ---------------------------------------------------------------------------
// Maximum modulus

double log_max_modulus(const MapSpec& map, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "radius must be positive and finite");
  if (map.kind() == MapKind::Tan) {
    throw Error(ErrorKind::InvalidArgument, "maximum modulus needs an entire map or a pole-free rational map");
  }
  if (map.is_rational()) {
    for (const auto& q : map.poles()) {
      if (std::abs(std::abs(q.value) - r) < 1e-9) throw Error(ErrorKind::PoleOnCircle, "pole within 1e-9 of |z| = r");
    }
  }
  auto g = [&](double theta) { return log_abs_eval(map, std::polar(r, theta)); };

  const double h = 2.0 * std::numbers::pi / kModulusSamples;
  int best = 0;
  double best_val = -kInf;
  for (int j = 0; j < kModulusSamples; ++j) {
    const double v = g(h * j);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  // Golden-section search on the bracket around the best sample.
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

double max_modulus(const MapSpec& map, double r) { return std::exp(log_max_modulus(map, r)); }

std::vector<IteratedModulus> iterated_max_modulus(const MapSpec& map, double r, int n) {
  if (!map.is_entire()) throw Error(ErrorKind::InvalidArgument, "iterated maximum modulus needs an entire map");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be at least 1");
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");

  std::vector<IteratedModulus> out;
  out.reserve(static_cast<std::size_t>(n));
  double s = std::log(r);                       // log of the current argument
  double ls = s > 0.0 ? std::log(s) : -kInf;    // log log of the current argument
  for (int k = 0; k < n; ++k) {
    IteratedModulus next{};
    if (s <= kLogMaxArgument) {
      next.log_m = log_max_modulus(map, std::exp(s));
      next.loglog_m = next.log_m > 0.0 ? std::log(next.log_m) : -kInf;
    } else if (map.is_polynomial()) {
      // log M(R) = log|a_d| + d log R once the leading term dominates.
      const double deg = static_cast<double>(*map.degree());
      const double log_lead =
          std::log(std::abs(map.numerator().leading())) - std::log(std::abs(map.denominator().leading()));
      if (std::isfinite(s)) {
        next.log_m = log_lead + deg * s;
        next.loglog_m = std::log(next.log_m);
      } else {
        next.log_m = kInf;
        next.loglog_m = std::log(deg) + ls;
      }
    } else {
      // exp: log M(R) = |lambda| R; sin, cos: |lambda| R - log 2 up to e^{-2|lambda|R}.
      next.loglog_m = std::log(std::abs(map.lambda())) + s;
      next.log_m = std::exp(next.loglog_m);
    }
    out.push_back(next);
    s = next.log_m;
    ls = next.loglog_m;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Composition

MapSpec compose(const MapSpec& f, const MapSpec& g) {
  if (!f.is_rational() || !g.is_rational()) throw Error(ErrorKind::InvalidArgument, "compose needs rational maps");
  const int d = *f.degree();
  const Polynomial& a = g.numerator();
  const Polynomial& b = g.denominator();
  std::vector<Polynomial> apow{Polynomial::constant(1.0)}, bpow{Polynomial::constant(1.0)};
  for (int i = 1; i <= d; ++i) {
    apow.push_back(apow.back() * a);
    bpow.push_back(bpow.back() * b);
  }
  Polynomial num = Polynomial::constant(0.0), den = Polynomial::constant(0.0);
  const auto& p = f.numerator().coeffs();
  const auto& q = f.denominator().coeffs();
  for (int i = 0; i <= d; ++i) {
    const Polynomial term = apow[static_cast<std::size_t>(i)] * bpow[static_cast<std::size_t>(d - i)];
    if (static_cast<std::size_t>(i) < p.size()) num = num + p[static_cast<std::size_t>(i)] * term;
    if (static_cast<std::size_t>(i) < q.size()) den = den + q[static_cast<std::size_t>(i)] * term;
  }
  auto trim = [](const Polynomial& x) {
    std::vector<ComplexPoint> c = x.coeffs();
    while (c.size() > 1 && c.back() == ComplexPoint{}) c.pop_back();
    return c;
  };
  std::vector<ComplexPoint> nc = trim(num), dc = trim(den);
  // Compositions of reduced maps are reduced; the numerical common-root test
  // loses accuracy at high degree, so it is skipped here.
  if (dc.size() == 1) {
    for (auto& c : nc) c /= dc[0];
    return MapSpec::make_rational(MapKind::Polynomial, Polynomial(std::move(nc)), Polynomial::constant(1.0), false);
  }
  return MapSpec::make_rational(MapKind::Rational, Polynomial(std::move(nc)), Polynomial(std::move(dc)), false);
}

MapSpec rational_iterate(const MapSpec& f, int n) {
  if (!f.is_rational()) throw Error(ErrorKind::InvalidArgument, "rational_iterate needs a rational map");
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be non-negative");
  if (n == 0) return MapSpec::identity();
  MapSpec out = f;
  for (int k = 1; k < n; ++k) out = compose(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

double number_from_json(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    double out = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw Error(ErrorKind::InvalidMap, "malformed decimal string '" + s + "'");
    }
    return out;
  }
  throw Error(ErrorKind::InvalidMap, "expected a number or decimal string");
}

ComplexPoint complex_from_json(const nlohmann::json& v) {
  if (v.is_array()) {
    if (v.size() != 2) throw Error(ErrorKind::InvalidMap, "complex values are [re, im] pairs");
    return {number_from_json(v[0]), number_from_json(v[1])};
  }
  return {number_from_json(v), 0.0};
}

std::vector<ComplexPoint> coeffs_from_json(const nlohmann::json& v) {
  if (!v.is_array()) throw Error(ErrorKind::InvalidMap, "coefficient lists must be arrays");
  std::vector<ComplexPoint> out;
  for (const auto& c : v) out.push_back(complex_from_json(c));
  return out;
}

nlohmann::json complex_to_json(ComplexPoint z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json coeffs_to_json(const Polynomial& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (ComplexPoint c : p.coeffs()) arr.push_back(complex_to_json(c));
  return arr;
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::InvalidMap, "unknown map key '" + key + "'");
    }
  }
}

}  // namespace

nlohmann::json to_json(const MapSpec& map) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(map.kind()));
  switch (map.kind()) {
    case MapKind::Rational:
      j["num"] = coeffs_to_json(map.numerator());
      j["den"] = coeffs_to_json(map.denominator());
      break;
    case MapKind::Polynomial: j["coeffs"] = coeffs_to_json(map.numerator()); break;
    default: j["lambda"] = complex_to_json(map.lambda());
  }
  return j;
}

MapSpec map_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorKind::InvalidMap, "map spec must be an object with a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "rational") {
    reject_unknown_keys(j, {"kind", "num", "den"});
    if (!j.contains("num") || !j.contains("den")) throw Error(ErrorKind::InvalidMap, "rational needs num and den");
    return MapSpec::rational(coeffs_from_json(j["num"]), coeffs_from_json(j["den"]));
  }
  if (kind == "polynomial") {
    reject_unknown_keys(j, {"kind", "coeffs"});
    if (!j.contains("coeffs")) throw Error(ErrorKind::InvalidMap, "polynomial needs coeffs");
    return MapSpec::polynomial(coeffs_from_json(j["coeffs"]));
  }
  reject_unknown_keys(j, {"kind", "lambda"});
  const ComplexPoint lambda = j.contains("lambda") ? complex_from_json(j["lambda"]) : ComplexPoint{1.0};
  if (kind == "exp") return MapSpec::exp_family(lambda);
  if (kind == "sin") return MapSpec::sin_family(lambda);
  if (kind == "cos") return MapSpec::cos_family(lambda);
  if (kind == "tan") return MapSpec::tan_family(lambda);
  throw Error(ErrorKind::InvalidMap, "unknown map kind '" + kind + "'");
}

MapSpec parse_map_argument(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::InvalidMap, std::string("malformed JSON: ") + e.what());
    }
    return map_from_json(j);
  }
  if (text == "id") return MapSpec::identity();
  if (text == "z2") return MapSpec::polynomial({0.0, 0.0, 1.0});
  if (text == "z3") return MapSpec::polynomial({0.0, 0.0, 0.0, 1.0});
  if (text == "exp") return MapSpec::exp_family();
  if (text == "sin") return MapSpec::sin_family();
  if (text == "cos") return MapSpec::cos_family();
  if (text == "tan") return MapSpec::tan_family();
  if (text.starts_with("quad:")) {
    const std::string body(text.substr(5));
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::InvalidMap, "quad:<re>,<im> expected");
    const double re = number_from_json(body.substr(0, comma));
    const double im = number_from_json(body.substr(comma + 1));
    return MapSpec::polynomial({ComplexPoint(re, im), 0.0, 1.0});
  }
  throw Error(ErrorKind::InvalidMap, "unknown map '" + std::string(text) + "'");
}

}  // namespace sphere_growth
