#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "sphere_growth/errors.hpp"
#include "sphere_growth/quadrature.hpp"

using namespace sphere_growth;
using C = std::complex<double>;

namespace {

const MapSpec z2 = MapSpec::polynomial({0.0, 0.0, 1.0});

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("identity closed form r^2/(1+r^2)") {
  for (double r : {0.3, 1.0, 2.0}) {
    const AreaEstimate a = spherical_area(z2, 0, Region::disk(0.0, r), Tolerance{});
    CHECK(a.value == doctest::Approx(r * r / (1.0 + r * r)).epsilon(1e-6));
    CHECK(a.error_est >= 0.0);
    CHECK_FALSE(a.flagged());
  }
  // Off-center disk against a polar oracle.
  const C c{0.7, -0.4};
  const double ref = oracle::polar_disk_mean([](C z) { return 1.0 / std::pow(1.0 + std::norm(z), 2); }, c, 0.5,
                                             2000, 2000);
  CHECK(spherical_area(MapSpec::identity(), 1, Region::disk(c, 0.5), Tolerance{}).value ==
        doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("whole sphere gives the degree") {
  CHECK(spherical_area(z2, 1, Region::whole_sphere(), Tolerance{}).value == doctest::Approx(2.0).epsilon(1e-3));
  const MapSpec m = MapSpec::rational({1.0, 0.0, 0.0, C{0.5, 0.5}}, {C{0.0, 1.0}, 2.0});
  CHECK(spherical_area(m, 1, Region::whole_sphere(), Tolerance{1e-6, 1e-5, 12}).value ==
        doctest::Approx(3.0).epsilon(2e-3));
}

TEST_CASE("covering closed form on D(0, 0.4)") {
  for (int n = 1; n <= 3; ++n) {
    const AreaEstimate a = spherical_area(z2, n, Region::disk(0.0, 0.4), Tolerance{0.0, 1e-6, 12});
    CHECK(a.value == doctest::Approx(oracle::monomial_disk_area(2, n, 0.4)).epsilon(1e-4));
  }
  // 8 s^2 / (1 + s^2) with s = 0.4^8.
  CHECK(oracle::monomial_disk_area(2, 3, 0.4) == doctest::Approx(3.436e-6).epsilon(1e-3));
}

TEST_CASE("annulus and rectangle regions") {
  // Identity over an annulus: b^2/(1+b^2) - a^2/(1+a^2).
  const AreaEstimate a = spherical_area(z2, 0, Region::annulus(0.0, 0.5, 1.5), Tolerance{});
  CHECK(a.value == doctest::Approx(1.5 * 1.5 / 3.25 - 0.25 / 1.25).epsilon(1e-6));
  // Identity over a square, against a fine midpoint rule.
  double ref = 0.0;
  const int m = 2000;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const C z{-0.5 + (i + 0.5) / m, 0.2 + (j + 0.5) / m};
      ref += 1.0 / std::pow(1.0 + std::norm(z), 2);
    }
  }
  ref /= static_cast<double>(m) * m * std::numbers::pi;
  CHECK(spherical_area(z2, 0, Region::rect({-0.5, 0.2}, {0.5, 1.2}), Tolerance{}).value ==
        doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("additivity over disk and annulus") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 3; ++t) {
    const MapSpec f = MapSpec::rational({C{g(rng), g(rng)}, C{g(rng), g(rng)}, 1.0}, {1.0, C{0.3 * g(rng), 0.0}});
    for (int n = 1; n <= 3; ++n) {
      const Tolerance tol{1e-9, 1e-6, 10};
      const AreaEstimate inner = spherical_area(f, n, Region::disk(0.0, 0.6), tol);
      const AreaEstimate ring = spherical_area(f, n, Region::annulus(0.0, 0.6, 1.3), tol);
      const AreaEstimate outer = spherical_area(f, n, Region::disk(0.0, 1.3), tol);
      const double budget = inner.error_est + ring.error_est + outer.error_est;
      CHECK(std::abs(inner.value + ring.value - outer.value) <= budget);
    }
  }
}

TEST_CASE("monotone in the region") {
  const MapSpec f = MapSpec::polynomial({C{-0.1, 0.65}, 0.0, 1.0});
  const Tolerance tol{1e-9, 1e-6, 10};
  for (int n = 1; n <= 3; ++n) {
    const AreaEstimate small = spherical_area(f, n, Region::disk({0.1, 0.1}, 0.3), tol);
    const AreaEstimate large = spherical_area(f, n, Region::disk({0.1, 0.1}, 0.6), tol);
    CHECK(small.value <= large.value + small.error_est + large.error_est);
  }
}

TEST_CASE("Euclidean area") {
  CHECK(euclidean_area(z2, 0, Region::disk(0.0, 1.0), Tolerance{}).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(euclidean_area(z2, 1, Region::disk(0.0, 1.0), Tolerance{}).value == doctest::Approx(2.0).epsilon(1e-5));
  double prev = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const AreaEstimate a = euclidean_area(z2, n, Region::disk(2.0, 0.25), Tolerance{1e-8, 1e-6, 12});
    CHECK(a.value > prev);
    prev = a.value;
  }
  const AreaEstimate big = euclidean_area(z2, 12, Region::disk(2.0, 0.25), Tolerance{1e-8, 1e-3, 6});
  CHECK(big.overflow);
  CHECK(std::isinf(big.value));
  CHECK(kind_of([] { euclidean_area(z2, 1, Region::whole_sphere(), Tolerance{}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("Monte-Carlo oracle") {
  const McEstimate id = mc_area(z2, 0, Region::disk(0.0, 1.0), 100000, 1);
  CHECK(std::abs(id.value - 0.5) <= 3.0 * id.std_error);
  const McEstimate sphere = mc_area(z2, 1, Region::whole_sphere(), 1000000, 42);
  CHECK(std::abs(sphere.value - 2.0) <= 3.0 * sphere.std_error);
  const McEstimate again = mc_area(z2, 1, Region::whole_sphere(), 1000000, 42);
  CHECK(again.value == sphere.value);
  CHECK(again.std_error == sphere.std_error);
  CHECK(kind_of([] { mc_area(z2, 1, Region::disk(0.0, 1.0), 999, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("worker count does not change the result") {
  const MapSpec f = MapSpec::polynomial({-1.0, 0.0, 1.0});
  const Region u = Region::disk({0.2, 0.3}, 0.5);
  const AreaEstimate one = spherical_area(f, 4, u, Tolerance{1e-9, 1e-5, 10}, Parallelism{1});
  for (unsigned w : {2u, 3u, 8u}) {
    const AreaEstimate many = spherical_area(f, 4, u, Tolerance{1e-9, 1e-5, 10}, Parallelism{w});
    CHECK(many.value == one.value);
    CHECK(many.error_est == one.error_est);
    CHECK(many.cells == one.cells);
  }
}

TEST_CASE("flags and errors") {
  const AreaEstimate sat = spherical_area(MapSpec::exp_family(), 4, Region::disk(5.0, 0.1), Tolerance{1e-8, 1e-3, 6});
  CHECK(sat.saturated_cells > 0);
  CHECK(sat.is_lower_bound());
  CHECK(sat.flagged());
  CHECK(kind_of([] { spherical_area(MapSpec::exp_family(), 1, Region::whole_sphere(), Tolerance{}); }) ==
        ErrorKind::EntireAtInfinity);
  CHECK(kind_of([] { spherical_area(MapSpec::tan_family(), 2, Region::disk(0.0, 0.1), Tolerance{}); }) ==
        ErrorKind::MeromorphicIterationUnsupported);
  CHECK(kind_of([] { spherical_area(z2, 1, Region::disk(0.0, 1.0), Tolerance{1e-8, 1e-6, 25}); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([] { spherical_area(z2, 1, Region::disk(0.0, 1.0), Tolerance{0.0, 0.0, 8}); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Region::annulus(0.0, 2.0, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Region::disk(0.0, 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("tan family at a single step") {
  // S(tan, D(0, 0.3)) against the polar oracle.
  const MapSpec t = MapSpec::tan_family();
  const double ref = oracle::polar_disk_mean([&](C z) { return oracle::density(t, z, 1); }, 0.0, 0.3, 1500, 1500);
  CHECK(spherical_area(t, 1, Region::disk(0.0, 0.3), Tolerance{}).value == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("CSV row") {
  AreaEstimate a;
  a.value = 0.1;
  a.error_est = 2e-9;
  a.cells = 17;
  CHECK(to_csv_row(a) == "0.10000000000000001,2.0000000000000001e-09,17,none");
  a.max_depth_hit = true;
  a.saturated_cells = 3;
  CHECK(flags_string(a) == "max_depth_hit|saturated=3");
  CHECK(csv_header_area() == "value,error_est,cells,flags");
}

TEST_CASE("region parsing") {
  CHECK(Region::parse("disk:0.5,-1,2").area() == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(Region::parse("sphere").is_whole_sphere());
  CHECK(Region::parse(Region::parse("annulus:0,0,1,2").to_string()).area() ==
        doctest::Approx(3.0 * std::numbers::pi));
  CHECK(kind_of([] { Region::parse("blob:1"); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Region::parse("rect:1,1,0,2"); }) == ErrorKind::InvalidArgument);
}
