#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "../oracles.hpp"
#include "sphere_growth/classifier.hpp"
#include "sphere_growth/errors.hpp"

using namespace sphere_growth;
using C = std::complex<double>;

namespace {

const MapSpec z2 = MapSpec::polynomial({0.0, 0.0, 1.0});

GrowthSeries synthetic(std::vector<double> logS, bool saturated = false) {
  GrowthSeries s;
  for (std::size_t i = 0; i < logS.size(); ++i) s.n_values.push_back(static_cast<int>(i) + 1);
  s.logS = std::move(logS);
  s.flags.saturated = saturated;
  s.slope = trailing_slope(s.n_values, s.logS);
  return s;
}

}  // namespace

TEST_CASE("trailing slope") {
  // Exact line over the trailing half; the leading transient is ignored.
  const auto s = trailing_slope({1, 2, 3, 4, 5, 6}, {40.0, -3.0, 0.5, 1.0, 1.5, 2.0});
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(0.5));
  CHECK(*trailing_slope({1, 2, 3, 4, 5}, {0.0, 0.0, 1.0, 2.0, 3.0}) == doctest::Approx(1.0));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_FALSE(trailing_slope({1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, inf, inf}).has_value());
  CHECK_FALSE(trailing_slope({1, 2, 3, 4}, {1, 2, 3, 4}).has_value());
}

TEST_CASE("decision rule") {
  CHECK(classify_point(synthetic({-5, -4.3, -3.6, -2.9, -2.2, -1.5})).kind == VerdictKind::Julia);
  // Fast but small: log growth 0.5 < log 10.
  CHECK(classify_point(synthetic({-5, -4.9, -4.8, -4.7, -4.6, -4.5})) == Verdict::fatou());
  CHECK(classify_point(synthetic({-5, -4.75, -4.5, -4.25, -4.0, -3.75})) == Verdict::inconclusive("weak growth"));
  CHECK(classify_point(synthetic({-1, -2, -4, -8, -16, -32})) == Verdict::fatou());
  CHECK(classify_point(synthetic({8, 8, 8, 8, 8, 8})) == Verdict::inconclusive("large area"));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(classify_point(synthetic({-3, -2, inf, inf, inf, inf}, true)) == Verdict::inconclusive("saturated"));
  CHECK(classify_point(synthetic({-3, -20, -inf, -inf, -inf, -inf})) == Verdict::fatou());
  CHECK(classify_point(synthetic({-3, -2, inf, inf, inf, inf})) == Verdict::inconclusive("insufficient data"));
  CHECK(to_string(Verdict::inconclusive("saturated")) == "Inconclusive(saturated)");
}

// Six iterates so the trailing window holds three values.
TEST_CASE("series on the covering fixture") {
  const GrowthSeries s = growth_series(z2, 0.0, 0.4, 6, Tolerance{0.0, 1e-6, 12});
  for (std::size_t i = 0; i < s.logS.size(); ++i) {
    CHECK(s.logS[i] == doctest::Approx(std::log(oracle::monomial_disk_area(2, s.n_values[i], 0.4))).epsilon(1e-4));
    if (i > 0) CHECK(s.logS[i] < s.logS[i - 1]);
  }
  CHECK(classify_point(s) == Verdict::fatou());
}

TEST_CASE("repelling fixed point") {
  const GrowthSeries s = growth_series(z2, 1.0, 0.1, 6);
  CHECK(classify_point(s) == Verdict::julia());
  CHECK(*s.slope > 0.2);
  CHECK(classify_two_radius(z2, 1.0, 0.1, 6).kind == VerdictKind::Julia);
}

TEST_CASE("degree law") {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const DegreeEstimate d = estimate_log_degree(MapSpec::polynomial({-1.0, 0.0, 1.0}), phi, 0.05, 8);
  REQUIRE(d.log_d.has_value());
  CHECK(std::abs(*d.log_d - std::numbers::ln2) <= 0.1);
  CHECK_THROWS_AS(estimate_log_degree(MapSpec::exp_family(), 1.0, 0.1, 5), Error);
}

TEST_CASE("degree estimate does not get worse with more iterates") {
  double prev = std::numeric_limits<double>::infinity();
  for (int n_max = 5; n_max <= 8; ++n_max) {
    const DegreeEstimate d = estimate_log_degree(z2, 1.0, 0.1, n_max);
    REQUIRE(d.log_d.has_value());
    const double err = std::abs(*d.log_d - std::numbers::ln2);
    MESSAGE("n_max=" << n_max << " error=" << err);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("area bound from the spherical derivative") {
  // S(f^n, D(z,r)) <= Gamma^2 r^2 with Gamma the largest spherical derivative on the disk.
  for (C z : {C{0.3, 0.2}, C{-0.5, 0.4}, C{0.0, -0.7}}) {
    const double r = 0.1;
    for (int n = 1; n <= 6; ++n) {
      double gamma = 0.0;
      for (int i = 0; i <= 60; ++i) {
        for (int j = 0; j <= 60; ++j) {
          const C w = z + C{r * (i / 30.0 - 1.0), r * (j / 30.0 - 1.0)};
          if (std::abs(w - z) < r) gamma = std::max(gamma, oracle::spherical_derivative(z2, w, n));
        }
      }
      const AreaEstimate a = spherical_area(z2, n, Region::disk(z, r), growth_tolerance());
      CHECK(a.value <= gamma * gamma * r * r);
    }
  }
}

TEST_CASE("exp on the real line") {
  const GrowthSeries s = growth_series(MapSpec::exp_family(), 1.0, 0.2, 5);
  CHECK(s.flags.saturated);
  REQUIRE(s.first_saturated_n.has_value());
  CHECK(*s.first_saturated_n >= 3);
  CHECK(classify_point(s).kind != VerdictKind::Fatou);
}

TEST_CASE("escape oracle") {
  CHECK(escape_oracle(0.0, 2.0, 50));
  CHECK_FALSE(escape_oracle(0.0, 0.5, 50));
  CHECK_FALSE(escape_oracle(-1.0, 0.0, 50));
}

TEST_CASE("grid basics") {
  GridJob job;
  job.nx = 1;
  job.ny = 1;
  const GridResult one = render_grid(z2, job);
  CHECK(one.verdicts.size() == 1);
  CHECK(one.at(0, 0) == Verdict::fatou());  // the centre 0 is superattracting

  job.rect = Region::rect({0.0, 0.0}, {2.0, 1.0});
  job.nx = 4;
  job.ny = 2;
  CHECK(job.node(0, 0) == C{0.25, 0.75});
  CHECK(job.node(3, 1) == C{1.75, 0.25});
  job.nx = 0;
  CHECK_THROWS_AS(job.validate(), Error);
}

TEST_CASE("grid is independent of the worker count") {
  GridJob job;
  job.rect = Region::rect({-1.2, -1.2}, {1.2, 1.2});
  job.nx = 12;
  job.ny = 12;
  const GridResult a = render_grid(z2, job, Parallelism{1});
  const GridResult b = render_grid(z2, job, Parallelism{8});
  CHECK(a.verdicts == b.verdicts);
  CHECK(a.slopes == b.slopes);
  CHECK(slopes_csv(a) == slopes_csv(b));
}

TEST_CASE("PGM output") {
  GridResult g;
  g.nx = 40;
  g.ny = 2;
  g.verdicts.assign(80, Verdict::julia());
  g.verdicts[1] = Verdict::fatou();
  g.verdicts[2] = Verdict::inconclusive("saturated");
  g.slopes.assign(80, std::nullopt);
  const std::string pgm = to_pgm(g, "hello");
  CHECK(pgm.rfind("P2\n# hello\n40 2\n255\n", 0) == 0);
  std::size_t start = 0, values = 0;
  while (start < pgm.size()) {
    const std::size_t end = pgm.find('\n', start);
    CHECK(end - start <= 70);
    start = end + 1;
  }
  std::istringstream in(pgm.substr(pgm.find("255\n") + 4));
  int v, first3[3];
  while (in >> v) {
    if (values < 3) first3[values] = v;
    ++values;
  }
  CHECK(values == 80);
  CHECK(first3[0] == 255);
  CHECK(first3[1] == 0);
  CHECK(first3[2] == 128);
}
