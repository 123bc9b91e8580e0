#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sphere_growth/classifier.hpp"

using namespace sphere_growth;
using C = std::complex<double>;

// Full-size grids; each render takes a few minutes on one core.

TEST_CASE("verdicts are stable when the tolerance is halved") {
  const MapSpec z2 = MapSpec::polynomial({0.0, 0.0, 1.0});
  GridJob job;
  const GridResult base = render_grid(z2, job);
  job.tol.abs_tol *= 0.5;
  job.tol.rel_tol *= 0.5;
  const GridResult fine = render_grid(z2, job);
  std::size_t flips = 0;
  for (std::size_t k = 0; k < base.verdicts.size(); ++k) flips += base.verdicts[k].kind != fine.verdicts[k].kind;
  const double share = static_cast<double>(flips) / static_cast<double>(base.verdicts.size());
  MESSAGE("flips=" << flips << " share=" << share);
  CHECK(share <= 0.02);
}

TEST_CASE("basilica grid against the escape-time boundary") {
  const C c{-1.0, 0.0};
  const MapSpec f = MapSpec::polynomial({c, 0.0, 1.0});
  GridJob job;
  const GridResult g = render_grid(f, job);
  std::vector<char> escapes(static_cast<std::size_t>(job.nx * job.ny));
  for (int j = 0; j < job.ny; ++j) {
    for (int i = 0; i < job.nx; ++i) escapes[static_cast<std::size_t>(j * job.nx + i)] = escape_oracle(c, job.node(i, j), 200);
  }
  auto esc = [&](int i, int j) { return escapes[static_cast<std::size_t>(j * job.nx + i)]; };
  std::size_t agree = 0;
  for (int j = 0; j < job.ny; ++j) {
    for (int i = 0; i < job.nx; ++i) {
      bool boundary = false;
      const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int a = i + di[k], b = j + dj[k];
        if (a >= 0 && a < job.nx && b >= 0 && b < job.ny && esc(a, b) != esc(i, j)) boundary = true;
      }
      agree += boundary == (g.at(i, j).kind == VerdictKind::Julia);
    }
  }
  const double share = static_cast<double>(agree) / static_cast<double>(job.nx * job.ny);
  MESSAGE("agreement=" << share);
  CHECK(share >= 0.85);
}
