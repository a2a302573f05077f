#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dyadlab/continuum.hpp"
#include "dyadlab/dyadic.hpp"

using namespace dyadlab;

TEST_CASE("strip membership and discrete area") {
  for (int e = 2; e <= 6; ++e)
    for (int r = 3; r <= 5; ++r) {
      const double eps = std::ldexp(1.0, -e);
      auto psi = buildStrip(eps, e + r);
      // 2 eps K diagonals, the m-th carrying m cells: area eps (2 - h)
      CHECK(psi.area() == doctest::Approx(eps * (2 - psi.h)).epsilon(1e-14));
      std::int64_t direct = 0;
      if (psi.side() <= 256) {
        for (std::int64_t i = 0; i < psi.side(); ++i)
          for (std::int64_t j = 0; j < psi.side(); ++j) {
            const double centre = (static_cast<double>(i + j) + 1) * psi.h;
            const bool in = centre >= 1 - eps && centre < 1 + eps;
            CHECK(psi.at(i, j) == in);
            direct += in;
          }
        CHECK(direct == psi.cellCount());
      }
    }
}

TEST_CASE("strip preconditions") {
  CHECK_THROWS_AS(buildStrip(0.5, 8), Error);
  CHECK_THROWS_AS(buildStrip(0.0, 8), Error);
  CHECK_THROWS_AS(buildStrip(1.0 / 8, 5), Error);  // h = eps/4
  CHECK_NOTHROW(buildStrip(1.0 / 8, 6));
  CHECK_THROWS_AS(continuumTable(1, 3, 16), Error);
  CHECK_THROWS_AS(continuumTable(3, 5, 12), Error);
}

TEST_CASE("autocorrelation against the pair histogram") {
  for (int e = 2; e <= 3; ++e)
    for (int r = 3; r <= 4; ++r) {
      auto psi = buildStrip(std::ldexp(1.0, -e), e + r);
      auto brute = autocorrelateBruteForce(psi);
      auto fast = autocorrelate(psi), serial = autocorrelateSerial(psi);
      CHECK(fast.counts == brute.counts);
      CHECK(serial.counts == brute.counts);
      CHECK(fast.count(0, 0) == psi.cellCount());
      // symmetric under negation of the shift
      for (std::int64_t a = -fast.A; a <= fast.A; a += 3)
        for (std::int64_t b = -10; b <= 10; ++b) CHECK(fast.count(a, b) == fast.count(-a, -b));
    }
}

TEST_CASE("quadrant norms from the pair list") {
  auto psi = buildStrip(0.25, 5);
  auto acf = autocorrelateBruteForce(psi);
  auto q = quadrantNorms(acf);
  const double h2 = psi.h * psi.h;
  double pp = 0, pm = 0, total = 0;
  for (std::int64_t a = -acf.A; a <= acf.A; ++a)
    for (std::int64_t b = -2 * acf.A - acf.W; b <= 2 * acf.A + acf.W; ++b) {
      const double v = acf.value(a, b);
      total += v * v * h2;
      if (a > 0 && b > 0) pp += v * v * h2;
      if (a > 0 && b < 0) pm += v * v * h2;
    }
  CHECK(q.total == doctest::Approx(std::sqrt(total)).epsilon(1e-12));
  CHECK(q.pp == doctest::Approx(std::sqrt(pp)).epsilon(1e-12));
  CHECK(q.pm == doctest::Approx(std::sqrt(pm)).epsilon(1e-12));
  CHECK(q.pp < q.pm);
}

TEST_CASE("positive-quadrant support radius is of order eps") {
  for (int e = 3; e <= 6; ++e) {
    const double eps = std::ldexp(1.0, -e);
    auto psi = buildStrip(eps, e + 4);
    const double r = positiveSupportRadius(autocorrelate(psi));
    CHECK(r > eps);
    CHECK(r <= 2 * eps);
  }
}

TEST_CASE("log-log slope fit") {
  std::vector<double> x{0.5, 0.25, 0.125, 0.0625}, y;
  for (double v : x) y.push_back(3 * std::pow(v, 1.5));
  auto f = slopeFit(x, y);
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(slopeFit({0.5}, {1.0}), Error);
}

TEST_CASE("exponents of the strip counterexample") {
  auto rows = continuumTable(3, 7, 16);
  auto s = continuumSlopes(rows);
  CHECK(std::fabs(s.n2.slope - 0.5) <= 0.15);
  CHECK(std::fabs(s.npp.slope - 2.0) <= 0.15);
  CHECK(std::fabs(s.npm.slope - 1.5) <= 0.15);
  CHECK(std::fabs(s.n4sq.slope - 1.5) <= 0.15);
  CHECK(std::fabs(s.n4.slope - 0.75) <= 0.15);
  CHECK(std::fabs(s.normalizedNpp.slope - 1.0) <= 0.15);
  CHECK(s.normalizedN2Max <= 1.1 * s.normalizedN2Min);
  CHECK(s.normalizedRatioDecreasing);
  for (const auto& r : rows) CHECK(r.n2 * r.n2 == doctest::Approx(r.area));
}
