#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dyadlab/haar.hpp"
#include "dyadlab/open_set.hpp"

using namespace dyadlab;

namespace {

GridFunction2D<Surd> randomGrid(int N, std::mt19937_64& rng) {
  GridFunction2D<Surd> f(N);
  std::uniform_int_distribution<long> d(-20, 20);
  for (auto& v : f.values) v = Surd::fraction(d(rng), 7);
  return f;
}

}  // namespace

TEST_CASE("analysis and synthesis are exact inverses") {
  std::mt19937_64 rng(3);
  for (int N = 1; N <= 4; ++N) {
    auto f = randomGrid(N, rng);
    auto F = analyze(f);
    CHECK(synthesize(F).values == f.values);
    CHECK(analyze(synthesize(F)) == F);
  }
}

TEST_CASE("fast analysis matches one inner product per basis function") {
  std::mt19937_64 rng(5);
  auto f = randomGrid(3, rng);
  CHECK(analyze(f) == analyzeDirect(f));
}

TEST_CASE("Parseval: cell quadrature equals coefficient energy") {
  std::mt19937_64 rng(7);
  for (int N = 1; N <= 4; ++N) {
    auto f = randomGrid(N, rng);
    auto F = analyze(f);
    CHECK(lpNormPower(f, 2) == dot(F, F));
  }
}

TEST_CASE("h x h on the unit square") {
  auto g = haarBasisFunction<Surd>(BasisKind::Haar, parseRectangle("0:0|0:0"), 1);
  CHECK(g.at(1, 1) == Surd(1));
  CHECK(g.at(0, 0) == Surd(1));
  CHECK(g.at(0, 1) == Surd(-1));
  CHECK(g.at(1, 0) == Surd(-1));
}

TEST_CASE("normalized indicator of a quadrant") {
  auto g = haarBasisFunction<Surd>(BasisKind::Average, parseRectangle("1:0|1:0"), 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(g.at(i, j) == Surd((i < 2 && j < 2) ? 4 : 0));
}

TEST_CASE("orthonormality of the product basis") {
  const int N = 3;
  auto rects = rectanglesUpTo(N - 1);
  for (std::size_t a = 0; a < rects.size(); a += 3) {
    auto ha = haarBasisFunction<Surd>(BasisKind::Haar, rects[a], N);
    CHECK(lpNormPower(ha, 2) == Surd(1));
    for (std::size_t b = 0; b < rects.size(); b += 5) {
      auto hb = haarBasisFunction<Surd>(BasisKind::Haar, rects[b], N);
      CHECK(innerProduct(ha, hb) == Surd(a == b ? 1 : 0));
    }
    // Haar functions have mean zero against averages on their own rectangle
    CHECK(innerProduct(ha, haarBasisFunction<Surd>(BasisKind::Average, rects[a], N)) == Surd(0));
    CHECK(averageOver(ha, rects[a]) == Surd(0));
  }
  GridFunction2D<Surd> one(N);
  for (auto& v : one.values) v = Surd(1);
  CHECK(innerProduct(one, one) == Surd(1));
}

TEST_CASE("analysis of basis functions and constants") {
  const int N = 2;
  for (const auto& R : rectanglesUpTo(N - 1)) {
    auto F = analyze(haarBasisFunction<Surd>(BasisKind::Haar, R, N));
    for (int a = 0; a < F.side(); ++a)
      for (int c = 0; c < F.side(); ++c)
        CHECK(F.at(a, c) == Surd((a == basisIndex(R.x) && c == basisIndex(R.y)) ? 1 : 0));
  }
  GridFunction2D<Surd> one(N);
  for (auto& v : one.values) v = Surd(1);
  auto F = analyze(one);
  CHECK(F.at(0, 0) == Surd(1));
  CHECK(F.support().empty());
}

TEST_CASE("pointwise products") {
  const int N = 2;
  // h_{0:0}(x) h_{1:0}(x) = -h_{1:0}(x), embedded constantly in y
  auto a = haarBasisFunction<Surd>(BasisKind::HaarAverage, parseRectangle("0:0|0:0"), N);
  auto b = haarBasisFunction<Surd>(BasisKind::HaarAverage, parseRectangle("1:0|0:0"), N);
  auto p = pointwiseProduct(a, b);
  for (std::size_t k = 0; k < p.values.size(); ++k) CHECK(p.values[k] == -b.values[k]);

  std::mt19937_64 rng(1);
  auto f = randomGrid(N, rng);
  GridFunction2D<Surd> one(N), zero(N);
  for (auto& v : one.values) v = Surd(1);
  CHECK(pointwiseProduct(one, f).values == f.values);
  CHECK(pointwiseProduct(zero, f).values == zero.values);
}

TEST_CASE("averages") {
  const int N = 3;
  auto U = DyadicOpenSet::fromRectangles(N, {parseRectangle("1:0|2:1"), parseRectangle("3:7|3:7")});
  auto ind = U.indicator<Surd>();
  for (const auto& R : rectanglesUpTo(N)) {
    const long cells = cellCount(R.x, N) * cellCount(R.y, N);
    CHECK(averageOver(ind, R) == Surd::fraction(U.countIn(R), cells));
  }
  // <h_{I^} (x) 1> over I x J = hatSign(I) |I^|^{-1/2}
  const int M = 2;
  for (const auto& I : intervalsUpTo(M, 1))
    for (const auto& J : intervalsUpTo(M)) {
      auto g = haarBasisFunction<Surd>(BasisKind::HaarAverage, DyadicRectangle{parent(I), DyadicInterval(0, 0)}, M);
      CHECK(averageOver(g, DyadicRectangle{I, J}) == Surd(hatSign(I)) * ScalarTraits<Surd>::sqrt2Pow(parent(I).level));
    }
}

TEST_CASE("level overflow is rejected") {
  CHECK_THROWS_AS(haarBasisFunction<Surd>(BasisKind::Haar, parseRectangle("2:0|0:0"), 2), Error);
  HaarExpansion<Surd> b(2);
  CHECK_THROWS_AS(b.set(parseRectangle("0:0|2:1"), Surd(1)), Error);
}
