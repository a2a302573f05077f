#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "dyadlab/experiments.hpp"

using namespace dyadlab;

TEST_CASE("scale-skipping generator only fills admissible rectangles") {
  for (int N = 2; N <= 5; ++N) {
    SymbolGenerator g;
    g.kind = GeneratorKind::ScaleSkipping;
    g.N = N;
    for (const auto& R : g.eligible()) {
      CHECK(R.x.isEven());
      CHECK(R.y.isEven());
      CHECK(R.x.level < N - 1);
      CHECK(R.y.level < N - 1);
    }
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
      auto b = g.draw<double>(rng);
      CHECK(skipsScales(b));
      for (const auto& R : b.support()) CHECK(isScaleSkippingRect(R, N));
    }
  }
  // at N = 2 and N = 3 the root is the only admissible rectangle
  SymbolGenerator g3;
  g3.kind = GeneratorKind::ScaleSkipping;
  g3.N = 3;
  CHECK(g3.eligible() == std::vector<DyadicRectangle>{parseRectangle("0:0|0:0")});
}

TEST_CASE("draws are reproducible from the seed") {
  SymbolGenerator g;
  g.N = 3;
  std::mt19937_64 a(trialSeed(9, 3, 4)), b(trialSeed(9, 3, 4)), c(trialSeed(9, 3, 5));
  auto x = g.draw<Surd>(a), y = g.draw<Surd>(b), z = g.draw<Surd>(c);
  CHECK(x == y);
  CHECK_FALSE(x == z);
  std::set<std::uint64_t> seeds;
  for (int t = 0; t < 100; ++t) seeds.insert(trialSeed(1, 3, t));
  CHECK(seeds.size() == 100);
  CHECK((parseGeneratorKind(toString(GeneratorKind::RectangleLocalized)) == GeneratorKind::RectangleLocalized));
  CHECK_THROWS_AS(parseGeneratorKind("nope"), Error);
}

TEST_CASE("rectangle-localized symbols live inside one rectangle") {
  SymbolGenerator g;
  g.kind = GeneratorKind::RectangleLocalized;
  g.N = 4;
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto b = g.draw<double>(rng);
    auto supp = b.support();
    if (supp.empty()) continue;
    // some rectangle of the support contains all the others
    bool found = false;
    for (const auto& R : supp) {
      bool all = true;
      for (const auto& Q : supp) all = all && R.contains(Q);
      found = found || all;
    }
    CHECK(found);
  }
}

TEST_CASE("parallel trial batteries are deterministic") {
  auto a = verifyBmoRecBound(12, {2, 3}, 17), b = verifyBmoRecBound(12, {2, 3}, 17);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].ratio == b.rows[k].ratio);
    CHECK(a.rows[k].seed == b.rows[k].seed);
  }
  CHECK(a.maxRatio.size() == 2);
  CHECK(a.growth() == b.growth());
}

TEST_CASE("small exact batteries") {
  CHECK(verifyMasterIdentity(3, {1, 2}, 2).ok());
  CHECK(verifyTestedOperators(2, 2, 2).ok());
  CHECK(verifyPOperators(2, 2, 2).ok());
  CHECK(verifyShiftSquares(3).ok());
  auto v = verifyMainskipVanishing(3, 3, 2);
  CHECK(v.ok());
  CHECK(verifyDeepAnnihilation(3, 4, 2, false).ok());
  CHECK(supportMonotonicity(2, false).violations == 0);
  CHECK(supportMonotonicity(2, true).violations == 0);
}

TEST_CASE("single-one signatures") {
  for (Part p : kAllParts) {
    const int ones = signatureOnes(signatureClassifier(partName(p)));
    if (hasD(p))
      CHECK(ones <= 1);
    else
      CHECK(ones == 2);
  }
  auto rep = verifySingleOneParts(3, 2, 1);
  for (const auto& r : rep.rows) CHECK(r.aux <= 1);
}

TEST_CASE("Chang-Fefferman search agrees with enumeration on small symbols") {
  auto c = compareChF(10, 4);
  CHECK(c.trials == 10);
  CHECK(c.mismatches == 0);
  CHECK(c.belowRect == 0);
}

TEST_CASE("smallness catalog and search") {
  auto cat = smallnessCatalog(2);
  CHECK(cat.front() == DyadicOpenSet::full(2));
  std::set<std::vector<std::uint8_t>> distinct;
  for (const auto& U : cat) distinct.insert(U.cells());
  CHECK(distinct.size() == cat.size());
  for (bool star : {false, true}) {
    auto s = smallnessFalsifier(2, star);
    CHECK(s.horizontalChecks > 0);
    CHECK(s.horizontalFailures == 0);
    CHECK(s.fullSquareNonzero == 0);
    REQUIRE(s.vertical.has_value());
    CHECK(s.vertical->valueR != s.vertical->valueR2);
  }
}

TEST_CASE("survivor audit") {
  // U = full square: only the main term is left
  SymbolGenerator g;
  g.N = 3;
  std::mt19937_64 rng(2);
  auto b = g.draw<Surd>(rng);
  auto rep = survivorAudit(b, DyadicOpenSet::full(3));
  CHECK(rep.matchesClaim);
  CHECK(rep.survivors == std::vector<std::string>{"pipi1"});
  CHECK(expectedSurvivor(Part::piZ, 2));
  CHECK_FALSE(expectedSurvivor(Part::piZ, 0));
  CHECK(expectedSurvivor(Part::Zpi, 1));
  CHECK_FALSE(expectedSurvivor(Part::ZZ, 0));
  // with lambda = 1/16 every admissible U0 at N = 3 enlarges to the whole square
  CHECK_FALSE(findSurvivorInstance(3, 1, 20).has_value());
}

TEST_CASE("x_{K,L} energy never exceeds the pi-pi norm") {
  auto r = measureXKL(6, {2, 3}, 3);
  for (double a : r.maxAux) CHECK(a <= 1 + 1e-9);
}

TEST_CASE("extremal search") {
  ExtremalOptions o;
  o.N = 2;
  o.budget = 80;
  o.restarts = 4;
  auto a = extremalSearch(o), b = extremalSearch(o);
  CHECK(a.monotone);
  REQUIRE_FALSE(a.leaderboard.empty());
  CHECK(a.leaderboard.front().ratio == b.leaderboard.front().ratio);
  for (std::size_t k = 1; k < a.leaderboard.size(); ++k) CHECK(a.leaderboard[k - 1].ratio >= a.leaderboard[k].ratio);
  o.singleHaarStart = true;
  CHECK(extremalSearch(o).monotone);
}

TEST_CASE("one-parameter checks") {
  for (int N = 2; N <= 5; ++N) {
    auto u = verifyUncle(N, 1);
    CHECK(u.failures == 0);
  }
  for (int N = 4; N <= 6; ++N) CHECK(cWindow(N).outside == 0);
  auto rep = onePameterSuite({2, 3}, 5, 1);
  CHECK(rep.sequenceFailures == 0);
}

TEST_CASE("enlargement ratios are reported per depth") {
  auto r = enlargeRatios(30, {2, 3}, 1);
  REQUIRE(r.maxRatio.size() == 2);
  for (double v : r.maxRatio) CHECK(v >= 1);
  CHECK(r.maxRatio[0] <= 16);
}
