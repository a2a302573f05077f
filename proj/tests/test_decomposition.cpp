#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dyadlab/open_set.hpp"
#include "dyadlab/operators.hpp"

using namespace dyadlab;

namespace {

HaarExpansion<Surd> randomSymbol(int N, std::mt19937_64& rng) {
  HaarExpansion<Surd> b(N);
  std::uniform_int_distribution<long> d(-5, 5);
  for (auto& v : b.coeffs) v = Surd::fraction(d(rng), 3);
  return b;
}

HaarExpansion<Surd> basisElement(int N, const DyadicRectangle& R) {
  HaarExpansion<Surd> e(N);
  e.set(R, Surd(1));
  return e;
}

std::vector<CommutatorOptions> variants() {
  std::vector<CommutatorOptions> v;
  for (bool star : {false, true})
    for (Parity px : {Parity::Even, Parity::Odd})
      for (Parity py : {Parity::Even, Parity::Odd}) v.push_back({star, px, py});
  return v;
}

}  // namespace

TEST_CASE("nine parts sum to the repeated commutator") {
  std::mt19937_64 rng(31);
  for (int N = 1; N <= 3; ++N)
    for (const auto& o : variants()) {
      auto b = randomSymbol(N, rng);
      auto parts = ninePartDecomposition(b, o);
      CHECK(parts.mean.isZero());
      CHECK(parts.sum() == repeatedCommutator(b, o));
    }
}

TEST_CASE("each part equals its tensor-commutator reference") {
  std::mt19937_64 rng(32);
  for (const auto& o : variants()) {
    auto b = randomSymbol(3, rng);
    auto parts = ninePartDecomposition(b, o);
    for (Part p : kAllParts) CHECK(parts.total(p) == partByTensorCommutators(b, p, o));
  }
}

TEST_CASE("zero symbol has zero parts") {
  auto parts = ninePartDecomposition(HaarExpansion<Surd>(2));
  for (Part p : kAllParts) CHECK(parts.total(p).isZero());
}

TEST_CASE("DD part on a single coefficient") {
  // b = beta h_{R^} with R^ the unit square: DD h_{R^} = beta |R^|^{-1/2} sum of h_R over the four children
  const int N = 2;
  const auto Rhat = parseRectangle("0:0|0:0");
  HaarExpansion<Surd> b(N);
  b.set(Rhat, Surd::fraction(3, 2));
  auto out = dyadlab::apply(ninePartDecomposition(b).total(Part::DD), basisElement(N, Rhat));
  HaarExpansion<Surd> expect(N);
  for (const auto& I : intervalsAtLevel(1))
    for (const auto& J : intervalsAtLevel(1)) expect.set({I, J}, Surd::fraction(3, 2));
  CHECK(out == expect);
}

TEST_CASE("tested operators sum to the commutator on every input") {
  std::mt19937_64 rng(33);
  const int N = 3;
  auto b = randomSymbol(N, rng);
  auto C = repeatedCommutator(b);
  for (const auto& I : intervalsUpTo(N - 1))
    for (const auto& J : intervalsUpTo(N - 1)) {
      HaarExpansion<Surd> total(N);
      std::set<std::string> names;
      for (const auto& t : testedOperators(b, I, J))
        if (t.applicable) {
          total += t.value;
          names.insert(t.name);
        }
      CHECK(total == dyadlab::apply(C, basisElement(N, {I, J})));
      if (!I.isEven() && !J.isEven()) CHECK(names == std::set<std::string>{"pipi1", "piZ3", "Zpi1", "ZZ1"});
      if (shiftActsOn(I, Parity::Even, N) && shiftActsOn(J, Parity::Even, N)) CHECK(names.size() == 25);
    }
  for (const auto& t : testedOperators(HaarExpansion<Surd>(N), parseInterval("0:0"), parseInterval("1:0")))
    CHECK(t.value.isZeroFunction());
}

TEST_CASE("P operators split the commutator and are orthogonal") {
  std::mt19937_64 rng(34);
  const int N = 3;
  std::uniform_int_distribution<long> d(-4, 4);
  for (int trial = 0; trial < 4; ++trial) {
    auto b = randomSymbol(N, rng);
    Vec<Surd> p(8);
    for (auto& v : p) v = Surd(d(rng));
    auto C = repeatedCommutator(b);
    for (const auto& J : intervalsUpTo(N - 1)) {
      auto P = pOperators(b, p, J);
      auto input = tensorDense(p, haar1D<Surd>(J, N).dense(N), N);
      auto image = dyadlab::apply(C, input);
      CHECK(P.sum() == image);
      if (J.isEven()) {
        CHECK(dot(image - P.Peven, P.Peven) == Surd(0));
      } else {
        CHECK(dot(P.P1, P.P2) == Surd(0));
      }
    }
  }
}

TEST_CASE("pi-pi lines combine to the pi-pi part") {
  std::mt19937_64 rng(35);
  const int N = 3;
  for (bool star : {false, true})
    for (int trial = 0; trial < 3; ++trial) {
      auto a = randomSymbol(N, rng).haarPart();
      auto f = randomSymbol(N, rng);
      auto form = ppForm(a, f, star);
      CHECK(form.combined() == dyadlab::apply(ninePartDecomposition(a, {star}).total(Part::pipi), f));
      CHECK(form.I == applyParts(a, f, {star}).line(Part::pipi, 0));
    }
}

TEST_CASE("first pi-pi line for a single Haar symbol and f = 1_U") {
  const int N = 3;
  const auto R = parseRectangle("0:0|0:0");
  HaarExpansion<Surd> a(N);
  a.set(R, Surd(2));
  auto U = DyadicOpenSet::full(N);
  auto form = ppForm(a, analyze(U.indicator<Surd>()), false);
  // (1_U, 1~_R) = 1, so line I = (a, h_R) T1 h_I (x) T2 h_J
  auto Th = [&](const DyadicInterval& I) { return shift1D(haar1D<Surd>(I, N), Parity::Even, false, N); };
  HaarExpansion<Surd> expect(N);
  addTensor(expect, Surd(2), Th(R.x), Th(R.y));
  CHECK(form.I == expect);

  // f with mean zero on every supported rectangle kills line I
  auto g = basisElement(N, parseRectangle("2:1|1:0"));
  CHECK(ppForm(a, g, false).I.isZeroFunction());
}

TEST_CASE("one-parameter form under the uncle function") {
  const int N = 5;
  std::mt19937_64 rng(36);
  std::uniform_int_distribution<long> d(-3, 3);
  for (const auto& I0 : intervalsUpTo(N - 2, 1)) {
    if (I0.isEven()) continue;
    Vec<Surd> a(basisSize(N));
    for (int k = 1; k < basisSize(N); ++k)
      if (I0.contains(intervalOfIndex(k))) a[k] = Surd(d(rng));
    auto f = haar1D<Surd>(sibling(I0), N).dense(N);
    auto form = onePtPiForm(a, f, I0, N);
    CHECK(std::all_of(form.B.begin(), form.B.end(), [](const Surd& v) { return v.isZero(); }));
  }
  auto zero = onePtPiForm(Vec<Surd>(basisSize(N), Surd(0)), haar1D<Surd>(parseInterval("1:1"), N).dense(N), parseInterval("1:0"), N);
  CHECK(std::all_of(zero.A.begin(), zero.A.end(), [](const Surd& v) { return v.isZero(); }));
}

TEST_CASE("c_I equals the average of T* 1_{I0} computed from cell values") {
  const int N = 5;
  for (const auto& I0 : intervalsUpTo(N - 2, 2))
    for (const auto& I : intervalsUpTo(N - 1, I0.level + 1)) {
      if (!I0.contains(I)) continue;
      const auto Ihat = parent(I);
      Vec<Surd> cells(basisSize(N), Surd(0));
      for (auto c = firstCell(I0, N); c < firstCell(I0, N) + cellCount(I0, N); ++c) cells[c] = Surd(1);
      auto Tf = synthesize1D(shift1D(analyze1D(cells, N), Parity::Even, true, N), N);
      Surd avg(0);
      for (auto c = firstCell(Ihat, N); c < firstCell(Ihat, N) + cellCount(Ihat, N); ++c) avg += Tf[c];
      avg = avg * Surd::fraction(1, cellCount(Ihat, N));
      CHECK(cCoefficient<Surd>(I0, Ihat, N) == avg);
    }
}
