#include "dyadlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <omp.h>

namespace dyadlab {

// ---------------------------------------------------------------------------
// Generators

GeneratorKind parseGeneratorKind(const std::string& s) {
  if (s == "general") return GeneratorKind::General;
  if (s == "scaleSkipping" || s == "scale-skipping" || s == "skip") return GeneratorKind::ScaleSkipping;
  if (s == "rectangleLocalized" || s == "rectangle-localized" || s == "localized") return GeneratorKind::RectangleLocalized;
  throw Error("unknown generator: " + s);
}

std::string toString(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::General: return "general";
    case GeneratorKind::ScaleSkipping: return "scaleSkipping";
    case GeneratorKind::RectangleLocalized: return "rectangleLocalized";
  }
  return "?";
}

bool isScaleSkippingRect(const DyadicRectangle& R, int N) {
  return shiftActsOn(R.x, Parity::Even, N) && shiftActsOn(R.y, Parity::Even, N);
}

bool skipsScales(const HaarExpansion<double>& b) {
  for (const auto& R : b.support())
    if (!isScaleSkippingRect(R, b.N)) return false;
  return true;
}

std::uint64_t trialSeed(std::uint64_t seed, int depth, int trial) {
  // splitmix64 over the combined key
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(depth) * 1000003ULL + static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<DyadicRectangle> SymbolGenerator::eligible() const {
  std::vector<DyadicRectangle> out;
  for (const auto& I : intervalsUpTo(N - 1))
    for (const auto& J : intervalsUpTo(N - 1)) {
      DyadicRectangle R{I, J};
      if (kind == GeneratorKind::ScaleSkipping && !isScaleSkippingRect(R, N)) continue;
      out.push_back(R);
    }
  return out;
}

namespace {

template <class S>
S drawValue(const SymbolGenerator& g, std::mt19937_64& rng) {
  if (g.law == CoefficientLaw::Gaussian) {
    if constexpr (ScalarTraits<S>::exact) {
      throw Error("Gaussian coefficients need the float backend");
    } else {
      std::normal_distribution<double> n;
      return n(rng);
    }
  }
  std::uniform_int_distribution<long> k(-g.denominator, g.denominator);
  return ScalarTraits<S>::fraction(k(rng), g.denominator);
}

}  // namespace

template <class S>
HaarExpansion<S> SymbolGenerator::draw(std::mt19937_64& rng) const {
  if (N < 1) throw Error("generator depth must be >= 1");
  auto cand = eligible();
  if (cand.empty()) throw Error("generator has no eligible rectangles at depth " + std::to_string(N));
  if (kind == GeneratorKind::RectangleLocalized) {
    std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
    DyadicRectangle R0 = cand[pick(rng)];
    std::vector<DyadicRectangle> inside;
    for (const auto& R : cand)
      if (R0.contains(R)) inside.push_back(R);
    cand = std::move(inside);
  }
  std::uniform_real_distribution<double> u(0, 1);
  for (int attempt = 0; attempt < 100; ++attempt) {
    HaarExpansion<S> b(N);
    for (const auto& R : cand) {
      if (density < 1 && u(rng) >= density) continue;
      b.set(R, drawValue<S>(*this, rng));
    }
    if (!b.isZeroFunction()) return b;
  }
  HaarExpansion<S> b(N);
  b.set(cand.front(), S(1));
  return b;
}

template HaarExpansion<double> SymbolGenerator::draw<double>(std::mt19937_64&) const;
template HaarExpansion<Surd> SymbolGenerator::draw<Surd>(std::mt19937_64&) const;

// ---------------------------------------------------------------------------
// Reports

void ConstantReport::summarize() {
  maxRatio.assign(depths.size(), 0.0);
  maxAux.assign(depths.size(), 0.0);
  flagged.assign(depths.size(), 0);
  for (const auto& r : rows) {
    auto it = std::find(depths.begin(), depths.end(), r.depth);
    if (it == depths.end()) continue;
    const auto k = static_cast<std::size_t>(it - depths.begin());
    if (r.flagged) {
      ++flagged[k];
      continue;
    }
    maxRatio[k] = std::max(maxRatio[k], r.ratio);
    maxAux[k] = std::max(maxAux[k], r.aux);
  }
}

namespace {

double growthOf(const std::vector<double>& v) {
  double g = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k - 1] <= 0) return v[k] > 0 ? INFINITY : g;
    g = std::max(g, v[k] / v[k - 1]);
  }
  return g;
}

IdentityCheck merge(const std::string& name, const std::vector<IdentityCheck>& parts) {
  IdentityCheck out{name};
  for (const auto& p : parts) {
    if (p.failures > 0 && out.failures == 0) out.firstFailure = p.firstFailure;
    out.checks += p.checks;
    out.failures += p.failures;
  }
  return out;
}

HaarExpansion<Surd> randomFullExpansion(int N, std::mt19937_64& rng, long den = 64) {
  HaarExpansion<Surd> b(N);
  std::uniform_int_distribution<long> k(-den, den);
  for (auto& c : b.coeffs) c = Surd::fraction(k(rng), den);
  return b;
}

double l2(const HaarExpansion<double>& b) {
  double s = 0;
  for (double v : b.coeffs) s += v * v;
  return std::sqrt(s);
}

template <class S>
HaarExpansion<S> randomOn(int N, const std::vector<DyadicRectangle>& rects, std::mt19937_64& rng, long den = 16) {
  HaarExpansion<S> b(N);
  std::uniform_int_distribution<long> k(-den, den);
  for (const auto& R : rects) {
    long v = k(rng);
    if (v == 0) v = 1;
    b.set(R, ScalarTraits<S>::fraction(v, den));
  }
  return b;
}

DyadicRectangle randomRect(int N, int minLevel, int maxLevel, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> lv(minLevel, maxLevel);
  int lx = lv(rng), ly = lv(rng);
  std::uniform_int_distribution<std::int64_t> kx(0, (std::int64_t{1} << lx) - 1), ky(0, (std::int64_t{1} << ly) - 1);
  (void)N;
  return {{lx, kx(rng)}, {ly, ky(rng)}};
}

DyadicOpenSet randomUnion(int N, int pieces, int minLevel, int maxLevel, std::mt19937_64& rng) {
  std::vector<DyadicRectangle> rs;
  for (int i = 0; i < pieces; ++i) rs.push_back(randomRect(N, minLevel, maxLevel, rng));
  return DyadicOpenSet::fromRectangles(N, rs);
}

std::string rle(const DyadicOpenSet& U) {
  std::ostringstream os;
  auto r = U.runLengths();
  for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << r[i];
  return os.str();
}

std::vector<CommutatorOptions> allVariants() {
  std::vector<CommutatorOptions> v;
  for (int star = 0; star < 2; ++star)
    for (int px = 0; px < 2; ++px)
      for (int py = 0; py < 2; ++py) v.push_back({star == 1, static_cast<Parity>(px), static_cast<Parity>(py)});
  return v;
}

std::string variantName(const CommutatorOptions& o) {
  std::string s = o.star ? "star" : "plain";
  s += o.px == Parity::Even ? "-E" : "-O";
  s += o.py == Parity::Even ? "E" : "O";
  return s;
}

}  // namespace

double ConstantReport::growth() const { return growthOf(maxRatio); }
double ConstantReport::auxGrowth() const { return growthOf(maxAux); }

// ---------------------------------------------------------------------------
// Exact algebra batteries

IdentityCheck verifyMasterIdentity(int trials, const std::vector<int>& depths, std::uint64_t seed) {
  std::vector<IdentityCheck> parts(depths.size() * static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < static_cast<int>(parts.size()); ++idx) {
    const int N = depths[idx / trials], t = idx % trials;
    std::mt19937_64 rng(trialSeed(seed, N, t));
    auto b = randomFullExpansion(N, rng);
    auto& chk = parts[idx];
    for (const auto& o : allVariants()) {
      auto C = repeatedCommutator(b, o);
      auto P = ninePartDecomposition(b, o);
      std::string where = "N=" + std::to_string(N) + " trial " + std::to_string(t) + " " + variantName(o);
      chk.record(C == P.sum(), where + ": nine parts do not sum to the commutator");
      chk.record(P.mean.isZero(), where + ": constant-factor part is not zero");
    }
  }
  return merge("master identity", parts);
}

IdentityCheck verifyTestedOperators(int trials, int N, std::uint64_t seed) {
  std::vector<IdentityCheck> parts(trials);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trialSeed(seed, N, t));
    auto b = randomFullExpansion(N, rng);
    auto C = repeatedCommutator(b);
    for (const auto& I : intervalsUpTo(N - 1))
      for (const auto& J : intervalsUpTo(N - 1)) {
        HaarExpansion<Surd> s(N);
        for (const auto& o : testedOperators(b, I, J)) s += o.value;
        auto f = tensor(haar1D<Surd>(I, N), haar1D<Surd>(J, N), N);
        parts[t].record(s == dyadlab::apply(C, f), "trial " + std::to_string(t) + " at " + I.str() + "|" + J.str());
      }
  }
  return merge("tested operators", parts);
}

IdentityCheck verifyPOperators(int trials, int N, std::uint64_t seed) {
  std::vector<IdentityCheck> parts(trials);
  const int n = basisSize(N);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trialSeed(seed, N, t));
    auto b = randomFullExpansion(N, rng);
    std::uniform_int_distribution<long> k(-16, 16);
    Vec<Surd> p(n);
    for (auto& v : p) v = Surd::fraction(k(rng), 16);
    auto C = repeatedCommutator(b);
    for (const auto& J : intervalsUpTo(N - 1)) {
      auto P = pOperators(b, p, J);
      auto f = tensorDense(p, haar1D<Surd>(J, N).dense(N), N);
      auto Tf = dyadlab::apply(C, f);
      std::string where = "trial " + std::to_string(t) + " J''=" + J.str();
      parts[t].record(P.sum() == Tf, where + ": P1..P5 do not sum to T^b f");
      if (P.evenCase)
        parts[t].record(dot(Tf - P.Peven, P.Peven).isZero(), where + ": P_even not orthogonal to the rest");
      else
        parts[t].record(dot(P.P1, P.P2).isZero(), where + ": P1 not orthogonal to P2");
    }
  }
  return merge("P operators", parts);
}

IdentityCheck verifyShiftSquares(int N) {
  IdentityCheck chk{"shift squares"};
  for (int var = 0; var < 2; ++var)
    for (int par = 0; par < 2; ++par) {
      ShiftVariant v{static_cast<Parity>(par), var == 0 ? Variable::X : Variable::Y};
      auto T = shift<Surd>(v, N);
      auto Ts = T.transpose();
      std::string where = "N=" + std::to_string(N) + (var == 0 ? " x" : " y") + (par == 0 ? " even" : " odd");
      chk.record((T * T).isZero(), where + ": T^2 != 0");
      chk.record((Ts * Ts).isZero(), where + ": (T*)^2 != 0");
    }
  return chk;
}

MainskipVanishing verifyMainskipVanishing(int trials, int N, std::uint64_t seed) {
  std::vector<MainskipVanishing> parts(trials);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trialSeed(seed, N, t));
    SymbolGenerator gen;
    gen.kind = GeneratorKind::ScaleSkipping;
    gen.N = N;
    gen.denominator = 16;
    gen.density = (t % 2) ? 0.4 : 1.0;
    auto b = gen.draw<Surd>(rng);
    // alternate between the Chang-Fefferman witness and a random union as U0
    DyadicOpenSet U0 = (t % 3 == 2) ? randomUnion(N, 2, 0, N, rng) : bmoChFHeuristic(b).witness;
    auto alpha = restrictSymbol(b, U0).first;
    auto U = enlarge(U0).U;
    auto f = analyze(U.indicator<Surd>());
    auto& m = parts[t];
    const std::string where = "trial " + std::to_string(t);
    for (int star = 0; star < 2; ++star) {
      auto outs = applyParts(alpha, f, {star == 1});
      const std::string w = where + (star ? " star" : " plain");
      for (int l = 0; l < 4; ++l) m.zz.record(outs.line(Part::ZZ, l).isZeroFunction(), w + " ZZ line " + std::to_string(l + 1));
      for (int l : {0, 1}) m.piZ.record(outs.line(Part::piZ, l).isZeroFunction(), w + " piZ line " + std::to_string(l + 1));
      for (int l : {0, 2}) m.Zpi.record(outs.line(Part::Zpi, l).isZeroFunction(), w + " Zpi line " + std::to_string(l + 1));
      if (star) continue;
      const auto& pp1 = outs.line(Part::pipi, 0);
      for (int l : {1, 2, 3}) m.orth.record(dot(pp1, outs.line(Part::pipi, l)).isZero(), w + " pipi" + std::to_string(l + 1));
      for (int l : {2, 3}) m.orth.record(dot(pp1, outs.line(Part::piZ, l)).isZero(), w + " piZ" + std::to_string(l + 1));
      for (int l : {1, 3}) m.orth.record(dot(pp1, outs.line(Part::Zpi, l)).isZero(), w + " Zpi" + std::to_string(l + 1));
      m.energy.record(chfEnergy(alpha, U0) <= dot(pp1, pp1), w + " energy exceeds ||pipi1||^2");
    }
  }
  MainskipVanishing out;
  auto fold = [](IdentityCheck& into, const IdentityCheck& from) {
    if (from.failures > 0 && into.failures == 0) into.firstFailure = from.firstFailure;
    into.checks += from.checks;
    into.failures += from.failures;
  };
  for (const auto& p : parts) {
    fold(out.zz, p.zz);
    fold(out.piZ, p.piZ);
    fold(out.Zpi, p.Zpi);
    fold(out.orth, p.orth);
    fold(out.energy, p.energy);
  }
  return out;
}

IdentityCheck verifyDeepAnnihilation(int trials, int N, std::uint64_t seed, bool star) {
  std::vector<IdentityCheck> parts(trials);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trialSeed(seed, N, t));
    for (int attempt = 0; attempt < 50; ++attempt) {
      // coarse pieces enlarge to the whole square, leaving nothing for beta
      auto U0 = randomUnion(N, 1 + static_cast<int>(rng() % 2), std::max(1, N - 3), N - 1, rng);
      auto U = enlarge(U0).U;
      std::vector<DyadicRectangle> in, out;
      for (const auto& I : intervalsUpTo(N - 1))
        for (const auto& J : intervalsUpTo(N - 1)) {
          DyadicRectangle R{I, J};
          if (U0.containsRect(R)) in.push_back(R);
          if (!U.containsRect(R)) out.push_back(R);
        }
      if (in.empty() || out.empty()) continue;
      auto beta = randomOn<Surd>(N, out, rng);
      auto rho = randomOn<Surd>(N, in, rng);
      auto C = repeatedCommutator(beta, {star});
      parts[t].record(dyadlab::apply(C, rho).isZeroFunction(),
                      "trial " + std::to_string(t) + " U0 runs " + rle(U0) + (star ? " star" : " plain"));
      break;
    }
  }
  return merge(star ? "deep annihilation (star)" : "deep annihilation (plain)", parts);
}

MonotonicityReport supportMonotonicity(int N, bool star) {
  MonotonicityReport rep;
  rep.star = star;
  auto rects = rectanglesUpTo(N - 1);
  std::vector<MonotonicityReport> parts(rects.size());
#pragma omp parallel for schedule(dynamic)
  for (int a = 0; a < static_cast<int>(rects.size()); ++a) {
    const auto& Rs = rects[a];
    HaarExpansion<Surd> b(N);
    b.set(Rs, Surd(1));
    auto C = repeatedCommutator(b, {star});
    for (const auto& Rin : rects) {
      auto f = tensor(haar1D<Surd>(Rin.x, N), haar1D<Surd>(Rin.y, N), N);
      if (dyadlab::apply(C, f).isZeroFunction()) continue;
      ++parts[a].interacting;
      auto nested = [&](const DyadicInterval& sym, const DyadicInterval& in) {
        if (!star) return in.contains(sym);
        return in.level == 0 || parent(in).contains(sym);
      };
      if (!(nested(Rs.x, Rin.x) && nested(Rs.y, Rin.y))) {
        if (parts[a].violations == 0) parts[a].firstViolation = "symbol " + Rs.str() + " input " + Rin.str();
        ++parts[a].violations;
      }
    }
  }
  for (const auto& p : parts) {
    if (p.violations > 0 && rep.violations == 0) rep.firstViolation = p.firstViolation;
    rep.interacting += p.interacting;
    rep.violations += p.violations;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Theorem constants

namespace {

template <class Fn>
ConstantReport runTrials(const std::string& name, int trials, const std::vector<int>& depths, std::uint64_t seed, Fn&& fn) {
  ConstantReport rep;
  rep.name = name;
  rep.seed = seed;
  rep.trials = trials;
  rep.depths = depths;
  rep.rows.resize(depths.size() * static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < static_cast<int>(rep.rows.size()); ++idx) {
    const int N = depths[idx / trials], t = idx % trials;
    TrialRow row;
    row.seed = trialSeed(seed, N, t);
    row.depth = N;
    row.trial = t;
    std::mt19937_64 rng(row.seed);
    fn(N, t, rng, row);
    rep.rows[idx] = std::move(row);
  }
  rep.summarize();
  return rep;
}

double commutatorNorm(const HaarExpansion<double>& b, const CommutatorOptions& o = {}) {
  return operatorNorm(repeatedCommutator(b, o));
}

bool degenerate(double norm, const HaarExpansion<double>& b) { return norm <= 1e-12 * std::max(1.0, l2(b)); }

}  // namespace

ConstantReport verifyBmoRecBound(int trials, const std::vector<int>& depths, std::uint64_t seed, const SymbolGenerator& gen0) {
  return runTrials("bmo-rec", trials, depths, seed, [&](int N, int, std::mt19937_64& rng, TrialRow& row) {
    SymbolGenerator gen = gen0;
    gen.N = N;
    auto b = gen.draw<double>(rng);
    const double T = commutatorNorm(b);
    auto rect = bmoRect(b);
    row.witness = rect.witness.str();
    if (degenerate(T, b)) {
      row.flagged = true;
      return;
    }
    row.ratio = std::sqrt(rect.value) / T;
    // sum over J inside J'' of ||[T1, b_J]||^2, divided by |J''|
    const int n = basisSize(N);
    std::vector<double> q(n, 0.0);
    for (const auto& J : intervalsUpTo(N - 1)) {
      Vec<double> u(n);
      for (int a = 0; a < n; ++a) u[a] = b.at(a, basisIndex(J));
      double c = operatorNorm(commutator1D(u, Parity::Even, N));
      q[basisIndex(J)] = c * c;
    }
    double best = 0;
    for (const auto& Jpp : intervalsUpTo(N - 1)) {
      double s = 0;
      for (const auto& J : intervalsUpTo(N - 1))
        if (Jpp.contains(J)) s += q[basisIndex(J)];
      best = std::max(best, s * std::ldexp(1.0, Jpp.level));
    }
    row.aux = best / (T * T);
  });
}

ConstantReport verifyMainskip(int trials, const std::vector<int>& depths, std::uint64_t seed) {
  return runTrials("mainskip1", trials, depths, seed, [&](int N, int, std::mt19937_64& rng, TrialRow& row) {
    SymbolGenerator gen;
    gen.kind = GeneratorKind::ScaleSkipping;
    gen.N = N;
    auto b = gen.draw<double>(rng);
    const double T = commutatorNorm(b);
    auto chf = bmoChFHeuristic(b, {10, row.seed});
    row.witness = rle(chf.witness);
    if (degenerate(T, b)) {
      row.flagged = true;
      return;
    }
    row.ratio = chf.value / (T * T);
    row.aux = std::sqrt(bmoRect(b).value) / T;
  });
}

ConstantReport verifyUpperBound(int trials, const std::vector<int>& depths, std::uint64_t seed, const SymbolGenerator& gen0) {
  return runTrials("upper-bound", trials, depths, seed, [&](int N, int, std::mt19937_64& rng, TrialRow& row) {
    SymbolGenerator gen = gen0;
    gen.N = N;
    auto b = gen.draw<double>(rng);
    auto chf = bmoChFHeuristic(b, {10, row.seed});
    row.witness = rle(chf.witness);
    if (chf.value <= 0) {
      row.flagged = true;
      return;
    }
    row.ratio = commutatorNorm(b) / std::sqrt(chf.value);
  });
}

Signature signatureClassifier(const std::string& name) {
  // row per variable: (symbol, test function, output) against the D / pi / Z piece
  auto row = [](ProductPiece p) -> std::array<int, 3> {
    switch (p) {
      case ProductPiece::Pi: return {0, 1, 0};
      case ProductPiece::Z: return {0, 0, 1};
      default: return {0, 0, 0};
    }
  };
  Part p = partFromName(name);
  return {row(xPiece(p)), row(yPiece(p))};
}

int signatureOnes(const Signature& s) {
  int c = 0;
  for (const auto& r : s)
    for (int v : r) c += v;
  return c;
}

ConstantReport verifySingleOneParts(int trials, int N, std::uint64_t seed) {
  std::vector<Part> dParts;
  for (Part p : kAllParts)
    if (hasD(p)) dParts.push_back(p);
  ConstantReport rep;
  rep.name = "single-one";
  rep.seed = seed;
  rep.trials = trials;
  rep.depths = {N};
  rep.rows.resize(static_cast<std::size_t>(trials) * dParts.size());
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trialSeed(seed, N, t));
    SymbolGenerator gen;
    gen.N = N;
    auto b = gen.draw<double>(rng);
    const double bmo = std::sqrt(bmoRect(b).value);
    auto P = ninePartDecomposition(b);
    for (std::size_t k = 0; k < dParts.size(); ++k) {
      TrialRow row;
      row.seed = trialSeed(seed, N, t);
      row.depth = N;
      row.trial = t;
      row.label = partName(dParts[k]);
      row.aux = signatureOnes(signatureClassifier(row.label));
      if (bmo <= 0)
        row.flagged = true;
      else
        row.ratio = operatorNorm(P.total(dParts[k])) / bmo;
      rep.rows[static_cast<std::size_t>(t) * dParts.size() + k] = row;
    }
  }
  rep.summarize();
  return rep;
}

ConstantReport enlargeRatios(int samples, const std::vector<int>& depths, std::uint64_t seed, long lambdaNum, long lambdaDen) {
  return runTrials("enlarge", samples, depths, seed, [&](int N, int, std::mt19937_64& rng, TrialRow& row) {
    auto U0 = randomUnion(N, 1 + static_cast<int>(rng() % 3), 0, N, rng);
    auto e = enlarge(U0, lambdaNum, lambdaDen);
    row.ratio = e.ratio;
    row.aux = U0.measure();
    row.witness = rle(U0);
  });
}

ChFAgreement compareChF(int trials, std::uint64_t seed, int restarts) {
  ChFAgreement a;
  a.trials = trials;
  std::vector<int> mismatch(trials, 0), below(trials, 0);
  std::vector<double> gap(trials, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trialSeed(seed, 2, t));
    SymbolGenerator gen;
    gen.N = 2;
    gen.density = (t % 2) ? 0.5 : 1.0;
    auto b = gen.draw<Surd>(rng);
    auto ex = bmoChFExact(b);
    auto he = bmoChFHeuristic(b, {restarts, trialSeed(seed, 3, t)});
    if (!(ex.value == he.value)) mismatch[t] = 1;
    if (ex.value < bmoRect(b).value || he.value < bmoRect(b).value) below[t] = 1;
    gap[t] = ex.value.toDouble() - he.value.toDouble();
  }
  for (int t = 0; t < trials; ++t) {
    a.mismatches += mismatch[t];
    a.belowRect += below[t];
    a.worstGap = std::max(a.worstGap, gap[t]);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Smallness

std::vector<DyadicOpenSet> smallnessCatalog(int N) {
  std::vector<DyadicOpenSet> out;
  std::set<std::vector<std::uint8_t>> seen;
  auto push = [&](DyadicOpenSet U) {
    if (seen.insert(U.cells()).second) out.push_back(std::move(U));
  };
  push(DyadicOpenSet::full(N));
  for (const auto& R : rectanglesUpTo(N)) push(DyadicOpenSet::fromRectangles(N, {R}));
  auto small = rectanglesUpTo(std::min(N, 2));
  for (std::size_t a = 0; a < small.size(); ++a)
    for (std::size_t b = a + 1; b < small.size(); ++b) push(DyadicOpenSet::fromRectangles(N, {small[a], small[b]}));
  return out;
}

SmallnessSearch smallnessFalsifier(int N, bool star) {
  auto catalog = smallnessCatalog(N);
  std::vector<SmallnessSearch> parts(catalog.size());
#pragma omp parallel for schedule(dynamic)
  for (int u = 0; u < static_cast<int>(catalog.size()); ++u) {
    const auto& U = catalog[u];
    SmallnessTable<Surd> table(U, {star});
    auto& s = parts[u];
    const bool full = U.count() == std::int64_t{1} << (2 * N);
    for (const auto& I : intervalsUpTo(N, 1))
      for (const auto& J : intervalsUpTo(N, 1)) {
        DyadicRectangle R{I, J};
        auto c = table(R);
        if (full && !(c.c1.isZero() && c.c2.isZero() && c.c12.isZero())) ++s.fullSquareNonzero;
        if (!U.containsRect(parent(R))) continue;
        // the starred pairing also needs the x-grandparent strip inside U
        bool horizontal = !star || (I.level >= 2 && U.containsRect({parent(parent(I)), J}));
        if (horizontal) {
          ++s.horizontalChecks;
          if (!(c.c1 == table(parentX(R)).c1)) {
            if (s.horizontalFailures == 0) s.firstHorizontalFailure = "U runs " + rle(U) + " R " + R.str();
            ++s.horizontalFailures;
          }
        }
        if (!s.vertical) {
          auto c2 = table(parentY(R)).c1;
          if (!(c.c1 == c2)) s.vertical = SmallnessWitness{U, R, c.c1.toDouble(), c2.toDouble(), c.c1.str(), c2.str()};
        }
      }
  }
  SmallnessSearch out;
  out.N = N;
  out.star = star;
  out.setsTested = static_cast<long>(catalog.size());
  for (const auto& p : parts) {
    if (p.horizontalFailures > 0 && out.horizontalFailures == 0) out.firstHorizontalFailure = p.firstHorizontalFailure;
    out.horizontalChecks += p.horizontalChecks;
    out.horizontalFailures += p.horizontalFailures;
    out.fullSquareNonzero += p.fullSquareNonzero;
    if (!out.vertical && p.vertical) out.vertical = p.vertical;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Survivors

std::string toString(LineStatus s) {
  switch (s) {
    case LineStatus::Zero: return "zero";
    case LineStatus::BmoBounded: return "bmo-bounded";
    case LineStatus::Survivor: return "survivor";
  }
  return "?";
}

bool expectedSurvivor(Part p, int line) {
  if (p == Part::pipi) return true;
  if (p == Part::piZ) return line == 2 || line == 3;
  if (p == Part::Zpi) return line == 1 || line == 3;
  return false;
}

SurvivorReport survivorAudit(const HaarExpansion<Surd>& b, const DyadicOpenSet& U0, bool star) {
  auto alpha = restrictSymbol(b, U0).first;
  auto U = enlarge(U0).U;
  auto f = analyze(U.indicator<Surd>());
  auto outs = applyParts(alpha, f, {star});
  const double bmo = std::sqrt(bmoRect(alpha).value.toDouble());
  SurvivorReport rep;
  rep.matchesClaim = true;
  rep.allExpectedNonzero = true;
  for (Part p : kAllParts)
    for (int l = 0; l < lineCount(p); ++l) {
      const auto& v = outs.line(p, l);
      LineAudit a{p, l, LineStatus::Zero, 0, 0};
      if (!v.isZeroFunction()) {
        a.norm = std::sqrt(dot(v, v).toDouble());
        if (hasD(p)) {
          a.status = LineStatus::BmoBounded;
          a.ratio = bmo > 0 ? a.norm / bmo : INFINITY;
        } else {
          a.status = LineStatus::Survivor;
          rep.survivors.push_back(std::string(partName(p)) + std::to_string(l + 1));
          if (!expectedSurvivor(p, l)) rep.matchesClaim = false;
        }
      }
      if (expectedSurvivor(p, l) && a.status == LineStatus::Zero) rep.allExpectedNonzero = false;
      rep.lines.push_back(a);
    }
  return rep;
}

std::optional<SurvivorInstance> findSurvivorInstance(int N, std::uint64_t seed, int maxAttempts) {
  for (int t = 0; t < maxAttempts; ++t) {
    std::mt19937_64 rng(trialSeed(seed, N, t));
    SymbolGenerator gen;
    gen.N = N;
    gen.denominator = 8;
    auto b = gen.draw<Surd>(rng);
    auto U0 = randomUnion(N, 1 + static_cast<int>(rng() % 2), 1, N - 1, rng);
    if (enlarge(U0).U.count() == U0.side() * U0.side()) continue;  // 1_U constant: only pipi1 survives
    if (restrictSymbol(b, U0).first.isZeroFunction()) continue;
    auto rep = survivorAudit(b, U0);
    const bool piZ3 = std::find(rep.survivors.begin(), rep.survivors.end(), std::string(partName(Part::piZ)) + "3") !=
                      rep.survivors.end();
    if (rep.matchesClaim && piZ3) return SurvivorInstance{b, U0, rep, t + 1};
  }
  return std::nullopt;
}

ConstantReport measureXKL(int trials, const std::vector<int>& depths, std::uint64_t seed) {
  return runTrials("xkl", trials, depths, seed, [&](int N, int, std::mt19937_64& rng, TrialRow& row) {
    SymbolGenerator gen;
    gen.N = N;
    auto b = gen.draw<double>(rng);
    auto U0 = bmoChFHeuristic(b, {10, row.seed}).witness;
    auto alpha = restrictSymbol(b, U0).first;
    auto U = enlarge(U0).U;
    row.witness = rle(U0);
    auto pp = ninePartDecomposition(alpha).total(Part::pipi);
    const double nrm = operatorNorm(pp);
    if (degenerate(nrm, alpha)) {
      row.flagged = true;
      return;
    }
    auto x = dyadlab::apply(pp, analyze(U.indicator<double>()));
    double A = 0, B = 0;
    for (const auto& K : intervalsUpTo(N - 1, 1))
      for (const auto& L : intervalsUpTo(N - 1, 1)) {
        DyadicRectangle P{parent(K), parent(L)};
        if (!U.containsRect(P)) continue;
        const double xv = x.at(basisIndex(K), basisIndex(L)), bv = alpha.coeff(P);
        A += xv * xv;
        B += bv * bv;
      }
    const double scale = nrm * nrm * U.measure();
    row.ratio = B / scale;
    row.aux = A / scale;
  });
}

// ---------------------------------------------------------------------------
// Extremal search

double chfOverCommutator(const HaarExpansion<double>& b, std::uint64_t seed) {
  const double T = commutatorNorm(b);
  if (degenerate(T, b)) return -1;
  return std::sqrt(bmoChFHeuristic(b, {10, seed}).value) / T;
}

ExtremalResult extremalSearch(const ExtremalOptions& opt) {
  ExtremalResult res;
  res.N = opt.N;
  SymbolGenerator gen = opt.generator;
  gen.N = opt.N;
  auto cand = gen.eligible();
  const int R = std::max(1, opt.restarts);
  const long per = std::max<long>(1, opt.budget / R);
  std::vector<LeaderboardEntry> finals(R);
  std::vector<long> evals(R, 0);
  std::vector<char> mono(R, 1);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < R; ++r) {
    std::mt19937_64 rng(trialSeed(opt.seed, opt.N, r));
    HaarExpansion<double> b(opt.N);
    if (opt.singleHaarStart) {
      b.set(cand[rng() % cand.size()], 1.0);
    } else {
      b = gen.draw<double>(rng);
    }
    double cur = chfOverCommutator(b, opt.seed);
    long used = 1;
    std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
    std::normal_distribution<double> step;
    while (used < per) {
      double scale = 0;
      for (double v : b.coeffs) scale = std::max(scale, std::fabs(v));
      auto trial = b;
      const auto& Rc = cand[pick(rng)];
      trial.set(Rc, trial.coeff(Rc) + 0.5 * std::max(scale, 1e-3) * step(rng));
      const double v = chfOverCommutator(trial, opt.seed);
      ++used;
      if (v > cur) {
        b = std::move(trial);
        cur = v;
      }
    }
    evals[r] = used;
    if (cur < chfOverCommutator(b, opt.seed)) mono[r] = 0;
    LeaderboardEntry e;
    e.ratio = cur;
    e.restart = r;
    e.b = b;
    double four = 0;
    for (int px = 0; px < 2; ++px)
      for (int py = 0; py < 2; ++py) four = std::max(four, commutatorNorm(b, {false, static_cast<Parity>(px), static_cast<Parity>(py)}));
    e.fourVariantRatio = four > 0 ? std::sqrt(bmoChFHeuristic(b, {10, opt.seed}).value) / four : -1;
    finals[r] = std::move(e);
  }
  for (int r = 0; r < R; ++r) {
    res.evaluations += evals[r];
    res.monotone = res.monotone && mono[r];
  }
  std::stable_sort(finals.begin(), finals.end(), [](const auto& a, const auto& b) { return a.ratio > b.ratio; });
  if (finals.size() > 10) finals.resize(10);
  res.leaderboard = std::move(finals);
  return res;
}

// ---------------------------------------------------------------------------
// One parameter

UncleCheck verifyUncle(int N, std::uint64_t seed) {
  UncleCheck chk;
  std::mt19937_64 rng(trialSeed(seed, N, 0));
  std::uniform_int_distribution<long> k(-16, 16);
  const int n = basisSize(N);
  for (const auto& I0 : intervalsUpTo(N - 1, 1)) {
    if (I0.isEven() && I0.level < 2) continue;
    Vec<Surd> alpha(n, Surd(0));
    Surd energy(0);
    for (const auto& I : intervalsUpTo(N - 1, I0.level))
      if (I0.contains(I)) {
        alpha[basisIndex(I)] = Surd::fraction(k(rng), 16);
        energy += alpha[basisIndex(I)] * alpha[basisIndex(I)];
      }
    // uncle: the sibling of I0 (odd I0) or of its parent (even I0)
    DyadicInterval anchor = I0.isEven() ? parent(I0) : I0;
    auto f = haar1D<Surd>(sibling(anchor), N).dense(N);
    auto form = onePtPiForm(alpha, f, I0, N);
    ++chk.intervals;
    bool ok = std::all_of(form.B.begin(), form.B.end(), [](const Surd& v) { return v.isZero(); });
    // <T* f> on I0 is the constant +-|parent(anchor)|^{-1/2}
    Surd c = invSqrtLength<Surd>(parent(anchor).level);
    auto Tf = shift1D(f, Parity::Even, true, N);
    for (const auto& I : intervalsUpTo(N, I0.level))
      if (I0.contains(I)) {
        Surd m = average1D<Surd>(I, N).dot(Tf);
        ok = ok && (m == c || m == -c);
      }
    Surd normA(0);
    for (const auto& v : form.A) normA += v * v;
    ok = ok && normA == c * c * energy;
    if (!ok) {
      if (chk.failures == 0) chk.firstFailure = "I0 = " + I0.str() + " at N = " + std::to_string(N);
      ++chk.failures;
    }
  }
  return chk;
}

CWindow cWindow(int N) {
  CWindow w;
  w.N = N;
  w.minAbs = INFINITY;
  const Surd lo = Surd::fraction(1, 64), hi = Surd::fraction(1, 2);
  for (const auto& I0 : intervalsUpTo(N - 2, 2))
    for (const auto& Ih : intervalsUpTo(N - 1, I0.level)) {
      if (!I0.contains(Ih)) continue;
      Surd c = cCoefficient<Surd>(I0, Ih, N);
      Surd c2 = c * c;
      ++w.configurations;
      const double a = std::fabs(c.toDouble());
      w.minAbs = std::min(w.minAbs, a);
      w.maxAbs = std::max(w.maxAbs, a);
      if (c2 < lo || c2 > hi) {
        if (w.outside == 0) w.firstOutside = "I0 = " + I0.str() + ", I^ = " + Ih.str() + ", c = " + c.str();
        ++w.outside;
      }
    }
  if (w.configurations == 0) w.minAbs = 0;
  return w;
}

OneParameterReport onePameterSuite(const std::vector<int>& depths, int trials, std::uint64_t seed) {
  OneParameterReport rep;
  rep.C = runTrials("one-parameter", trials, depths, seed, [&](int N, int, std::mt19937_64& rng, TrialRow& row) {
    const int n = basisSize(N);
    std::uniform_int_distribution<long> k(-64, 64);
    Vec<double> u(n, 0.0);
    for (int i = 1; i < n; ++i) u[i] = static_cast<double>(k(rng)) / 64.0;
    const double T = operatorNorm(commutator1D(u, Parity::Even, N));
    if (T <= 1e-12) {
      row.flagged = true;
      return;
    }
    double best = 0;
    for (const auto& I0 : intervalsUpTo(N - 1)) {
      double e = 0;
      for (const auto& I : intervalsUpTo(N - 1, I0.level))
        if (I0.contains(I)) e += u[basisIndex(I)] * u[basisIndex(I)];
      if (e * std::ldexp(1.0, I0.level) > best) {
        best = e * std::ldexp(1.0, I0.level);
        row.witness = I0.str();
      }
    }
    row.ratio = best / (T * T);
  });
  for (int N = 2; N <= 5; ++N) rep.uncle.push_back(verifyUncle(N, seed));
  for (int N = 4; N <= 6; ++N) rep.windows.push_back(cWindow(N));
  std::mt19937_64 rng(trialSeed(seed, 0, 0));
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u01(0, 1);
  for (int t = 0; t < 100; ++t) {
    const double q = 0.95 * u01(rng);
    std::vector<double> b(40), d(40);
    for (auto& v : b) v = g(rng);
    for (auto& v : d) v = q * (2 * u01(rng) - 1);
    ++rep.sequenceTrials;
    if (!sequenceResolve(b, d, q).holds) ++rep.sequenceFailures;
  }
  return rep;
}

}  // namespace dyadlab
