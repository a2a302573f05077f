#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <omp.h>

#include "dyadlab/haar.hpp"
#include "dyadlab/matrix.hpp"
#include "dyadlab/open_set.hpp"
#include "dyadlab/operators.hpp"

namespace dyadlab {

// ---------------------------------------------------------------------------
// Operator norm by power iteration on A^T A.

struct LinearMap {
  int rows = 0;
  int cols = 0;
  std::function<void(const std::vector<double>&, std::vector<double>&)> apply;   // y = A x
  std::function<void(const std::vector<double>&, std::vector<double>&)> applyT;  // y = A^T x
};

inline LinearMap asLinearMap(const SparseMatrix<double>& A) {
  auto At = std::make_shared<SparseMatrix<double>>(A.transpose());
  auto Ap = std::make_shared<SparseMatrix<double>>(A);
  LinearMap m;
  m.rows = A.rows();
  m.cols = A.cols();
  m.apply = [Ap](const std::vector<double>& x, std::vector<double>& y) { y = dyadlab::apply(*Ap, x); };
  m.applyT = [At](const std::vector<double>& x, std::vector<double>& y) { y = dyadlab::apply(*At, x); };
  return m;
}

struct NormResult {
  double value = 0;
  int iterations = 0;
  double residual = 0;  // relative change of the Rayleigh quotient at exit
};

struct NormOptions {
  double tol = 1e-12;
  std::uint64_t seed = 20240601;
  int restarts = 3;
  int maxIterations = 200000;
};

NormResult operatorNormDetailed(const LinearMap& A, const NormOptions& opt = {});

inline double operatorNorm(const LinearMap& A, const NormOptions& opt = {}) { return operatorNormDetailed(A, opt).value; }
inline double operatorNorm(const SparseMatrix<double>& A, const NormOptions& opt = {}) {
  return operatorNormDetailed(asLinearMap(A), opt).value;
}

// ---------------------------------------------------------------------------
// Rectangular BMO.

template <class S>
struct BmoRectResult {
  S value;  // squared norm
  DyadicRectangle witness;
};

// E(I,J) = sum over R inside I x J of (b,h_R)^2, by inclusion-exclusion over children.
template <class S>
BmoRectResult<S> bmoRect(const HaarExpansion<S>& b) {
  const int N = b.N, m = 2 << N;  // node index (1<<l)+k, levels 0..N
  std::vector<S> E(static_cast<std::size_t>(m) * m, S(0));
  auto at = [&](int a, int c) -> S& { return E[static_cast<std::size_t>(a) * m + c]; };
  BmoRectResult<S> best{S(0), DyadicRectangle{{0, 0}, {0, 0}}};
  bool first = true;
  for (int lx = N - 1; lx >= 0; --lx)
    for (int ly = N - 1; ly >= 0; --ly)
      for (std::int64_t kx = 0; kx < (std::int64_t{1} << lx); ++kx)
        for (std::int64_t ky = 0; ky < (std::int64_t{1} << ly); ++ky) {
          int a = (1 << lx) + static_cast<int>(kx), c = (1 << ly) + static_cast<int>(ky);
          S v = b.at(a, c) * b.at(a, c);
          if (lx + 1 < N) v += at(2 * a, c) + at(2 * a + 1, c);
          if (ly + 1 < N) v += at(a, 2 * c) + at(a, 2 * c + 1);
          if (lx + 1 < N && ly + 1 < N)
            v -= at(2 * a, 2 * c) + at(2 * a, 2 * c + 1) + at(2 * a + 1, 2 * c) + at(2 * a + 1, 2 * c + 1);
          at(a, c) = v;
          S scaled = v * ScalarTraits<S>::fraction(1L << (lx + ly), 1);
          if (first || scaled > best.value) {
            best = {scaled, DyadicRectangle{{lx, kx}, {ly, ky}}};
            first = false;
          }
        }
  return best;
}

// ---------------------------------------------------------------------------
// Chang-Fefferman BMO over dyadic open sets.

template <class S>
struct ChFResult {
  S value;  // squared norm, (1/|U|) sum_{R in U} (b,h_R)^2
  DyadicOpenSet witness;
  bool exact = false;
};

template <class S>
S chfEnergy(const HaarExpansion<S>& b, const DyadicOpenSet& U) {
  S acc(0);
  for (const auto& R : b.support())
    if (U.containsRect(R)) acc += b.coeff(R) * b.coeff(R);
  return acc;
}

template <class S>
S chfRatio(const HaarExpansion<S>& b, const DyadicOpenSet& U) {
  if (U.empty()) return S(0);
  return chfEnergy(b, U) * ScalarTraits<S>::fraction(1L << (2 * U.depth()), static_cast<long>(U.count()));
}

// Every nonempty cell union at N <= 2.
template <class S>
ChFResult<S> bmoChFExact(const HaarExpansion<S>& b) {
  const int N = b.N;
  if (N > 2) throw Error("exact Chang-Fefferman norm needs N <= 2");
  const int cells = 1 << (2 * N);
  auto support = b.support();
  std::vector<std::uint32_t> masks;
  std::vector<S> energy;
  for (const auto& R : support) {
    std::uint32_t mask = 0;
    for (auto i = firstCell(R.x, N); i < firstCell(R.x, N) + cellCount(R.x, N); ++i)
      for (auto j = firstCell(R.y, N); j < firstCell(R.y, N) + cellCount(R.y, N); ++j) mask |= 1u << (i * (1 << N) + j);
    masks.push_back(mask);
    energy.push_back(b.coeff(R) * b.coeff(R));
  }
  S bestE(0);
  int bestCount = 1;
  std::uint32_t bestMask = 1;
  for (std::uint32_t U = 1; U < (1u << cells); ++U) {
    S e(0);
    for (std::size_t r = 0; r < masks.size(); ++r)
      if ((masks[r] & U) == masks[r]) e += energy[r];
    int cnt = __builtin_popcount(U);
    // e / cnt > bestE / bestCount; ties keep the smaller set seen first
    if (e * S(static_cast<long>(bestCount)) > bestE * S(static_cast<long>(cnt))) {
      bestE = e;
      bestCount = cnt;
      bestMask = U;
    }
  }
  std::vector<std::uint8_t> bits(cells);
  for (int k = 0; k < cells; ++k) bits[k] = (bestMask >> k) & 1u;
  DyadicOpenSet W(N, bits);
  return {chfRatio(b, W), W, true};
}

struct ChFSearchOptions {
  int restarts = 10;
  std::uint64_t seed = 7;
};

namespace detail {

struct CellBits {
  std::vector<std::uint64_t> w;
  explicit CellBits(std::size_t cells = 0) : w((cells + 63) / 64, 0) {}
  void set(std::size_t k) { w[k / 64] |= std::uint64_t{1} << (k % 64); }
  bool subsetOf(const CellBits& o) const {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] & ~o.w[i]) return false;
    return true;
  }
  int count() const {
    int c = 0;
    for (auto x : w) c += __builtin_popcountll(x);
    return c;
  }
  CellBits& operator|=(const CellBits& o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
    return *this;
  }
};

}  // namespace detail

// Local search over unions of supported rectangles. Restricting to such unions loses
// nothing: replacing U by the union of the supported rectangles inside it keeps the
// energy and cannot grow the area.
template <class S>
ChFResult<S> bmoChFHeuristic(const HaarExpansion<S>& b, const ChFSearchOptions& opt = {}) {
  const int N = b.N, n = 1 << N;
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  auto support = b.support();
  if (support.empty()) return {S(0), DyadicOpenSet(N), false};
  const std::size_t m = support.size();
  std::vector<detail::CellBits> bits(m, detail::CellBits(cells));
  std::vector<double> energy(m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& R = support[r];
    for (auto i = firstCell(R.x, N); i < firstCell(R.x, N) + cellCount(R.x, N); ++i)
      for (auto j = firstCell(R.y, N); j < firstCell(R.y, N) + cellCount(R.y, N); ++j)
        bits[r].set(static_cast<std::size_t>(i * n + j));
    double c = toDouble(b.coeff(R));
    energy[r] = c * c;
  }
  auto evaluate = [&](const std::vector<char>& chosen) {
    detail::CellBits U(cells);
    bool any = false;
    for (std::size_t r = 0; r < m; ++r)
      if (chosen[r]) {
        U |= bits[r];
        any = true;
      }
    if (!any) return -1.0;
    double e = 0;
    for (std::size_t r = 0; r < m; ++r)
      if (bits[r].subsetOf(U)) e += energy[r];
    return e / U.count();
  };
  auto climb = [&](std::vector<char> chosen) {
    double cur = evaluate(chosen);
    for (;;) {
      double best = cur;
      std::size_t arg = m;
      for (std::size_t r = 0; r < m; ++r) {
        chosen[r] ^= 1;
        double v = evaluate(chosen);
        chosen[r] ^= 1;
        if (v > best * (1 + 1e-12) + 1e-300) {
          best = v;
          arg = r;
        }
      }
      if (arg == m) break;
      chosen[arg] ^= 1;
      cur = best;
    }
    return std::make_pair(cur, chosen);
  };

  // start 1 is the best rectangle, so the result never falls below bmoRect
  const DyadicRectangle bestRect = bmoRect(b).witness;
  const int starts = opt.restarts + 2;
  std::vector<std::pair<double, std::vector<char>>> results(starts);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < starts; ++s) {
    std::vector<char> chosen(m, 0);
    if (s == 0) {
      std::size_t arg = 0;
      for (std::size_t r = 0; r < m; ++r)
        if (energy[r] / bits[r].count() > energy[arg] / bits[arg].count()) arg = r;
      chosen[arg] = 1;
    } else if (s == 1) {
      for (std::size_t r = 0; r < m; ++r) chosen[r] = bestRect.contains(support[r]);
    } else {
      std::mt19937_64 rng(opt.seed * 1000003u + static_cast<std::uint64_t>(s));
      std::uniform_int_distribution<std::size_t> pick(0, m - 1);
      int k = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < k; ++i) chosen[pick(rng)] = 1;
    }
    results[s] = climb(std::move(chosen));
  }
  int bestStart = 0;
  for (int s = 1; s < starts; ++s)
    if (results[s].first > results[bestStart].first) bestStart = s;

  std::vector<DyadicRectangle> rects;
  for (std::size_t r = 0; r < m; ++r)
    if (results[bestStart].second[r]) rects.push_back(support[r]);
  auto W = DyadicOpenSet::fromRectangles(N, rects);
  return {chfRatio(b, W), W, false};
}

template <class S>
ChFResult<S> bmoChF(const HaarExpansion<S>& b, bool exact, const ChFSearchOptions& opt = {}) {
  return exact ? bmoChFExact(b) : bmoChFHeuristic(b, opt);
}

// ---------------------------------------------------------------------------
// b = alpha0 + beta with alpha0 carrying the Haar coefficients of rectangles inside U.

template <class S>
std::pair<HaarExpansion<S>, HaarExpansion<S>> restrictSymbol(const HaarExpansion<S>& b, const DyadicOpenSet& U) {
  if (U.depth() != b.N) throw Error("resolution mismatch");
  HaarExpansion<S> alpha(b.N), beta = b;
  for (const auto& R : b.support())
    if (U.containsRect(R)) {
      alpha.set(R, b.coeff(R));
      beta.set(R, S(0));
    }
  return {alpha, beta};
}

// ---------------------------------------------------------------------------
// epsilon-smallness coefficients against 1_U.

struct SmallnessOptions {
  bool star = false;  // pair against T1* / T2* instead of T1 / T2
  Parity px = Parity::Even;
  Parity py = Parity::Even;
};

template <class S>
struct SmallnessReport {
  DyadicRectangle R;
  bool star = false;
  S c1, c2, c12;  // (1_U, S1 1~_I (x) 1~_J), (1_U, 1~_I (x) S2 1~_J), (1_U, S1 1~_I (x) S2 1~_J)
  double eps1 = 1e-2, eps2 = 1e-4;
  bool small(double eps) const {
    return std::fabs(toDouble(c1)) <= eps && std::fabs(toDouble(c2)) <= eps && std::fabs(toDouble(c12)) <= eps;
  }
};

// Reference evaluation straight from the definition.
template <class S>
SmallnessReport<S> smallnessCoefficients(const DyadicOpenSet& U, const DyadicRectangle& R, const SmallnessOptions& o = {}) {
  const int N = U.depth();
  R.checkDepth(N);
  auto F = analyze(U.template indicator<S>());
  auto ux = average1D<S>(R.x, N), uy = average1D<S>(R.y, N);
  auto sx = shift1D(ux, o.px, o.star, N), sy = shift1D(uy, o.py, o.star, N);
  SmallnessReport<S> r;
  r.R = R;
  r.star = o.star;
  r.c1 = pairing(F, sx, uy);
  r.c2 = pairing(F, ux, sy);
  r.c12 = pairing(F, sx, sy);
  return r;
}

// All coefficients of one U at once: each is the average over R of a fixed grid
// function (the adjoint shift applied to 1_U), read off summed-area tables.
template <class S>
class SmallnessTable {
 public:
  SmallnessTable(const DyadicOpenSet& U, const SmallnessOptions& o = {}) : N_(U.depth()), star_(o.star) {
    auto F = analyze(U.template indicator<S>());
    // (1_U, S v) = (S^T 1_U, v); S^T is T^T for the plain pairing and T for the starred one
    auto Tx = shift<S>({o.px, Variable::X}, N_), Ty = shift<S>({o.py, Variable::Y}, N_);
    auto Ax = o.star ? Tx : Tx.transpose();
    auto Ay = o.star ? Ty : Ty.transpose();
    auto g1 = dyadlab::apply(Ax, F), g2 = dyadlab::apply(Ay, F);
    auto g12 = dyadlab::apply(Ay, g1);
    build(synthesize(g1), p1_);
    build(synthesize(g2), p2_);
    build(synthesize(g12), p12_);
  }

  SmallnessReport<S> operator()(const DyadicRectangle& R) const {
    SmallnessReport<S> r;
    r.R = R;
    r.star = star_;
    r.c1 = average(p1_, R);
    r.c2 = average(p2_, R);
    r.c12 = average(p12_, R);
    return r;
  }

 private:
  void build(const GridFunction2D<S>& g, std::vector<S>& P) {
    const int n = g.side();
    P.assign(static_cast<std::size_t>(n + 1) * (n + 1), S(0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        P[(i + 1) * (n + 1) + j + 1] = g.at(i, j) + P[i * (n + 1) + j + 1] + P[(i + 1) * (n + 1) + j] - P[i * (n + 1) + j];
  }
  S average(const std::vector<S>& P, const DyadicRectangle& R) const {
    R.checkDepth(N_);
    const int n = 1 << N_;
    auto i0 = firstCell(R.x, N_), i1 = i0 + cellCount(R.x, N_);
    auto j0 = firstCell(R.y, N_), j1 = j0 + cellCount(R.y, N_);
    auto at = [&](std::int64_t i, std::int64_t j) -> const S& { return P[i * (n + 1) + j]; };
    S s = at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0);
    return s * ScalarTraits<S>::fraction(1, cellCount(R.x, N_) * cellCount(R.y, N_));
  }

  int N_;
  bool star_;
  std::vector<S> p1_, p2_, p12_;
};

// ---------------------------------------------------------------------------
// a_n = b_n + d_n a_{n-1}; the l^2 bound ||a|| <= ||b|| / (1 - q).

struct SequenceResolveResult {
  std::vector<double> a;
  double normA = 0, normB = 0, bound = 0;
  bool holds = false;
};

SequenceResolveResult sequenceResolve(const std::vector<double>& b, const std::vector<double>& d, double q);

}  // namespace dyadlab
