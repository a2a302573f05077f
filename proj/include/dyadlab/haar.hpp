#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/scalar.hpp"

namespace dyadlab {

inline int basisSize(int N) { return 1 << N; }

// ---------------------------------------------------------------------------
// One-variable expansions.  A coefficient vector has length 2^N: entry 0 is the
// coefficient of the constant 1, entry 2^l + k that of h_{l:k}.

template <class S>
using Vec = std::vector<S>;

template <class S>
struct SparseVec {
  std::vector<std::pair<int, S>> terms;

  void add(int index, const S& v) {
    if (!isZero(v)) terms.emplace_back(index, v);
  }
  bool empty() const { return terms.empty(); }

  void normalize() {
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, S>> out;
    for (auto& t : terms) {
      if (!out.empty() && out.back().first == t.first)
        out.back().second += t.second;
      else
        out.push_back(t);
    }
    std::erase_if(out, [](const auto& t) { return isZero(t.second); });
    terms = std::move(out);
  }

  SparseVec scaled(const S& c) const {
    SparseVec r;
    for (const auto& [i, v] : terms) r.add(i, v * c);
    return r;
  }
  friend SparseVec operator+(SparseVec a, const SparseVec& b) {
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    a.normalize();
    return a;
  }
  friend SparseVec operator-(SparseVec a, const SparseVec& b) { return a + b.scaled(S(-1)); }

  S dot(const Vec<S>& dense) const {
    S acc(0);
    for (const auto& [i, v] : terms) acc += v * dense[i];
    return acc;
  }
  Vec<S> dense(int N) const {
    Vec<S> d(basisSize(N), S(0));
    for (const auto& [i, v] : terms) d[i] += v;
    return d;
  }
};

template <class S>
SparseVec<S> haar1D(const DyadicInterval& I, int N) {
  if (I.level >= N) throw Error("Haar function " + I.str() + " needs children on the depth-" + std::to_string(N) + " grid");
  SparseVec<S> v;
  v.add(basisIndex(I), S(1));
  return v;
}

template <class S>
SparseVec<S> constant1D() {
  SparseVec<S> v;
  v.add(0, S(1));
  return v;
}

// 1~_I = 1_I/|I| = 1 + sum_{K strictly containing I} h_K(I) h_K.
template <class S>
SparseVec<S> average1D(const DyadicInterval& I, int N) {
  I.checkDepth(N);
  SparseVec<S> v;
  v.add(0, S(1));
  DyadicInterval child = I;
  while (child.level > 0) {
    DyadicInterval K = parent(child);
    S value = invSqrtLength<S>(K.level);
    v.add(basisIndex(K), hatSign(child) > 0 ? value : -value);
    child = K;
  }
  std::reverse(v.terms.begin(), v.terms.end());
  return v;
}

// Value h_I(J) of h_I on a dyadic interval J strictly inside I.
template <class S>
S haarValueOn(const DyadicInterval& I, const DyadicInterval& J) {
  if (!I.strictlyContains(J)) throw Error("haarValueOn: " + J.str() + " is not strictly inside " + I.str());
  bool right = ((J.position >> (J.level - I.level - 1)) & 1) != 0;
  S value = invSqrtLength<S>(I.level);
  return right ? value : -value;
}

// The shift acting on one variable: h_K -> h_{K+} - h_{K-} for K of the given input parity
// with level < N-1; every other basis element goes to 0.
inline bool shiftActsOn(const DyadicInterval& K, Parity inputParity, int N) {
  return K.parity() == inputParity && K.level < N - 1;
}

template <class S>
SparseVec<S> shift1D(const SparseVec<S>& v, Parity inputParity, bool adjoint, int N) {
  SparseVec<S> out;
  for (const auto& [idx, c] : v.terms) {
    if (idx == 0) continue;
    DyadicInterval K = intervalOfIndex(idx);
    if (!adjoint) {
      if (!shiftActsOn(K, inputParity, N)) continue;
      out.add(basisIndex(K.right()), c);
      out.add(basisIndex(K.left()), -c);
    } else {
      if (K.level == 0) continue;
      DyadicInterval P = parent(K);
      if (!shiftActsOn(P, inputParity, N)) continue;
      out.add(basisIndex(P), hatSign(K) > 0 ? c : S(-c));
    }
  }
  out.normalize();
  return out;
}

template <class S>
Vec<S> shift1D(const Vec<S>& v, Parity inputParity, bool adjoint, int N) {
  SparseVec<S> sv;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) sv.add(i, v[i]);
  return shift1D(sv, inputParity, adjoint, N).dense(N);
}

// Value of the one-variable basis element with the given index on a bottom-level cell.
template <class S>
S basisValue1D(int index, std::int64_t cell, int N) {
  if (index == 0) return S(1);
  DyadicInterval I = intervalOfIndex(index);
  int s = haarSignAtCell(I, cell, N);
  if (s == 0) return S(0);
  S v = invSqrtLength<S>(I.level);
  return s > 0 ? v : S(-v);
}

// Fast one-variable transforms between cell values and coefficients.
template <class S>
Vec<S> analyze1D(const Vec<S>& values, int N) {
  const int n = basisSize(N);
  if (static_cast<int>(values.size()) != n) throw Error("analyze1D: size mismatch");
  Vec<S> coeffs(n, S(0));
  // integrals over the intervals of the current level
  Vec<S> integ(n);
  S cell = ScalarTraits<S>::fraction(1, n);
  for (int c = 0; c < n; ++c) integ[c] = values[c] * cell;
  for (int level = N - 1; level >= 0; --level) {
    const int m = 1 << level;
    S scale = invSqrtLength<S>(level);
    Vec<S> next(m);
    for (int k = 0; k < m; ++k) {
      coeffs[m + k] = (integ[2 * k + 1] - integ[2 * k]) * scale;
      next[k] = integ[2 * k] + integ[2 * k + 1];
    }
    integ = std::move(next);
  }
  coeffs[0] = integ[0];
  return coeffs;
}

template <class S>
Vec<S> synthesize1D(const Vec<S>& coeffs, int N) {
  const int n = basisSize(N);
  if (static_cast<int>(coeffs.size()) != n) throw Error("synthesize1D: size mismatch");
  Vec<S> vals{coeffs[0]};
  for (int level = 0; level < N; ++level) {
    const int m = 1 << level;
    S scale = invSqrtLength<S>(level);
    Vec<S> next(2 * m);
    for (int k = 0; k < m; ++k) {
      S d = coeffs[m + k] * scale;
      next[2 * k] = vals[k] - d;
      next[2 * k + 1] = vals[k] + d;
    }
    vals = std::move(next);
  }
  return vals;
}

template <class S>
struct GridFunction1D {
  int N = 0;
  Vec<S> values;

  GridFunction1D() = default;
  explicit GridFunction1D(int n) : N(n), values(basisSize(n), S(0)) {}
  GridFunction1D(int n, Vec<S> v) : N(n), values(std::move(v)) {
    if (static_cast<int>(values.size()) != basisSize(n)) throw Error("GridFunction1D: size mismatch");
  }
  Vec<S> coefficients() const { return analyze1D(values, N); }
  static GridFunction1D fromCoefficients(const Vec<S>& c, int n) { return {n, synthesize1D(c, n)}; }
};

// ---------------------------------------------------------------------------
// Two-variable objects.  Cells and tensor coefficients are both stored row-major with
// the x index first: cell (i, j) at i*2^N + j, coefficient of e_a (x) e_c at a*2^N + c.

template <class S>
struct GridFunction2D {
  int N = 0;
  Vec<S> values;

  GridFunction2D() = default;
  explicit GridFunction2D(int n) : N(n), values(static_cast<std::size_t>(basisSize(n)) * basisSize(n), S(0)) {}
  GridFunction2D(int n, Vec<S> v) : N(n), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(basisSize(n)) * basisSize(n))
      throw Error("GridFunction2D: size mismatch");
  }
  int side() const { return basisSize(N); }
  S& at(int i, int j) { return values[static_cast<std::size_t>(i) * side() + j]; }
  const S& at(int i, int j) const { return values[static_cast<std::size_t>(i) * side() + j]; }
};

template <class S>
struct HaarExpansion {
  int N = 0;
  Vec<S> coeffs;

  HaarExpansion() = default;
  explicit HaarExpansion(int n) : N(n), coeffs(static_cast<std::size_t>(basisSize(n)) * basisSize(n), S(0)) {}
  HaarExpansion(int n, Vec<S> c) : N(n), coeffs(std::move(c)) {
    if (coeffs.size() != static_cast<std::size_t>(basisSize(n)) * basisSize(n))
      throw Error("HaarExpansion: size mismatch");
  }

  int side() const { return basisSize(N); }
  std::size_t dim() const { return coeffs.size(); }
  S& at(int a, int c) { return coeffs[static_cast<std::size_t>(a) * side() + c]; }
  const S& at(int a, int c) const { return coeffs[static_cast<std::size_t>(a) * side() + c]; }

  void checkHaar(const DyadicRectangle& R) const {
    if (R.x.level >= N || R.y.level >= N) throw Error("rectangle " + R.str() + " has no Haar function at depth " + std::to_string(N));
  }
  const S& coeff(const DyadicRectangle& R) const {
    checkHaar(R);
    return at(basisIndex(R.x), basisIndex(R.y));
  }
  void set(const DyadicRectangle& R, const S& v) {
    checkHaar(R);
    at(basisIndex(R.x), basisIndex(R.y)) = v;
  }

  // sigma_H: rectangles with a nonzero h_I (x) h_J coefficient
  std::vector<DyadicRectangle> support() const {
    std::vector<DyadicRectangle> out;
    const int n = side();
    for (int a = 1; a < n; ++a)
      for (int c = 1; c < n; ++c)
        if (!isZero(at(a, c))) out.push_back({intervalOfIndex(a), intervalOfIndex(c)});
    return out;
  }

  bool isZeroFunction() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const S& v) { return isZero(v); });
  }

  // Only the h_I (x) h_J coefficients; constant factors dropped.
  HaarExpansion haarPart() const {
    HaarExpansion r(N);
    const int n = side();
    for (int a = 1; a < n; ++a)
      for (int c = 1; c < n; ++c) r.at(a, c) = at(a, c);
    return r;
  }

  HaarExpansion& operator+=(const HaarExpansion& o) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    return *this;
  }
  HaarExpansion& operator-=(const HaarExpansion& o) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
    return *this;
  }
  friend HaarExpansion operator+(HaarExpansion a, const HaarExpansion& b) { return a += b; }
  friend HaarExpansion operator-(HaarExpansion a, const HaarExpansion& b) { return a -= b; }
  friend bool operator==(const HaarExpansion& a, const HaarExpansion& b) { return a.N == b.N && a.coeffs == b.coeffs; }
};

template <class S>
using HaarSymbol = HaarExpansion<S>;

// (F, u (x) v) for an expansion F and one-variable sparse windows u, v.
template <class S>
S pairing(const HaarExpansion<S>& F, const SparseVec<S>& u, const SparseVec<S>& v) {
  S acc(0);
  for (const auto& [a, ua] : u.terms)
    for (const auto& [c, vc] : v.terms) acc += ua * vc * F.at(a, c);
  return acc;
}

// F += coef * u (x) v
template <class S>
void addTensor(HaarExpansion<S>& F, const S& coef, const SparseVec<S>& u, const SparseVec<S>& v) {
  for (const auto& [a, ua] : u.terms)
    for (const auto& [c, vc] : v.terms) F.at(a, c) += coef * ua * vc;
}

template <class S>
HaarExpansion<S> tensor(const SparseVec<S>& u, const SparseVec<S>& v, int N) {
  HaarExpansion<S> F(N);
  addTensor(F, S(1), u, v);
  return F;
}

template <class S>
HaarExpansion<S> tensorDense(const Vec<S>& u, const Vec<S>& v, int N) {
  HaarExpansion<S> F(N);
  const int n = basisSize(N);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) F.at(a, c) = u[a] * v[c];
  return F;
}

template <class S>
S dot(const HaarExpansion<S>& F, const HaarExpansion<S>& G) {
  if (F.N != G.N) throw Error("resolution mismatch");
  S acc(0);
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) acc += F.coeffs[i] * G.coeffs[i];
  return acc;
}

template <class S>
HaarExpansion<S> analyze(const GridFunction2D<S>& f) {
  const int N = f.N, n = f.side();
  if (N < 1) throw Error("analysis needs N >= 1");
  HaarExpansion<S> out(N);
  // transform along y for each x-cell, then along x for each y-coefficient
  std::vector<Vec<S>> rows(n);
  for (int i = 0; i < n; ++i) {
    Vec<S> row(f.values.begin() + static_cast<std::ptrdiff_t>(i) * n, f.values.begin() + static_cast<std::ptrdiff_t>(i + 1) * n);
    rows[i] = analyze1D(row, N);
  }
  for (int c = 0; c < n; ++c) {
    Vec<S> col(n);
    for (int i = 0; i < n; ++i) col[i] = rows[i][c];
    Vec<S> t = analyze1D(col, N);
    for (int a = 0; a < n; ++a) out.at(a, c) = t[a];
  }
  return out;
}

template <class S>
GridFunction2D<S> synthesize(const HaarExpansion<S>& F) {
  const int N = F.N, n = F.side();
  GridFunction2D<S> g(N);
  std::vector<Vec<S>> cols(n);
  for (int c = 0; c < n; ++c) {
    Vec<S> col(n);
    for (int a = 0; a < n; ++a) col[a] = F.at(a, c);
    cols[c] = synthesize1D(col, N);
  }
  for (int i = 0; i < n; ++i) {
    Vec<S> row(n);
    for (int c = 0; c < n; ++c) row[c] = cols[c][i];
    Vec<S> v = synthesize1D(row, N);
    for (int j = 0; j < n; ++j) g.at(i, j) = v[j];
  }
  return g;
}

// Reference transform: one quadrature inner product per basis element.
template <class S>
HaarExpansion<S> analyzeDirect(const GridFunction2D<S>& f) {
  const int N = f.N, n = f.side();
  HaarExpansion<S> out(N);
  S cell = ScalarTraits<S>::fraction(1, static_cast<long>(n) * n);
  std::vector<Vec<S>> table(n, Vec<S>(n));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) table[a][i] = basisValue1D<S>(a, i, N);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      S acc(0);
      for (int i = 0; i < n; ++i) {
        if (isZero(table[a][i])) continue;
        for (int j = 0; j < n; ++j) acc += f.at(i, j) * table[a][i] * table[c][j];
      }
      out.at(a, c) = acc * cell;
    }
  return out;
}

enum class BasisKind { Haar, Average, HaarAverage, AverageHaar };

template <class S>
Vec<S> oneVariableValues(bool haar, const DyadicInterval& I, int N) {
  const int n = basisSize(N);
  Vec<S> v(n, S(0));
  if (haar) {
    if (I.level >= N) throw Error("level overflow: h_" + I.str() + " at depth " + std::to_string(N));
    for (int c = 0; c < n; ++c) v[c] = basisValue1D<S>(basisIndex(I), c, N);
  } else {
    I.checkDepth(N);
    S height = ScalarTraits<S>::fraction(1L << I.level, 1);
    for (std::int64_t c = firstCell(I, N); c < firstCell(I, N) + cellCount(I, N); ++c) v[c] = height;
  }
  return v;
}

// h_R, 1~_R, h1_R = h_I (x) 1~_J, 1h_R = 1~_I (x) h_J evaluated cell by cell.
template <class S>
GridFunction2D<S> haarBasisFunction(BasisKind kind, const DyadicRectangle& R, int N) {
  bool hx = kind == BasisKind::Haar || kind == BasisKind::HaarAverage;
  bool hy = kind == BasisKind::Haar || kind == BasisKind::AverageHaar;
  Vec<S> u = oneVariableValues<S>(hx, R.x, N), v = oneVariableValues<S>(hy, R.y, N);
  GridFunction2D<S> g(N);
  for (int i = 0; i < g.side(); ++i)
    for (int j = 0; j < g.side(); ++j) g.at(i, j) = u[i] * v[j];
  return g;
}

template <class S>
S innerProduct(const GridFunction2D<S>& f, const GridFunction2D<S>& g) {
  if (f.N != g.N) throw Error("resolution mismatch");
  S acc(0);
  for (std::size_t k = 0; k < f.values.size(); ++k) acc += f.values[k] * g.values[k];
  return acc * ScalarTraits<S>::fraction(1, static_cast<long>(f.values.size()));
}

// int |f|^p for p in {2, 4}
template <class S>
S lpNormPower(const GridFunction2D<S>& f, int p) {
  if (p != 2 && p != 4) throw Error("only p = 2 and p = 4 are supported");
  S acc(0);
  for (const auto& v : f.values) {
    S sq = v * v;
    acc += (p == 2) ? sq : S(sq * sq);
  }
  return acc * ScalarTraits<S>::fraction(1, static_cast<long>(f.values.size()));
}

template <class S>
double lpNorm(const GridFunction2D<S>& f, int p) {
  return std::pow(toDouble(lpNormPower(f, p)), 1.0 / p);
}

template <class S>
GridFunction2D<S> pointwiseProduct(const GridFunction2D<S>& b, const GridFunction2D<S>& f) {
  if (b.N != f.N) throw Error("resolution mismatch");
  GridFunction2D<S> g(f.N);
  for (std::size_t k = 0; k < f.values.size(); ++k) g.values[k] = b.values[k] * f.values[k];
  return g;
}

template <class S>
S averageOver(const GridFunction2D<S>& f, const DyadicRectangle& R) {
  R.checkDepth(f.N);
  S acc(0);
  for (auto i = firstCell(R.x, f.N); i < firstCell(R.x, f.N) + cellCount(R.x, f.N); ++i)
    for (auto j = firstCell(R.y, f.N); j < firstCell(R.y, f.N) + cellCount(R.y, f.N); ++j)
      acc += f.at(static_cast<int>(i), static_cast<int>(j));
  return acc * ScalarTraits<S>::fraction(1, cellCount(R.x, f.N) * cellCount(R.y, f.N));
}

template <class T, class S>
HaarExpansion<T> convertExpansion(const HaarExpansion<S>& F) {
  HaarExpansion<T> out(F.N);
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    if constexpr (std::is_same_v<T, S>)
      out.coeffs[i] = F.coeffs[i];
    else
      out.coeffs[i] = static_cast<T>(toDouble(F.coeffs[i]));
  }
  return out;
}

}  // namespace dyadlab
