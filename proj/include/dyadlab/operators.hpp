#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "dyadlab/haar.hpp"
#include "dyadlab/matrix.hpp"

namespace dyadlab {

enum class Variable { X, Y };

struct ShiftVariant {
  Parity inputParity = Parity::Even;
  Variable variable = Variable::X;
};

// ---------------------------------------------------------------------------
// One-variable matrices (dimension 2^N).

template <class S>
SparseMatrix<S> shiftMatrix1D(Parity inputParity, int N) {
  std::vector<Triplet<S>> t;
  for (const auto& K : intervalsUpTo(N - 1)) {
    if (!shiftActsOn(K, inputParity, N)) continue;
    t.push_back({basisIndex(K.right()), basisIndex(K), S(1)});
    t.push_back({basisIndex(K.left()), basisIndex(K), S(-1)});
  }
  return SparseMatrix<S>::fromTriplets(basisSize(N), basisSize(N), std::move(t));
}

// Matrix of f -> e_a f in one variable: entry (p, q) = int e_a e_p e_q.
template <class S>
SparseMatrix<S> multiplicationMatrix1D(int a, int N) {
  const int n = basisSize(N);
  Vec<S> ea(n);
  for (int c = 0; c < n; ++c) ea[c] = basisValue1D<S>(a, c, N);
  return matrixFromColumns<S>(n, [&](int q) {
    Vec<S> prod(n);
    for (int c = 0; c < n; ++c) prod[c] = ea[c] * basisValue1D<S>(q, c, N);
    return analyze1D(prod, N);
  });
}

template <class S>
SparseMatrix<S> multiplicationMatrix1D(const Vec<S>& u, int N) {
  const int n = basisSize(N);
  Vec<S> vals = synthesize1D(u, N);
  return matrixFromColumns<S>(n, [&](int q) {
    Vec<S> prod(n);
    for (int c = 0; c < n; ++c) prod[c] = vals[c] * basisValue1D<S>(q, c, N);
    return analyze1D(prod, N);
  });
}

// <u>_I = (u, 1~_I)
template <class S>
S meanOver1D(const Vec<S>& u, const DyadicInterval& I, int N) {
  return average1D<S>(I, N).dot(u);
}

// The four pieces of f -> u f on one variable:
//   D_u f  = sum_I <u>_I (f,h_I) h_I
//   pi_u f = sum_I <f>_I (u,h_I) h_I
//   Z_u f  = sum_I (u,h_I)(f,h_I) 1~_I
//   mean   = <u><f>
enum class ProductPiece { D, Pi, Z, Mean };

template <class S>
SparseMatrix<S> productPiece1D(ProductPiece piece, const Vec<S>& u, int N) {
  const int n = basisSize(N);
  std::vector<Triplet<S>> t;
  if (piece == ProductPiece::Mean) {
    t.push_back({0, 0, u[0]});
    return SparseMatrix<S>::fromTriplets(n, n, std::move(t));
  }
  for (int idx = 1; idx < n; ++idx) {
    DyadicInterval I = intervalOfIndex(idx);
    switch (piece) {
      case ProductPiece::D:
        t.push_back({idx, idx, meanOver1D(u, I, N)});
        break;
      case ProductPiece::Pi:
        for (const auto& [k, w] : average1D<S>(I, N).terms) t.push_back({idx, k, u[idx] * w});
        break;
      case ProductPiece::Z:
        for (const auto& [k, w] : average1D<S>(I, N).terms) t.push_back({k, idx, u[idx] * w});
        break;
      default:
        break;
    }
  }
  return SparseMatrix<S>::fromTriplets(n, n, std::move(t));
}

// [T, M_u] in one variable
template <class S>
SparseMatrix<S> commutator1D(const Vec<S>& u, Parity inputParity, int N) {
  auto T = shiftMatrix1D<S>(inputParity, N);
  auto M = multiplicationMatrix1D(u, N);
  return T * M - M * T;
}

// ---------------------------------------------------------------------------
// Full product basis (dimension 4^N).

template <class S>
SparseMatrix<S> shift(const ShiftVariant& v, int N) {
  if (N < 1) throw Error("shift needs N >= 1");
  auto T = shiftMatrix1D<S>(v.inputParity, N);
  auto I = SparseMatrix<S>::identity(basisSize(N));
  return v.variable == Variable::X ? kron(T, I) : kron(I, T);
}

template <class S>
SparseMatrix<S> adjointShift(const ShiftVariant& v, int N) {
  return shift<S>(v, N).transpose();
}

// Matrix of f -> b f assembled from one-variable triple products.
template <class S>
SparseMatrix<S> multiplication(const HaarExpansion<S>& b) {
  const int N = b.N, n = b.side();
  std::vector<SparseMatrix<S>> M1(n);
  for (int a = 0; a < n; ++a) M1[a] = multiplicationMatrix1D<S>(a, N);
  std::vector<Triplet<S>> t;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const S& coef = b.at(a, c);
      if (isZero(coef)) continue;
      for (const auto& x : M1[a].triplets())
        for (const auto& y : M1[c].triplets())
          t.push_back({x.row * n + y.row, x.col * n + y.col, coef * x.value * y.value});
    }
  return SparseMatrix<S>::fromTriplets(n * n, n * n, std::move(t));
}

// Reference: column k is analyze(b * synthesize(e_k)).
template <class S>
SparseMatrix<S> multiplicationByColumns(const HaarExpansion<S>& b) {
  auto bg = synthesize(b);
  const int dim = static_cast<int>(b.dim());
  return matrixFromColumns<S>(dim, [&](int k) {
    HaarExpansion<S> e(b.N);
    e.coeffs[k] = S(1);
    return analyze(pointwiseProduct(bg, synthesize(e))).coeffs;
  });
}

template <class S>
SparseMatrix<S> repeatedCommutator(const SparseMatrix<S>& Mb, const SparseMatrix<S>& T1, const SparseMatrix<S>& T2) {
  return T2 * T1 * Mb - T2 * Mb * T1 - T1 * Mb * T2 + Mb * T1 * T2;
}

struct CommutatorOptions {
  bool star = false;  // use T1*, T2* instead of T1, T2
  Parity px = Parity::Even;
  Parity py = Parity::Even;
};

template <class S>
SparseMatrix<S> repeatedCommutator(const HaarExpansion<S>& b, const CommutatorOptions& o = {}) {
  auto T1 = shift<S>({o.px, Variable::X}, b.N);
  auto T2 = shift<S>({o.py, Variable::Y}, b.N);
  if (o.star) {
    T1 = T1.transpose();
    T2 = T2.transpose();
  }
  return repeatedCommutator(multiplication(b), T1, T2);
}

// ---------------------------------------------------------------------------
// The nine parts of the repeated commutator.

enum class Part { DD, Dpi, DZ, piD, pipi, piZ, ZD, Zpi, ZZ };
inline constexpr std::array<Part, 9> kAllParts = {Part::DD, Part::Dpi, Part::DZ, Part::piD, Part::pipi,
                                                  Part::piZ, Part::ZD, Part::Zpi, Part::ZZ};
inline constexpr std::array<const char*, 9> kPartNames = {"DD", "Dpi", "DZ", "piD", "pipi", "piZ", "ZD", "Zpi", "ZZ"};
inline const char* partName(Part p) { return kPartNames[static_cast<int>(p)]; }
inline int lineCount(Part p) {
  switch (p) {
    case Part::DD: return 1;
    case Part::Dpi:
    case Part::DZ:
    case Part::piD:
    case Part::ZD: return 2;
    default: return 4;
  }
}
inline bool hasD(Part p) { return p == Part::DD || p == Part::Dpi || p == Part::DZ || p == Part::piD || p == Part::ZD; }
inline ProductPiece xPiece(Part p) {
  switch (p) {
    case Part::DD:
    case Part::Dpi:
    case Part::DZ: return ProductPiece::D;
    case Part::piD:
    case Part::pipi:
    case Part::piZ: return ProductPiece::Pi;
    default: return ProductPiece::Z;
  }
}
inline ProductPiece yPiece(Part p) {
  switch (p) {
    case Part::DD:
    case Part::piD:
    case Part::ZD: return ProductPiece::D;
    case Part::Dpi:
    case Part::pipi:
    case Part::Zpi: return ProductPiece::Pi;
    default: return ProductPiece::Z;
  }
}

namespace detail {

// One variable of the block formulas: "shift" is the shift appearing in the commutator
// (T, or T* for the starred list) and "adj" its adjoint, used when a shift is moved from f
// onto the window: (T f, w) = (f, T* w).
template <class S>
struct Axis {
  int N;
  Parity parity;
  bool star;

  SparseVec<S> h(const DyadicInterval& I) const { return haar1D<S>(I, N); }
  SparseVec<S> avg(const DyadicInterval& I) const { return average1D<S>(I, N); }
  SparseVec<S> shift(const SparseVec<S>& v) const { return shift1D(v, parity, star, N); }
  SparseVec<S> adj(const SparseVec<S>& v) const { return shift1D(v, parity, !star, N); }
  bool dActs(const DyadicInterval& K) const { return shiftActsOn(K, parity, N); }
  SparseVec<S> children(const DyadicInterval& K) const { return h(K.left()) + h(K.right()); }
};

}  // namespace detail

// Emits every summand of every block as  coef * (f, winX (x) winY) * outX (x) outY.
// Line order inside a block follows the block lists: f, T2 f, T1 f, T1 T2 f
// (for the starred list every T is replaced by T*).
template <class S, class Sink>
void emitParts(const HaarExpansion<S>& b, const CommutatorOptions& o, Sink&& emit) {
  const int N = b.N;
  detail::Axis<S> X{N, o.px, o.star}, Y{N, o.py, o.star};
  // [T, D_{h_K}]: plain  f -> -|K|^{-1/2} (f,h_K)(h_{K-}+h_{K+});
  //               star   f -> +|K|^{-1/2} ((f,h_{K-})+(f,h_{K+})) h_K.
  // The normalization is the parent's, -|I^|^{-1/2}, not |I|^{-1/2} of the child.
  auto dOut = [&](const detail::Axis<S>& A, const DyadicInterval& K) { return o.star ? A.h(K) : A.children(K); };
  auto dWin = [&](const detail::Axis<S>& A, const DyadicInterval& K) { return o.star ? A.children(K) : A.h(K); };
  auto dCoef = [&](const DyadicInterval& K) {
    S c = invSqrtLength<S>(K.level);
    return o.star ? c : S(-c);
  };

  for (const auto& R : b.support()) {
    const DyadicInterval& I = R.x;
    const DyadicInterval& J = R.y;
    const S c = b.coeff(R);
    const S mc = -c;

    // DD: sum_{R odd,odd} (b,h_{R^})(f,h_{R^}) h_R / |R^|^{1/2}   (the symbol rectangle here is R^)
    if (X.dActs(I) && Y.dActs(J)) emit(Part::DD, 0, c * dCoef(I) * dCoef(J), dOut(X, I), dOut(Y, J), dWin(X, I), dWin(Y, J));

    // D pi; the first line needs no "J even" restriction, T2 h_J vanishes otherwise
    if (X.dActs(I)) {
      S d = c * dCoef(I);
      emit(Part::Dpi, 0, d, dOut(X, I), Y.shift(Y.h(J)), dWin(X, I), Y.avg(J));
      emit(Part::Dpi, 1, S(-d), dOut(X, I), Y.h(J), dWin(X, I), Y.adj(Y.avg(J)));
      // D Z, no parity restriction on J
      emit(Part::DZ, 0, d, dOut(X, I), Y.shift(Y.avg(J)), dWin(X, I), Y.h(J));
      emit(Part::DZ, 1, S(-d), dOut(X, I), Y.avg(J), dWin(X, I), Y.adj(Y.h(J)));
    }

    // pi D; the second window is 1~_I (x) h_{J^}
    if (Y.dActs(J)) {
      S d = c * dCoef(J);
      emit(Part::piD, 0, d, X.shift(X.h(I)), dOut(Y, J), X.avg(I), dWin(Y, J));
      emit(Part::piD, 1, S(-d), X.h(I), dOut(Y, J), X.adj(X.avg(I)), dWin(Y, J));
      // Z D
      emit(Part::ZD, 0, d, X.shift(X.avg(I)), dOut(Y, J), X.h(I), dWin(Y, J));
      emit(Part::ZD, 1, S(-d), X.avg(I), dOut(Y, J), X.adj(X.h(I)), dWin(Y, J));
    }

    // pi pi
    emit(Part::pipi, 0, c, X.shift(X.h(I)), Y.shift(Y.h(J)), X.avg(I), Y.avg(J));
    emit(Part::pipi, 1, mc, X.shift(X.h(I)), Y.h(J), X.avg(I), Y.adj(Y.avg(J)));
    emit(Part::pipi, 2, mc, X.h(I), Y.shift(Y.h(J)), X.adj(X.avg(I)), Y.avg(J));
    emit(Part::pipi, 3, c, X.h(I), Y.h(J), X.adj(X.avg(I)), Y.adj(Y.avg(J)));

    // pi Z; lines 3-4 carry no restriction on I, the shift sits on f
    emit(Part::piZ, 0, c, X.shift(X.h(I)), Y.shift(Y.avg(J)), X.avg(I), Y.h(J));
    emit(Part::piZ, 1, mc, X.shift(X.h(I)), Y.avg(J), X.avg(I), Y.adj(Y.h(J)));
    emit(Part::piZ, 2, mc, X.h(I), Y.shift(Y.avg(J)), X.adj(X.avg(I)), Y.h(J));
    emit(Part::piZ, 3, c, X.h(I), Y.avg(J), X.adj(X.avg(I)), Y.adj(Y.h(J)));

    // Z pi, no parity restriction on I
    emit(Part::Zpi, 0, c, X.shift(X.avg(I)), Y.shift(Y.h(J)), X.h(I), Y.avg(J));
    emit(Part::Zpi, 1, mc, X.shift(X.avg(I)), Y.h(J), X.h(I), Y.adj(Y.avg(J)));
    emit(Part::Zpi, 2, mc, X.avg(I), Y.shift(Y.h(J)), X.adj(X.h(I)), Y.avg(J));
    emit(Part::Zpi, 3, c, X.avg(I), Y.h(J), X.adj(X.h(I)), Y.adj(Y.avg(J)));

    // Z Z
    emit(Part::ZZ, 0, c, X.shift(X.avg(I)), Y.shift(Y.avg(J)), X.h(I), Y.h(J));
    emit(Part::ZZ, 1, mc, X.shift(X.avg(I)), Y.avg(J), X.h(I), Y.adj(Y.h(J)));
    emit(Part::ZZ, 2, mc, X.avg(I), Y.shift(Y.avg(J)), X.adj(X.h(I)), Y.h(J));
    emit(Part::ZZ, 3, c, X.avg(I), Y.avg(J), X.adj(X.h(I)), Y.adj(Y.h(J)));
  }
}

template <class S>
struct PartMatrices {
  int N = 0;
  std::array<std::vector<SparseMatrix<S>>, 9> lines;
  SparseMatrix<S> mean;  // commutator of the constant-factor part of b; identically zero

  const std::vector<SparseMatrix<S>>& operator[](Part p) const { return lines[static_cast<int>(p)]; }
  SparseMatrix<S> total(Part p) const {
    const auto& l = (*this)[p];
    SparseMatrix<S> acc = l[0];
    for (std::size_t i = 1; i < l.size(); ++i) acc = acc + l[i];
    return acc;
  }
  SparseMatrix<S> sum() const {
    SparseMatrix<S> acc = mean;
    for (Part p : kAllParts) acc = acc + total(p);
    return acc;
  }
};

template <class S>
struct PartOutputs {
  int N = 0;
  std::array<std::vector<HaarExpansion<S>>, 9> lines;

  const std::vector<HaarExpansion<S>>& operator[](Part p) const { return lines[static_cast<int>(p)]; }
  const HaarExpansion<S>& line(Part p, int i) const { return lines[static_cast<int>(p)][i]; }
  HaarExpansion<S> total(Part p) const {
    HaarExpansion<S> acc(N);
    for (const auto& l : (*this)[p]) acc += l;
    return acc;
  }
  HaarExpansion<S> sum() const {
    HaarExpansion<S> acc(N);
    for (Part p : kAllParts) acc += total(p);
    return acc;
  }
};

template <class S>
PartMatrices<S> ninePartDecomposition(const HaarExpansion<S>& b, const CommutatorOptions& o = {}) {
  const int N = b.N, n = b.side(), dim = n * n;
  std::array<std::vector<std::vector<Triplet<S>>>, 9> acc;
  for (Part p : kAllParts) acc[static_cast<int>(p)].resize(lineCount(p));
  emitParts(b, o, [&](Part p, int line, const S& coef, const SparseVec<S>& ox, const SparseVec<S>& oy,
                      const SparseVec<S>& wx, const SparseVec<S>& wy) {
    if (isZero(coef)) return;
    auto& t = acc[static_cast<int>(p)][line];
    for (const auto& [a, va] : ox.terms)
      for (const auto& [c, vc] : oy.terms) {
        S out = coef * va * vc;
        for (const auto& [a2, wa] : wx.terms)
          for (const auto& [c2, wc] : wy.terms) t.push_back({a * n + c, a2 * n + c2, out * wa * wc});
      }
  });
  PartMatrices<S> out;
  out.N = N;
  for (Part p : kAllParts)
    for (auto& t : acc[static_cast<int>(p)])
      out.lines[static_cast<int>(p)].push_back(SparseMatrix<S>::fromTriplets(dim, dim, std::move(t)));
  HaarExpansion<S> constantPart = b - b.haarPart();
  out.mean = repeatedCommutator(constantPart, o);
  return out;
}

// All block lines applied to a single function f.
template <class S>
PartOutputs<S> applyParts(const HaarExpansion<S>& b, const HaarExpansion<S>& f, const CommutatorOptions& o = {}) {
  if (b.N != f.N) throw Error("resolution mismatch");
  PartOutputs<S> out;
  out.N = b.N;
  for (Part p : kAllParts) out.lines[static_cast<int>(p)].assign(lineCount(p), HaarExpansion<S>(b.N));
  emitParts(b, o, [&](Part p, int line, const S& coef, const SparseVec<S>& ox, const SparseVec<S>& oy,
                      const SparseVec<S>& wx, const SparseVec<S>& wy) {
    S w = pairing(f, wx, wy);
    if (isZero(w) || isZero(coef)) return;
    addTensor(out.lines[static_cast<int>(p)][line], S(coef * w), ox, oy);
  });
  return out;
}

// Reference for a single block: sum_R (b,h_R) [S, X_{h_I}] (x) [S, Y_{h_J}] with the
// one-variable product pieces X, Y built from their defining formulas.
template <class S>
SparseMatrix<S> partByTensorCommutators(const HaarExpansion<S>& b, Part part, const CommutatorOptions& o = {}) {
  const int N = b.N, n = b.side();
  auto Tx = shiftMatrix1D<S>(o.px, N), Ty = shiftMatrix1D<S>(o.py, N);
  if (o.star) {
    Tx = Tx.transpose();
    Ty = Ty.transpose();
  }
  SparseMatrix<S> total(n * n, n * n);
  std::vector<SparseMatrix<S>> cx(n), cy(n);
  for (int a = 1; a < n; ++a) {
    Vec<S> e(n, S(0));
    e[a] = S(1);
    auto X = productPiece1D(xPiece(part), e, N);
    auto Y = productPiece1D(yPiece(part), e, N);
    cx[a] = Tx * X - X * Tx;
    cy[a] = Ty * Y - Y * Ty;
  }
  for (const auto& R : b.support()) {
    int a = basisIndex(R.x), c = basisIndex(R.y);
    total = total + kron(cx[a], cy[c]).scaled(b.at(a, c));
  }
  return total;
}

// [T1, D part in x] written out: f -> sum_{I odd} -|I^|^{-1/2} (b, h_{I^})(f, h_{I^}) h_I,
// where (b, h_{I^}) is a function of y acting by multiplication.
template <class S>
SparseMatrix<S> iteratedDCommutator(const HaarExpansion<S>& b) {
  const int N = b.N, n = b.side();
  if (N < 2) throw Error("iteratedDCommutator needs N >= 2");
  std::vector<Triplet<S>> t;
  for (const auto& I : intervalsUpTo(N - 1, 1)) {
    if (I.isEven()) continue;
    DyadicInterval P = parent(I);
    if (!shiftActsOn(P, Parity::Even, N)) continue;
    S coef = -invSqrtLength<S>(P.level);
    Vec<S> bP(n);
    for (int c = 0; c < n; ++c) bP[c] = b.at(basisIndex(P), c);
    auto My = multiplicationMatrix1D(bP, N);
    for (const auto& m : My.triplets())
      t.push_back({basisIndex(I) * n + m.row, basisIndex(P) * n + m.col, coef * m.value});
  }
  return SparseMatrix<S>::fromTriplets(n * n, n * n, std::move(t));
}

// The x-variable D part of multiplication: sum_{a,c} b_{ac} D_{e_a} (x) M_{e_c}.
template <class S>
SparseMatrix<S> xDPart(const HaarExpansion<S>& b) {
  const int N = b.N, n = b.side();
  SparseMatrix<S> total(n * n, n * n);
  for (int a = 0; a < n; ++a) {
    Vec<S> col(n);
    bool any = false;
    for (int c = 0; c < n; ++c) {
      col[c] = b.at(a, c);
      any = any || !isZero(col[c]);
    }
    if (!any) continue;
    Vec<S> e(n, S(0));
    e[a] = S(1);
    total = total + kron(productPiece1D(ProductPiece::D, e, N), multiplicationMatrix1D(col, N));
  }
  return total;
}

// ---------------------------------------------------------------------------
// The 25 operators obtained by testing on h_{I''} (x) h_{J''}.

template <class S>
struct TestedOutput {
  std::string name;
  HaarExpansion<S> value;
  bool applicable;
};

template <class S>
std::vector<TestedOutput<S>> testedOperators(const HaarExpansion<S>& b, const DyadicInterval& Ipp, const DyadicInterval& Jpp);

// ---------------------------------------------------------------------------
// T^b(p (x) h_{J''}) split into P1..P5 and P_even.

template <class S>
struct POperators {
  HaarExpansion<S> P1, P2, P3, P4, P5, Peven;
  bool evenCase = false;
  HaarExpansion<S> sum() const { return P1 + P2 + P3 + P4 + P5; }
};

template <class S>
POperators<S> pOperators(const HaarExpansion<S>& b, const Vec<S>& p, const DyadicInterval& Jpp);

// ---------------------------------------------------------------------------
// The four lines of the pi-pi block for a test function f.

template <class S>
struct PPForm {
  HaarExpansion<S> I, II, III, IV;
  HaarExpansion<S> combined() const { return I - II - III + IV; }
};

template <class S>
PPForm<S> ppForm(const HaarExpansion<S>& alpha0, const HaarExpansion<S>& f, bool star);

// ---------------------------------------------------------------------------
// One-parameter pi-pi form.

template <class S>
struct OneParameterForm {
  Vec<S> A, B;
};

template <class S>
OneParameterForm<S> onePtPiForm(const Vec<S>& alpha0, const Vec<S>& f, const DyadicInterval& I0, int N);

// c_I = <T* 1_{I0}>_{I^}
template <class S>
S cCoefficient(const DyadicInterval& I0, const DyadicInterval& Ihat, int N);

}  // namespace dyadlab

#include "dyadlab/operators_impl.hpp"
