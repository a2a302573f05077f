#pragma once

// Included from operators.hpp.

namespace dyadlab {

namespace detail {

// sum_{K strictly inside P, parity filter} (b, h_K (x) e_other) h_P(K) * out(K)
// along one variable; "keep" selects which K enter the sum.
template <class S, class Keep, class Out>
SparseVec<S> nestedSum(const DyadicInterval& P, int N, Keep&& keep, Out&& out) {
  SparseVec<S> acc;
  for (int level = P.level + 1; level < N; ++level) {
    const int shiftBy = level - P.level;
    for (std::int64_t k = P.position << shiftBy; k < (P.position + 1) << shiftBy; ++k) {
      DyadicInterval K(level, k);
      if (!keep(K)) continue;
      S w = haarValueOn<S>(P, K);
      for (const auto& [idx, v] : out(K).terms) acc.add(idx, w * v);
    }
  }
  acc.normalize();
  return acc;
}

}  // namespace detail

template <class S>
std::vector<TestedOutput<S>> testedOperators(const HaarExpansion<S>& b, const DyadicInterval& Ipp, const DyadicInterval& Jpp) {
  const int N = b.N;
  if (Ipp.level >= N || Jpp.level >= N) throw Error("test function h_I''(x)h_J'' not admissible at this depth");
  const Parity E = Parity::Even;
  // "I'' even" in the displays means T h_{I''} != 0 on the grid
  const bool iEven = shiftActsOn(Ipp, E, N), jEven = shiftActsOn(Jpp, E, N);

  auto h = [&](const DyadicInterval& I) { return haar1D<S>(I, N); };
  auto avg = [&](const DyadicInterval& I) { return average1D<S>(I, N); };
  auto T = [&](const SparseVec<S>& v) { return shift1D(v, E, false, N); };
  auto coef = [&](const DyadicInterval& I, const DyadicInterval& J) { return b.coeff({I, J}); };
  auto children = [&](const DyadicInterval& I) { return h(I.right()) + h(I.left()); };
  auto even = [](const DyadicInterval& K) { return K.isEven(); };
  const S one(1);

  std::vector<TestedOutput<S>> out;
  auto add = [&](const std::string& name, bool applicable, auto&& build) {
    HaarExpansion<S> F(N);
    if (applicable) build(F);
    out.push_back({name, std::move(F), applicable});
  };
  // x- and y-sums "sum_{I strictly in P} (b, h_I (x) h_J) h_P(I) g(h_I)"
  auto sumI = [&](const DyadicInterval& P, const DyadicInterval& J, bool evenOnly, bool shifted) {
    return detail::nestedSum<S>(P, N, [&](const DyadicInterval& K) { return !evenOnly || even(K); },
                                [&](const DyadicInterval& K) { return (shifted ? T(h(K)) : h(K)).scaled(coef(K, J)); });
  };
  auto sumJ = [&](const DyadicInterval& I, const DyadicInterval& P, bool evenOnly, bool shifted) {
    return detail::nestedSum<S>(P, N, [&](const DyadicInterval& K) { return !evenOnly || even(K); },
                                [&](const DyadicInterval& K) { return (shifted ? T(h(K)) : h(K)).scaled(coef(I, K)); });
  };

  const DyadicInterval &I = Ipp, &J = Jpp;
  // Group I
  add("DZ2", iEven && jEven, [&](HaarExpansion<S>& F) {
    S r = invSqrtLength<S>(I.level);
    addTensor(F, S(coef(I, J.right()) * r), children(I), avg(J.right()));
    addTensor(F, S(-coef(I, J.left()) * r), children(I), avg(J.left()));
  });
  add("DD", iEven && jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(coef(I, J) * invSqrtLength<S>(I.level) * invSqrtLength<S>(J.level)), children(I), children(J));
  });
  add("ZD2", iEven && jEven, [&](HaarExpansion<S>& F) {
    S r = invSqrtLength<S>(J.level);
    addTensor(F, S(coef(I.right(), J) * r), avg(I.right()), children(J));
    addTensor(F, S(-coef(I.left(), J) * r), avg(I.left()), children(J));
  });
  add("ZZ4", iEven && jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, coef(I.right(), J.right()), avg(I.right()), avg(J.right()));
    addTensor(F, S(-coef(I.right(), J.left())), avg(I.right()), avg(J.left()));
    addTensor(F, S(-coef(I.left(), J.right())), avg(I.left()), avg(J.right()));
    addTensor(F, coef(I.left(), J.left()), avg(I.left()), avg(J.left()));
  });
  add("ZD1", jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-coef(I, J) * invSqrtLength<S>(J.level)), T(avg(I)), children(J));
  });
  add("DZ1", iEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-coef(I, J) * invSqrtLength<S>(I.level)), children(I), T(avg(J)));
  });
  add("ZZ2", jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-coef(I, J.right())), T(avg(I)), avg(J.right()));
    addTensor(F, coef(I, J.left()), T(avg(I)), avg(J.left()));
  });
  add("ZZ3", iEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-coef(I.right(), J)), avg(I.right()), T(avg(J)));
    addTensor(F, coef(I.left(), J), avg(I.left()), T(avg(J)));
  });
  add("ZZ1", true, [&](HaarExpansion<S>& F) { addTensor(F, coef(I, J), T(avg(I)), T(avg(J))); });

  // Group IIa
  add("piD2", iEven && jEven, [&](HaarExpansion<S>& F) {
    S r = invSqrtLength<S>(J.level);
    addTensor(F, r, sumI(I.right(), J, false, false), children(J));
    addTensor(F, S(-r), sumI(I.left(), J, false, false), children(J));
  });
  add("piZ2", iEven && jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, one, sumI(I.right(), J.right(), false, false), avg(J.right()));
    addTensor(F, S(-1), sumI(I.right(), J.left(), false, false), avg(J.left()));
    addTensor(F, S(-1), sumI(I.left(), J.right(), false, false), avg(J.right()));
    addTensor(F, one, sumI(I.left(), J.left(), false, false), avg(J.left()));
  });
  add("piD1", jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-invSqrtLength<S>(J.level)), sumI(I, J, true, true), children(J));
  });
  add("piZ1", iEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-1), sumI(I.right(), J, false, false), T(avg(J)));
    addTensor(F, one, sumI(I.left(), J, false, false), T(avg(J)));
  });
  add("piZ4", jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-1), sumI(I, J.right(), true, true), avg(J.right()));
    addTensor(F, one, sumI(I, J.left(), true, true), avg(J.left()));
  });
  add("piZ3", true, [&](HaarExpansion<S>& F) { addTensor(F, one, sumI(I, J, true, true), T(avg(J))); });

  // Group IIb
  add("Dpi2", iEven && jEven, [&](HaarExpansion<S>& F) {
    S r = invSqrtLength<S>(I.level);
    addTensor(F, r, children(I), sumJ(I, J.right(), false, false));
    addTensor(F, S(-r), children(I), sumJ(I, J.left(), false, false));
  });
  add("Zpi4", iEven && jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, one, avg(I.right()), sumJ(I.right(), J.right(), false, false));
    addTensor(F, S(-1), avg(I.left()), sumJ(I.left(), J.right(), false, false));
    addTensor(F, S(-1), avg(I.right()), sumJ(I.right(), J.left(), false, false));
    addTensor(F, one, avg(I.left()), sumJ(I.left(), J.left(), false, false));
  });
  add("Dpi1", iEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-invSqrtLength<S>(I.level)), children(I), sumJ(I, J, true, true));
  });
  add("Zpi2", jEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-1), T(avg(I)), sumJ(I, J.right(), false, false));
    addTensor(F, one, T(avg(I)), sumJ(I, J.left(), false, false));
  });
  add("Zpi3", iEven, [&](HaarExpansion<S>& F) {
    addTensor(F, S(-1), avg(I.right()), sumJ(I.right(), J, true, true));
    addTensor(F, one, avg(I.left()), sumJ(I.left(), J, true, true));
  });
  add("Zpi1", true, [&](HaarExpansion<S>& F) { addTensor(F, one, T(avg(I)), sumJ(I, J, true, true)); });

  // Group III: double sums, built rectangle by rectangle
  auto doubleSum = [&](HaarExpansion<S>& F, const S& sign, const DyadicInterval& P, bool shiftX, const DyadicInterval& Q,
                       bool shiftY) {
    auto xs = detail::nestedSum<S>(P, N, [&](const DyadicInterval& K) { return !shiftX || even(K); },
                                   [&](const DyadicInterval& K) {
                                     SparseVec<S> v;
                                     v.add(basisIndex(K), S(1));
                                     return v;
                                   });
    auto ys = detail::nestedSum<S>(Q, N, [&](const DyadicInterval& K) { return !shiftY || even(K); },
                                   [&](const DyadicInterval& K) {
                                     SparseVec<S> v;
                                     v.add(basisIndex(K), S(1));
                                     return v;
                                   });
    // xs, ys hold the weights h_P(I), h_Q(J) at the indices of I, J
    for (const auto& [a, wa] : xs.terms)
      for (const auto& [c, wc] : ys.terms) {
        S w = sign * b.at(a, c) * wa * wc;
        if (isZero(w)) continue;
        SparseVec<S> u, v;
        u.add(a, S(1));
        v.add(c, S(1));
        addTensor(F, w, shiftX ? T(u) : u, shiftY ? T(v) : v);
      }
  };
  add("pipi4", iEven && jEven, [&](HaarExpansion<S>& F) {
    doubleSum(F, one, I.right(), false, J.right(), false);
    doubleSum(F, S(-1), I.right(), false, J.left(), false);
    doubleSum(F, S(-1), I.left(), false, J.right(), false);
    doubleSum(F, one, I.left(), false, J.left(), false);
  });
  add("pipi3", iEven, [&](HaarExpansion<S>& F) {
    doubleSum(F, S(-1), I.right(), false, J, true);
    doubleSum(F, one, I.left(), false, J, true);
  });
  add("pipi2", jEven, [&](HaarExpansion<S>& F) {
    doubleSum(F, S(-1), I, true, J.right(), false);
    doubleSum(F, one, I, true, J.left(), false);
  });
  // printed with a leading minus; expanding [T,pi] (x) [T,pi] gives a plus, confirmed by the
  // identity sum = T^b(h_I'' (x) h_J'')
  add("pipi1", true, [&](HaarExpansion<S>& F) { doubleSum(F, one, I, true, J, true); });
  return out;
}

template <class S>
POperators<S> pOperators(const HaarExpansion<S>& b, const Vec<S>& p, const DyadicInterval& Jpp) {
  const int N = b.N, n = b.side();
  if (static_cast<int>(p.size()) != n) throw Error("p has the wrong length");
  if (Jpp.level >= N) throw Error("h_J'' not admissible at this depth");
  const Parity E = Parity::Even;
  auto h = [&](const DyadicInterval& J) { return haar1D<S>(J, N); };
  auto avg = [&](const DyadicInterval& J) { return average1D<S>(J, N); };
  auto T2 = [&](const SparseVec<S>& v) { return shift1D(v, E, false, N); };
  auto toSparse = [](const Vec<S>& v) {
    SparseVec<S> s;
    for (int i = 0; i < static_cast<int>(v.size()); ++i) s.add(i, v[i]);
    return s;
  };
  // [T1, b_J] p with b_J(x) = (b, . (x) h_J)
  auto commP = [&](const DyadicInterval& J) {
    Vec<S> bJ(n);
    for (int a = 0; a < n; ++a) bJ[a] = b.at(a, basisIndex(J));
    return toSparse(dyadlab::apply(commutator1D(bJ, E, N), p));
  };
  auto strictlyInside = [&](const DyadicInterval& P) {
    std::vector<DyadicInterval> r;
    for (const auto& K : intervalsUpTo(N - 1, P.level + 1))
      if (P.contains(K)) r.push_back(K);
    return r;
  };

  POperators<S> out;
  out.P1 = out.P2 = out.P3 = out.P4 = out.P5 = out.Peven = HaarExpansion<S>(N);
  for (const auto& J : strictlyInside(Jpp))
    if (J.isEven()) addTensor(out.P1, haarValueOn<S>(Jpp, J), commP(J), T2(h(J)));
  addTensor(out.P2, S(1), commP(Jpp), T2(avg(Jpp)));

  out.evenCase = shiftActsOn(Jpp, E, N);
  if (!out.evenCase) return out;
  const DyadicInterval Jp = Jpp.right(), Jm = Jpp.left();
  addTensor(out.P3, S(-invSqrtLength<S>(Jpp.level)), commP(Jpp), h(Jm) + h(Jp));
  for (const auto& J : strictlyInside(Jp)) addTensor(out.P4, S(-haarValueOn<S>(Jp, J)), commP(J), h(J));
  for (const auto& J : strictlyInside(Jm)) addTensor(out.P4, haarValueOn<S>(Jm, J), commP(J), h(J));
  addTensor(out.P5, S(-1), commP(Jp), avg(Jp));
  addTensor(out.P5, S(1), commP(Jm), avg(Jm));

  for (const auto& J : strictlyInside(Jp))
    if (J.isEven()) addTensor(out.Peven, S(-haarValueOn<S>(Jp, J)), commP(J), h(J));
  for (const auto& J : strictlyInside(Jm))
    if (J.isEven()) addTensor(out.Peven, haarValueOn<S>(Jm, J), commP(J), h(J));
  auto above = [&](const DyadicInterval& C, const S& sign) {
    SparseVec<S> v;
    for (DyadicInterval K = C; K.level > 0;) {
      K = parent(K);
      if (K.isEven()) v.add(basisIndex(K), haarValueOn<S>(K, C));
    }
    v.normalize();
    addTensor(out.Peven, sign, commP(C), v);
  };
  above(Jp, S(-1));
  above(Jm, S(1));
  return out;
}

template <class S>
PPForm<S> ppForm(const HaarExpansion<S>& alpha0, const HaarExpansion<S>& f, bool star) {
  const int N = alpha0.N;
  if (f.N != N) throw Error("resolution mismatch");
  const Parity E = Parity::Even;
  // S1 is the shift of the commutator, A1 its adjoint
  auto Sh = [&](const SparseVec<S>& v) { return shift1D(v, E, star, N); };
  auto Ad = [&](const SparseVec<S>& v) { return shift1D(v, E, !star, N); };
  PPForm<S> out{HaarExpansion<S>(N), HaarExpansion<S>(N), HaarExpansion<S>(N), HaarExpansion<S>(N)};
  for (const auto& R : alpha0.support()) {
    const S a = alpha0.coeff(R);
    auto hI = haar1D<S>(R.x, N), hJ = haar1D<S>(R.y, N);
    auto aI = average1D<S>(R.x, N), aJ = average1D<S>(R.y, N);
    addTensor(out.I, S(a * pairing(f, aI, aJ)), Sh(hI), Sh(hJ));
    addTensor(out.II, S(a * pairing(f, Ad(aI), aJ)), hI, Sh(hJ));
    addTensor(out.III, S(a * pairing(f, aI, Ad(aJ))), Sh(hI), hJ);
    addTensor(out.IV, S(a * pairing(f, Ad(aI), Ad(aJ))), hI, hJ);
  }
  return out;
}

template <class S>
OneParameterForm<S> onePtPiForm(const Vec<S>& alpha0, const Vec<S>& f, const DyadicInterval& I0, int N) {
  const int n = basisSize(N);
  if (static_cast<int>(alpha0.size()) != n || static_cast<int>(f.size()) != n) throw Error("length mismatch");
  for (int idx = 1; idx < n; ++idx)
    if (!isZero(alpha0[idx]) && !I0.contains(intervalOfIndex(idx)))
      throw Error("Haar support of alpha0 leaves D(" + I0.str() + ")");
  const Parity E = Parity::Even;
  Vec<S> Tf = shift1D(f, E, true, N);
  OneParameterForm<S> out{Vec<S>(n, S(0)), Vec<S>(n, S(0))};
  for (int idx = 1; idx < n; ++idx) {
    if (isZero(alpha0[idx])) continue;
    DyadicInterval I = intervalOfIndex(idx);
    auto avgI = average1D<S>(I, N);
    out.A[idx] += alpha0[idx] * avgI.dot(Tf);
    S w = alpha0[idx] * avgI.dot(f);
    for (const auto& [k, v] : shift1D(haar1D<S>(I, N), E, true, N).terms) out.B[k] += w * v;
  }
  return out;
}

template <class S>
S cCoefficient(const DyadicInterval& I0, const DyadicInterval& Ihat, int N) {
  // 1_{I0} = |I0| 1~_{I0}
  S len = ScalarTraits<S>::fraction(1, 1L << I0.level);
  auto ind = average1D<S>(I0, N).scaled(len);
  return average1D<S>(Ihat, N).dot(shift1D(ind, Parity::Even, true, N).dense(N));
}

inline Part partFromName(const std::string& name) {
  for (Part p : kAllParts)
    if (name == partName(p)) return p;
  throw Error("unknown part name: " + name);
}

}  // namespace dyadlab
