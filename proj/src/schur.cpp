#include "dyadlab/schur.hpp"

#include <cmath>

#include <omp.h>

namespace dyadlab {

namespace {

int node(const DyadicInterval& I) { return (1 << I.level) + static_cast<int>(I.position) - 1; }

SparseMatrix<double> ancestorMatrix(int depth, double c) {
  std::vector<Triplet<double>> t;
  for (const auto& J : intervalsUpTo(depth)) {
    DyadicInterval I = J;
    for (;;) {
      t.push_back({node(I), node(J), std::exp2(-c * (J.level - I.level))});
      if (I.level == 0) break;
      I = parent(I);
    }
  }
  return SparseMatrix<double>::fromTriplets(treeSize(depth), treeSize(depth), std::move(t));
}

// Y = X B^T for row-major X (n x n) and sparse B, i.e. Y[i,j] = sum_k X[i,k] B[j,k].
void rightMultiplyT(const SparseMatrix<double>& B, const std::vector<double>& X, std::vector<double>& Y, int n,
                    bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int p = B.rowBegin(j); p < B.rowEnd(j); ++p) s += B.valueAt(p) * X[static_cast<std::size_t>(i) * n + B.colAt(p)];
      Y[static_cast<std::size_t>(i) * n + j] = s;
    }
}

// Z = B Y
void leftMultiply(const SparseMatrix<double>& B, const std::vector<double>& Y, std::vector<double>& Z, int n, bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i) {
    double* zi = &Z[static_cast<std::size_t>(i) * n];
    for (int j = 0; j < n; ++j) zi[j] = 0;
    for (int p = B.rowBegin(i); p < B.rowEnd(i); ++p) {
      const double w = B.valueAt(p);
      const double* yk = &Y[static_cast<std::size_t>(B.colAt(p)) * n];
      for (int j = 0; j < n; ++j) zi[j] += w * yk[j];
    }
  }
}

std::vector<double> biTreeApplyImpl(const SparseMatrix<double>& L, const SparseMatrix<double>& Lt,
                                    const std::vector<double>& x, bool parallel) {
  const int n = L.rows();
  std::vector<double> Y(x.size()), A(x.size()), B(x.size());
  rightMultiplyT(L, x, Y, n, parallel);  // X L^T
  leftMultiply(L, Y, A, n, parallel);    // L X L^T
  rightMultiplyT(Lt, x, Y, n, parallel);
  leftMultiply(Lt, Y, B, n, parallel);  // L^T X L
  for (std::size_t k = 0; k < x.size(); ++k) A[k] += B[k] - x[k];
  return A;
}

}  // namespace

SparseMatrix<double> treeMatrix(int depth, double c) {
  if (depth < 0) throw Error("tree depth must be nonnegative");
  return ancestorMatrix(depth, c);
}

SparseMatrix<double> biTreeMatrixAssembled(int depth, double A) {
  auto L = treeMatrix(depth, A);
  auto I = SparseMatrix<double>::identity(L.rows() * L.rows());
  return kron(L, L) + kron(L.transpose(), L.transpose()) - I;
}

std::vector<double> biTreeApply(const SparseMatrix<double>& L, const std::vector<double>& x) {
  return biTreeApplyImpl(L, L.transpose(), x, true);
}

std::vector<double> biTreeApplySerial(const SparseMatrix<double>& L, const std::vector<double>& x) {
  return biTreeApplyImpl(L, L.transpose(), x, false);
}

SchurOperator schurMatrix(SchurKind kind, int depth, double exponent) {
  SchurOperator op;
  op.kind = kind;
  op.depth = depth;
  op.exponent = exponent;
  if (exponent <= 1) op.warning = "exponent <= 1: row sums grow without bound as the depth increases";
  auto L = std::make_shared<SparseMatrix<double>>(treeMatrix(depth, exponent));
  if (kind == SchurKind::Tree) {
    op.map = asLinearMap(*L);
    return op;
  }
  // the bi-tree operator is symmetric, so apply and applyT coincide
  auto Lt = std::make_shared<SparseMatrix<double>>(L->transpose());
  const int n = L->rows();
  op.map.rows = op.map.cols = n * n;
  op.map.apply = [L, Lt](const std::vector<double>& x, std::vector<double>& y) { y = biTreeApplyImpl(*L, *Lt, x, true); };
  op.map.applyT = op.map.apply;
  return op;
}

double schurNorm(SchurKind kind, int depth, double exponent, const NormOptions& opt) {
  return operatorNorm(schurMatrix(kind, depth, exponent).map, opt);
}

}  // namespace dyadlab
