#pragma once

#include <string>
#include <vector>

#include "dyadlab/matrix.hpp"
#include "dyadlab/norms.hpp"

namespace dyadlab {

enum class SchurKind { Tree, BiTree };

// Tree nodes are the dyadic intervals of levels 0..depth; node (l,k) sits at 2^l + k - 1.
inline int treeSize(int depth) { return (2 << depth) - 1; }

// m(I,J) = (|J|/|I|)^c for J inside I (diagonal included), rows indexed by I.
SparseMatrix<double> treeMatrix(int depth, double c);

// m(R,R') = (|R|/|R'|)^A if R inside R', (|R'|/|R|)^A if R' inside R; this is
// L (x) L + L^T (x) L^T - I with L the tree matrix above.
SparseMatrix<double> biTreeMatrixAssembled(int depth, double A);

struct SchurOperator {
  SchurKind kind = SchurKind::Tree;
  int depth = 0;
  double exponent = 2;
  LinearMap map;
  std::string warning;  // set when the exponent is <= 1
};

// The bi-tree operator is applied implicitly through Kronecker products.
SchurOperator schurMatrix(SchurKind kind, int depth, double exponent);

// y = (L (x) L + L^T (x) L^T - I) x on the bi-tree, x indexed by node(R.x) * n + node(R.y).
std::vector<double> biTreeApply(const SparseMatrix<double>& L, const std::vector<double>& x);
std::vector<double> biTreeApplySerial(const SparseMatrix<double>& L, const std::vector<double>& x);

double schurNorm(SchurKind kind, int depth, double exponent, const NormOptions& opt = {});

}  // namespace dyadlab
