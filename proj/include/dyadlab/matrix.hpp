#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <vector>

#include <omp.h>

#include "dyadlab/haar.hpp"
#include "dyadlab/scalar.hpp"

namespace dyadlab {

template <class S>
struct Triplet {
  int row;
  int col;
  S value;
};

// Compressed-row matrix on the full product basis (or any finite index set).
template <class S>
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), rowPtr_(rows + 1, 0) {}

  static SparseMatrix fromTriplets(int rows, int cols, std::vector<Triplet<S>> t) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m(rows, cols);
    std::size_t k = 0;
    for (int r = 0; r < rows; ++r) {
      while (k < t.size() && t[k].row == r) {
        int c = t[k].col;
        if (c < 0 || c >= cols) throw Error("triplet column out of range");
        S acc = t[k].value;
        ++k;
        while (k < t.size() && t[k].row == r && t[k].col == c) acc += t[k++].value;
        if (!dyadlab::isZero(acc)) {
          m.colIdx_.push_back(c);
          m.vals_.push_back(std::move(acc));
        }
      }
      m.rowPtr_[r + 1] = static_cast<int>(m.colIdx_.size());
    }
    if (k != t.size()) throw Error("triplet row out of range");
    return m;
  }

  static SparseMatrix identity(int n) {
    std::vector<Triplet<S>> t;
    for (int i = 0; i < n; ++i) t.push_back({i, i, S(1)});
    return fromTriplets(n, n, std::move(t));
  }

  static SparseMatrix fromRows(int rows, int cols, std::vector<std::vector<std::pair<int, S>>> perRow) {
    SparseMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (auto& [c, v] : perRow[r]) {
        m.colIdx_.push_back(c);
        m.vals_.push_back(std::move(v));
      }
      m.rowPtr_[r + 1] = static_cast<int>(m.colIdx_.size());
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nonZeros() const { return vals_.size(); }
  bool isZero() const { return vals_.empty(); }
  int rowBegin(int r) const { return rowPtr_[r]; }
  int rowEnd(int r) const { return rowPtr_[r + 1]; }
  int colAt(int k) const { return colIdx_[k]; }
  const S& valueAt(int k) const { return vals_[k]; }

  S at(int r, int c) const {
    auto b = colIdx_.begin() + rowPtr_[r], e = colIdx_.begin() + rowPtr_[r + 1];
    auto it = std::lower_bound(b, e, c);
    if (it != e && *it == c) return vals_[it - colIdx_.begin()];
    return S(0);
  }

  std::vector<Triplet<S>> triplets() const {
    std::vector<Triplet<S>> t;
    t.reserve(vals_.size());
    for (int r = 0; r < rows_; ++r)
      for (int k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) t.push_back({r, colIdx_[k], vals_[k]});
    return t;
  }

  SparseMatrix transpose() const {
    auto t = triplets();
    for (auto& x : t) std::swap(x.row, x.col);
    return fromTriplets(cols_, rows_, std::move(t));
  }

  SparseMatrix scaled(const S& c) const {
    auto t = triplets();
    for (auto& x : t) x.value *= c;
    return fromTriplets(rows_, cols_, std::move(t));
  }

  friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) { return combine(a, b, S(1)); }
  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) { return combine(a, b, S(-1)); }
  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) { return (a - b).isZero(); }

  template <class T>
  SparseMatrix<T> convert() const {
    std::vector<Triplet<T>> t;
    for (int r = 0; r < rows_; ++r)
      for (int k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) {
        if constexpr (std::is_same_v<T, S>)
          t.push_back({r, colIdx_[k], vals_[k]});
        else
          t.push_back({r, colIdx_[k], static_cast<T>(toDouble(vals_[k]))});
      }
    return SparseMatrix<T>::fromTriplets(rows_, cols_, std::move(t));
  }

  std::vector<double> denseDouble() const {
    std::vector<double> d(static_cast<std::size_t>(rows_) * cols_, 0.0);
    for (int r = 0; r < rows_; ++r)
      for (int k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k)
        d[static_cast<std::size_t>(r) * cols_ + colIdx_[k]] = toDouble(vals_[k]);
    return d;
  }

 private:
  static SparseMatrix combine(const SparseMatrix& a, const SparseMatrix& b, const S& sb) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("matrix shape mismatch");
    SparseMatrix m(a.rows_, a.cols_);
    for (int r = 0; r < a.rows_; ++r) {
      int i = a.rowPtr_[r], ie = a.rowPtr_[r + 1], j = b.rowPtr_[r], je = b.rowPtr_[r + 1];
      while (i < ie || j < je) {
        int ca = i < ie ? a.colIdx_[i] : a.cols_;
        int cb = j < je ? b.colIdx_[j] : b.cols_;
        S v;
        int c;
        if (ca == cb) {
          c = ca;
          v = a.vals_[i++] + sb * b.vals_[j++];
        } else if (ca < cb) {
          c = ca;
          v = a.vals_[i++];
        } else {
          c = cb;
          v = sb * b.vals_[j++];
        }
        if (!dyadlab::isZero(v)) {
          m.colIdx_.push_back(c);
          m.vals_.push_back(std::move(v));
        }
      }
      m.rowPtr_[r + 1] = static_cast<int>(m.colIdx_.size());
    }
    return m;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> rowPtr_{0};
  std::vector<int> colIdx_;
  std::vector<S> vals_;
};

template <class S>
using LinearOperatorMatrix = SparseMatrix<S>;

namespace detail {
template <class S>
std::vector<std::pair<int, S>> productRow(const SparseMatrix<S>& A, const SparseMatrix<S>& B, int r, std::vector<S>& acc,
                                          std::vector<char>& touched, std::vector<int>& cols) {
  cols.clear();
  for (int k = A.rowBegin(r); k < A.rowEnd(r); ++k) {
    int mid = A.colAt(k);
    const S& av = A.valueAt(k);
    for (int q = B.rowBegin(mid); q < B.rowEnd(mid); ++q) {
      int c = B.colAt(q);
      if (!touched[c]) {
        touched[c] = 1;
        acc[c] = av * B.valueAt(q);
        cols.push_back(c);
      } else {
        acc[c] += av * B.valueAt(q);
      }
    }
  }
  std::sort(cols.begin(), cols.end());
  std::vector<std::pair<int, S>> row;
  for (int c : cols) {
    if (!isZero(acc[c])) row.emplace_back(c, acc[c]);
    touched[c] = 0;
  }
  return row;
}
}  // namespace detail

// Reference product, one row after another.
template <class S>
SparseMatrix<S> multiplySerial(const SparseMatrix<S>& A, const SparseMatrix<S>& B) {
  if (A.cols() != B.rows()) throw Error("matrix shape mismatch in product");
  std::vector<std::vector<std::pair<int, S>>> rows(A.rows());
  std::vector<S> acc(B.cols());
  std::vector<char> touched(B.cols(), 0);
  std::vector<int> cols;
  for (int r = 0; r < A.rows(); ++r) rows[r] = detail::productRow(A, B, r, acc, touched, cols);
  return SparseMatrix<S>::fromRows(A.rows(), B.cols(), std::move(rows));
}

template <class S>
SparseMatrix<S> multiply(const SparseMatrix<S>& A, const SparseMatrix<S>& B) {
  if (A.cols() != B.rows()) throw Error("matrix shape mismatch in product");
  std::vector<std::vector<std::pair<int, S>>> rows(A.rows());
#pragma omp parallel
  {
    std::vector<S> acc(B.cols());
    std::vector<char> touched(B.cols(), 0);
    std::vector<int> cols;
#pragma omp for schedule(dynamic, 8)
    for (int r = 0; r < A.rows(); ++r) rows[r] = detail::productRow(A, B, r, acc, touched, cols);
  }
  return SparseMatrix<S>::fromRows(A.rows(), B.cols(), std::move(rows));
}

template <class S>
SparseMatrix<S> operator*(const SparseMatrix<S>& A, const SparseMatrix<S>& B) {
  return multiply(A, B);
}

template <class S>
std::vector<S> applySerial(const SparseMatrix<S>& A, const std::vector<S>& x) {
  if (static_cast<int>(x.size()) != A.cols()) throw Error("vector length mismatch");
  std::vector<S> y(A.rows(), S(0));
  for (int r = 0; r < A.rows(); ++r)
    for (int k = A.rowBegin(r); k < A.rowEnd(r); ++k) y[r] += A.valueAt(k) * x[A.colAt(k)];
  return y;
}

template <class S>
std::vector<S> apply(const SparseMatrix<S>& A, const std::vector<S>& x) {
  if (static_cast<int>(x.size()) != A.cols()) throw Error("vector length mismatch");
  std::vector<S> y(A.rows(), S(0));
#pragma omp parallel for schedule(static) if (A.nonZeros() > 20000)
  for (int r = 0; r < A.rows(); ++r) {
    S acc(0);
    for (int k = A.rowBegin(r); k < A.rowEnd(r); ++k) acc += A.valueAt(k) * x[A.colAt(k)];
    y[r] = acc;
  }
  return y;
}

template <class S>
HaarExpansion<S> apply(const SparseMatrix<S>& A, const HaarExpansion<S>& f) {
  return HaarExpansion<S>(f.N, apply(A, f.coeffs));
}

template <class S>
SparseMatrix<S> kron(const SparseMatrix<S>& A, const SparseMatrix<S>& B) {
  std::vector<Triplet<S>> t;
  for (const auto& a : A.triplets())
    for (const auto& b : B.triplets())
      t.push_back({a.row * B.rows() + b.row, a.col * B.cols() + b.col, a.value * b.value});
  return SparseMatrix<S>::fromTriplets(A.rows() * B.rows(), A.cols() * B.cols(), std::move(t));
}

// Column k of the matrix is the image of the k-th basis element.
template <class S, class F>
SparseMatrix<S> matrixFromColumns(int dim, F&& column) {
  std::vector<Triplet<S>> t;
  for (int k = 0; k < dim; ++k) {
    std::vector<S> col = column(k);
    for (int r = 0; r < dim; ++r)
      if (!isZero(col[r])) t.push_back({r, k, col[r]});
  }
  return SparseMatrix<S>::fromTriplets(dim, dim, std::move(t));
}

// Coordinate-list export.  Rows and columns index the full basis as a*2^N + c, where the
// one-variable index a is 0 for the constant and 2^l + k for h_{l:k}.
template <class S>
void exportCoordinateList(const SparseMatrix<S>& A, int N, std::ostream& out) {
  out << "# dyadlab operator, depth " << N << ", dimension " << A.rows() << "\n";
  out << "# basis index a*2^N+c for e_a(x)e_c(y); one-variable index 0 = constant, 2^l+k = h_{l:k}\n";
  if constexpr (ScalarTraits<S>::exact) {
    out << "# row col num den [num_sqrt2 den_sqrt2]  (entry = num/den + num_sqrt2/den_sqrt2*sqrt(2))\n";
    for (const auto& t : A.triplets()) {
      out << t.row << ' ' << t.col << ' ' << t.value.rational().get_num() << ' ' << t.value.rational().get_den();
      if (!t.value.isRational()) out << ' ' << t.value.radical().get_num() << ' ' << t.value.radical().get_den();
      out << '\n';
    }
  } else {
    out << "# row col value\n";
    out.precision(17);
    for (const auto& t : A.triplets()) out << t.row << ' ' << t.col << ' ' << t.value << '\n';
  }
}

}  // namespace dyadlab
