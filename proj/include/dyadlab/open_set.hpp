#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/haar.hpp"

namespace dyadlab {

// Finite union of dyadic rectangles, stored as a bitmap of bottom-level cells (cell (i,j) at i*2^N + j).
class DyadicOpenSet {
 public:
  DyadicOpenSet() = default;
  explicit DyadicOpenSet(int N);
  DyadicOpenSet(int N, std::vector<std::uint8_t> cells);

  static DyadicOpenSet full(int N);
  static DyadicOpenSet fromRectangles(int N, const std::vector<DyadicRectangle>& rects);

  int depth() const { return N_; }
  int side() const { return 1 << N_; }
  bool cell(int i, int j) const { return cells_[static_cast<std::size_t>(i) * side() + j] != 0; }
  void add(const DyadicRectangle& R);
  void addCell(int i, int j);
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  std::int64_t count() const { return count_; }
  bool empty() const { return count_ == 0; }
  double measure() const;
  // number of set cells inside R
  std::int64_t countIn(const DyadicRectangle& R) const;
  bool containsRect(const DyadicRectangle& R) const;
  bool meets(const DyadicRectangle& R) const { return countIn(R) > 0; }
  bool subsetOf(const DyadicOpenSet& other) const;

  // U_0 notation: all R (levels <= maxLevel in each variable) with R inside the set
  std::vector<DyadicRectangle> rectanglesInside(int maxLevel) const;

  template <class S>
  GridFunction2D<S> indicator() const {
    GridFunction2D<S> g(N_);
    for (std::size_t k = 0; k < cells_.size(); ++k)
      if (cells_[k]) g.values[k] = S(1);
    return g;
  }

  DyadicOpenSet unite(const DyadicOpenSet& other) const;
  friend bool operator==(const DyadicOpenSet& a, const DyadicOpenSet& b) { return a.N_ == b.N_ && a.cells_ == b.cells_; }

  // run-length encoding of the cell bitmap, starting with a run of empty cells
  std::vector<std::int64_t> runLengths() const;
  static DyadicOpenSet fromRunLengths(int N, const std::vector<std::int64_t>& runs);
  std::string str() const;

 private:
  void rebuild();

  int N_ = 0;
  std::vector<std::uint8_t> cells_;
  std::vector<std::int64_t> prefix_;  // (side+1)^2 summed-area table
  std::int64_t count_ = 0;
};

// Edge_m(U0): R in U_0 with p_{m-1}(R) in U_0 and p_m(R) meeting the complement (or not existing).
std::vector<DyadicRectangle> edgeRectangles(const DyadicOpenSet& U0, int m);

struct EnlargeResult {
  DyadicOpenSet U;
  double ratio = 0;  // |U| / |U0|
};

// U = {M_s^d 1_{U0} >= lambda}, lambda = num/den, evaluated with integer counts.
EnlargeResult enlarge(const DyadicOpenSet& U0, long lambdaNum = 1, long lambdaDen = 16);

// Strong dyadic maximal function; the parallel kernel uses summed-area tables,
// the serial reference walks every rectangle and updates the cells it covers.
GridFunction2D<double> strongMaximal(const GridFunction2D<double>& f);
GridFunction2D<double> strongMaximalSerial(const GridFunction2D<double>& f);

}  // namespace dyadlab
