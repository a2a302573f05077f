#include "dyadlab/open_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <omp.h>

namespace dyadlab {

DyadicOpenSet::DyadicOpenSet(int N) : N_(N), cells_(static_cast<std::size_t>(1) << (2 * N), 0) {
  if (N < 0 || N > 12) throw Error("open set depth out of range");
  rebuild();
}

DyadicOpenSet::DyadicOpenSet(int N, std::vector<std::uint8_t> cells) : N_(N), cells_(std::move(cells)) {
  if (cells_.size() != static_cast<std::size_t>(1) << (2 * N)) throw Error("open set bitmap has the wrong size");
  for (auto& c : cells_) c = c ? 1 : 0;
  rebuild();
}

DyadicOpenSet DyadicOpenSet::full(int N) { return DyadicOpenSet(N, std::vector<std::uint8_t>(static_cast<std::size_t>(1) << (2 * N), 1)); }

DyadicOpenSet DyadicOpenSet::fromRectangles(int N, const std::vector<DyadicRectangle>& rects) {
  DyadicOpenSet U(N);
  for (const auto& R : rects) {
    R.checkDepth(N);
    for (auto i = firstCell(R.x, N); i < firstCell(R.x, N) + cellCount(R.x, N); ++i)
      for (auto j = firstCell(R.y, N); j < firstCell(R.y, N) + cellCount(R.y, N); ++j)
        U.cells_[static_cast<std::size_t>(i) * U.side() + j] = 1;
  }
  U.rebuild();
  return U;
}

void DyadicOpenSet::add(const DyadicRectangle& R) {
  R.checkDepth(N_);
  for (auto i = firstCell(R.x, N_); i < firstCell(R.x, N_) + cellCount(R.x, N_); ++i)
    for (auto j = firstCell(R.y, N_); j < firstCell(R.y, N_) + cellCount(R.y, N_); ++j)
      cells_[static_cast<std::size_t>(i) * side() + j] = 1;
  rebuild();
}

void DyadicOpenSet::addCell(int i, int j) {
  cells_[static_cast<std::size_t>(i) * side() + j] = 1;
  rebuild();
}

void DyadicOpenSet::rebuild() {
  const int n = side();
  prefix_.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      prefix_[(i + 1) * (n + 1) + j + 1] = cells_[static_cast<std::size_t>(i) * n + j] + prefix_[i * (n + 1) + j + 1] +
                                           prefix_[(i + 1) * (n + 1) + j] - prefix_[i * (n + 1) + j];
  count_ = prefix_.back();
}

double DyadicOpenSet::measure() const { return std::ldexp(static_cast<double>(count_), -2 * N_); }

std::int64_t DyadicOpenSet::countIn(const DyadicRectangle& R) const {
  R.checkDepth(N_);
  const int n = side();
  auto i0 = firstCell(R.x, N_), i1 = i0 + cellCount(R.x, N_);
  auto j0 = firstCell(R.y, N_), j1 = j0 + cellCount(R.y, N_);
  auto P = [&](std::int64_t i, std::int64_t j) { return prefix_[i * (n + 1) + j]; };
  return P(i1, j1) - P(i0, j1) - P(i1, j0) + P(i0, j0);
}

bool DyadicOpenSet::containsRect(const DyadicRectangle& R) const {
  return countIn(R) == cellCount(R.x, N_) * cellCount(R.y, N_);
}

bool DyadicOpenSet::subsetOf(const DyadicOpenSet& other) const {
  if (other.N_ != N_) throw Error("resolution mismatch");
  for (std::size_t k = 0; k < cells_.size(); ++k)
    if (cells_[k] && !other.cells_[k]) return false;
  return true;
}

std::vector<DyadicRectangle> DyadicOpenSet::rectanglesInside(int maxLevel) const {
  std::vector<DyadicRectangle> out;
  for (const auto& I : intervalsUpTo(maxLevel))
    for (const auto& J : intervalsUpTo(maxLevel)) {
      DyadicRectangle R{I, J};
      if (containsRect(R)) out.push_back(R);
    }
  return out;
}

DyadicOpenSet DyadicOpenSet::unite(const DyadicOpenSet& other) const {
  if (other.N_ != N_) throw Error("resolution mismatch");
  auto c = cells_;
  for (std::size_t k = 0; k < c.size(); ++k) c[k] |= other.cells_[k];
  return DyadicOpenSet(N_, std::move(c));
}

std::vector<std::int64_t> DyadicOpenSet::runLengths() const {
  std::vector<std::int64_t> runs;
  std::uint8_t current = 0;
  std::int64_t len = 0;
  for (auto c : cells_) {
    if (c == current) {
      ++len;
    } else {
      runs.push_back(len);
      current = c;
      len = 1;
    }
  }
  runs.push_back(len);
  return runs;
}

DyadicOpenSet DyadicOpenSet::fromRunLengths(int N, const std::vector<std::int64_t>& runs) {
  std::vector<std::uint8_t> cells;
  std::uint8_t v = 0;
  for (auto r : runs) {
    if (r < 0) throw Error("negative run length");
    cells.insert(cells.end(), static_cast<std::size_t>(r), v);
    v ^= 1;
  }
  return DyadicOpenSet(N, std::move(cells));
}

std::string DyadicOpenSet::str() const {
  std::ostringstream os;
  for (int j = side() - 1; j >= 0; --j) {
    for (int i = 0; i < side(); ++i) os << (cell(i, j) ? '#' : '.');
    os << '\n';
  }
  return os.str();
}

std::vector<DyadicRectangle> edgeRectangles(const DyadicOpenSet& U0, int m) {
  if (m < 1) throw Error("edgeRectangles needs m >= 1");
  std::vector<DyadicRectangle> out;
  const int N = U0.depth();
  for (const auto& R : U0.rectanglesInside(N)) {
    if (std::min(R.x.level, R.y.level) < m - 1) continue;
    if (!U0.containsRect(ancestorAt(R, m - 1))) continue;
    if (std::min(R.x.level, R.y.level) < m || !U0.containsRect(ancestorAt(R, m))) out.push_back(R);
  }
  return out;
}

EnlargeResult enlarge(const DyadicOpenSet& U0, long lambdaNum, long lambdaDen) {
  if (U0.empty()) throw Error("enlarge needs a nonempty set");
  if (lambdaNum <= 0 || lambdaDen <= 0) throw Error("lambda must be positive");
  const int N = U0.depth(), n = U0.side();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(n) * n, 0);
  // every rectangle with |R cap U0| / |R| >= lambda marks all of its cells
  for (int lx = 0; lx <= N; ++lx)
    for (int ly = 0; ly <= N; ++ly) {
      const std::int64_t cells = std::int64_t{1} << (2 * N - lx - ly);
      for (std::int64_t kx = 0; kx < (std::int64_t{1} << lx); ++kx)
        for (std::int64_t ky = 0; ky < (std::int64_t{1} << ly); ++ky) {
          DyadicRectangle R{{lx, kx}, {ly, ky}};
          if (U0.countIn(R) * lambdaDen < lambdaNum * cells) continue;
          for (auto i = firstCell(R.x, N); i < firstCell(R.x, N) + cellCount(R.x, N); ++i)
            for (auto j = firstCell(R.y, N); j < firstCell(R.y, N) + cellCount(R.y, N); ++j)
              out[static_cast<std::size_t>(i) * n + j] = 1;
        }
    }
  EnlargeResult r{DyadicOpenSet(N, std::move(out)), 0.0};
  r.ratio = static_cast<double>(r.U.count()) / static_cast<double>(U0.count());
  return r;
}

GridFunction2D<double> strongMaximal(const GridFunction2D<double>& f) {
  const int N = f.N, n = f.side();
  std::vector<double> P(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      P[(i + 1) * (n + 1) + j + 1] = std::fabs(f.at(i, j)) + P[i * (n + 1) + j + 1] + P[(i + 1) * (n + 1) + j] - P[i * (n + 1) + j];
  GridFunction2D<double> out(N);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double best = 0.0;
      for (int lx = 0; lx <= N; ++lx) {
        const int wx = n >> lx, i0 = (i / wx) * wx;
        for (int ly = 0; ly <= N; ++ly) {
          const int wy = n >> ly, j0 = (j / wy) * wy;
          double s = P[(i0 + wx) * (n + 1) + j0 + wy] - P[i0 * (n + 1) + j0 + wy] - P[(i0 + wx) * (n + 1) + j0] + P[i0 * (n + 1) + j0];
          best = std::max(best, s / (static_cast<double>(wx) * wy));
        }
      }
      out.at(i, j) = best;
    }
  return out;
}

GridFunction2D<double> strongMaximalSerial(const GridFunction2D<double>& f) {
  const int N = f.N, n = f.side();
  GridFunction2D<double> out(N);
  for (int lx = 0; lx <= N; ++lx)
    for (int ly = 0; ly <= N; ++ly) {
      const int wx = n >> lx, wy = n >> ly;
      for (int i0 = 0; i0 < n; i0 += wx)
        for (int j0 = 0; j0 < n; j0 += wy) {
          double s = 0;
          for (int i = i0; i < i0 + wx; ++i)
            for (int j = j0; j < j0 + wy; ++j) s += std::fabs(f.at(i, j));
          s /= static_cast<double>(wx) * wy;
          for (int i = i0; i < i0 + wx; ++i)
            for (int j = j0; j < j0 + wy; ++j) out.at(i, j) = std::max(out.at(i, j), s);
        }
    }
  return out;
}

}  // namespace dyadlab
