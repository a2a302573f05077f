#pragma once

#include <cstdint>
#include <vector>

namespace dyadlab {

// psi = 1 on the cells of [0,2]^2 whose centre satisfies 1 - eps <= xi1 + xi2 < 1 + eps.
// Cell (i,j) has centre ((i+1/2)h, (j+1/2)h), so membership only depends on the
// diagonal d = i + j: psi = 1 iff d0 <= d <= d1.
struct StripIndicator {
  double eps = 0;
  int M = 0;         // h = 2^-M
  double h = 0;
  std::int64_t K = 0;  // cells per unit length
  std::int64_t d0 = 0, d1 = 0;

  std::int64_t side() const { return 2 * K; }
  bool at(std::int64_t i, std::int64_t j) const { return i >= 0 && j >= 0 && i + j >= d0 && i + j <= d1; }
  std::int64_t cellCount() const;
  double area() const { return static_cast<double>(cellCount()) * h * h; }
  std::vector<std::uint8_t> bitmap() const;  // row-major over side() x side(); small grids only
};

StripIndicator buildStrip(double eps, int M);

// Correlation counts on the shift lattice: count(a,b) = #{cells c : psi(c) psi(c - (a,b)) = 1}.
// Only shifts with |a + b| <= d1 - d0 can be nonzero, so storage is indexed by (a, a + b).
struct Autocorrelation {
  double h = 0;
  std::int64_t A = 0;  // |a| <= A
  std::int64_t W = 0;  // |a + b| <= W
  std::vector<std::int64_t> counts;

  std::int64_t count(std::int64_t a, std::int64_t b) const {
    const std::int64_t s = a + b;
    if (a < -A || a > A || s < -W || s > W) return 0;
    return counts[static_cast<std::size_t>((a + A) * (2 * W + 1) + (s + W))];
  }
  double value(std::int64_t a, std::int64_t b) const { return static_cast<double>(count(a, b)) * h * h; }
};

// Parallel over the first shift coordinate; O(band width) per shift.
Autocorrelation autocorrelate(const StripIndicator& psi);
Autocorrelation autocorrelateSerial(const StripIndicator& psi);
// Reference: histogram of pairwise differences of all strip cells (coarse grids only).
Autocorrelation autocorrelateBruteForce(const StripIndicator& psi);

struct QuadrantNorms {
  double pp = 0;     // || P_{++} |alpha|^2 ||_2, open quadrant t1, t2 > 0
  double pm = 0;     // || P_{+-} |alpha|^2 ||_2, t1 > 0, t2 < 0
  double total = 0;  // || |alpha|^2 ||_2 = ||alpha||_4^2
};

QuadrantNorms quadrantNorms(const Autocorrelation& acf);

// max (a + b) h over shifts in the open positive quadrant with a nonzero correlation
double positiveSupportRadius(const Autocorrelation& acf);

struct SlopeFit {
  double slope = 0;
  double r2 = 0;
};

SlopeFit slopeFit(const std::vector<double>& eps, const std::vector<double>& values);

struct ContinuumRow {
  double eps = 0, h = 0, area = 0;
  double n2 = 0;    // ||alpha||_2
  double n4sq = 0;  // ||alpha||_4^2
  double npp = 0, npm = 0;
  double radius = 0;
};

// epsilon = 2^-e for e in [eMin, eMax], h = eps / hRatio (hRatio a power of two >= 8)
std::vector<ContinuumRow> continuumTable(int eMin, int eMax, int hRatio);

struct ContinuumSlopes {
  SlopeFit n2, npp, npm, n4sq, n4;
  SlopeFit normalizedNpp, normalizedN4sq;
  double normalizedN2Min = 0, normalizedN2Max = 0;
  bool normalizedRatioDecreasing = false;
};

ContinuumSlopes continuumSlopes(const std::vector<ContinuumRow>& rows);

}  // namespace dyadlab
