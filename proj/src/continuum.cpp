#include "dyadlab/continuum.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "dyadlab/dyadic.hpp"

namespace dyadlab {

std::int64_t StripIndicator::cellCount() const {
  std::int64_t c = 0;
  // each diagonal d < 2K carries d + 1 cells of the grid
  for (std::int64_t d = d0; d <= d1; ++d) c += d + 1;
  return c;
}

std::vector<std::uint8_t> StripIndicator::bitmap() const {
  if (side() > 4096) throw Error("strip bitmap too large to materialize");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(side() * side()), 0);
  for (std::int64_t i = 0; i < side(); ++i)
    for (std::int64_t j = 0; j < side(); ++j) out[static_cast<std::size_t>(i * side() + j)] = at(i, j) ? 1 : 0;
  return out;
}

StripIndicator buildStrip(double eps, int M) {
  if (!(eps > 0) || eps > 0.25) throw Error("strip width must lie in (0, 1/4]");
  if (M < 1 || M > 24) throw Error("grid exponent out of range");
  StripIndicator s;
  s.eps = eps;
  s.M = M;
  s.K = std::int64_t{1} << M;
  s.h = std::ldexp(1.0, -M);
  if (s.h > eps / 8) throw Error("grid too coarse: need h <= eps/8");
  const double K = static_cast<double>(s.K);
  s.d0 = static_cast<std::int64_t>(std::ceil((1 - eps) * K)) - 1;
  s.d1 = static_cast<std::int64_t>(std::ceil((1 + eps) * K)) - 2;
  return s;
}

namespace {

// pairs (c, c - (a,b)) in the strip: cells (i, d - i) with d and d - s both in [d0, d1]
std::int64_t pairCount(const StripIndicator& p, std::int64_t a, std::int64_t s) {
  const std::int64_t b = s - a;
  const std::int64_t lo = std::max(p.d0, p.d0 + s), hi = std::min(p.d1, p.d1 + s);
  const std::int64_t ia = std::max<std::int64_t>(0, a), jb = std::max<std::int64_t>(0, b);
  std::int64_t c = 0;
  for (std::int64_t d = lo; d <= hi; ++d) c += std::max<std::int64_t>(0, d - jb - ia + 1);
  return c;
}

Autocorrelation makeShape(const StripIndicator& p) {
  Autocorrelation acf;
  acf.h = p.h;
  acf.A = p.d1;
  acf.W = p.d1 - p.d0;
  acf.counts.assign(static_cast<std::size_t>((2 * acf.A + 1) * (2 * acf.W + 1)), 0);
  return acf;
}

Autocorrelation autocorrelateImpl(const StripIndicator& p, bool parallel) {
  Autocorrelation acf = makeShape(p);
  const std::int64_t A = acf.A, W = acf.W;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t a = -A; a <= A; ++a)
    for (std::int64_t s = -W; s <= W; ++s) acf.counts[static_cast<std::size_t>((a + A) * (2 * W + 1) + (s + W))] = pairCount(p, a, s);
  return acf;
}

}  // namespace

Autocorrelation autocorrelate(const StripIndicator& psi) { return autocorrelateImpl(psi, true); }
Autocorrelation autocorrelateSerial(const StripIndicator& psi) { return autocorrelateImpl(psi, false); }

Autocorrelation autocorrelateBruteForce(const StripIndicator& psi) {
  if (psi.cellCount() > 20000) throw Error("brute-force autocorrelation is for coarse grids");
  std::vector<std::pair<std::int64_t, std::int64_t>> cells;
  for (std::int64_t i = 0; i < psi.side(); ++i)
    for (std::int64_t j = 0; j < psi.side(); ++j)
      if (psi.at(i, j)) cells.emplace_back(i, j);
  Autocorrelation acf = makeShape(psi);
  for (const auto& [i1, j1] : cells)
    for (const auto& [i2, j2] : cells) {
      const std::int64_t a = i1 - i2, s = a + (j1 - j2);
      if (a < -acf.A || a > acf.A || s < -acf.W || s > acf.W) throw Error("pair difference outside the expected support");
      ++acf.counts[static_cast<std::size_t>((a + acf.A) * (2 * acf.W + 1) + (s + acf.W))];
    }
  return acf;
}

QuadrantNorms quadrantNorms(const Autocorrelation& acf) {
  double pp = 0, pm = 0, total = 0;
  const double h2 = acf.h * acf.h;
  for (std::int64_t a = -acf.A; a <= acf.A; ++a)
    for (std::int64_t s = -acf.W; s <= acf.W; ++s) {
      const double v = static_cast<double>(acf.counts[static_cast<std::size_t>((a + acf.A) * (2 * acf.W + 1) + (s + acf.W))]) * h2;
      if (v == 0) continue;
      const double w = v * v * h2;
      const std::int64_t b = s - a;
      total += w;
      if (a > 0 && b > 0) pp += w;
      if (a > 0 && b < 0) pm += w;
    }
  return {std::sqrt(pp), std::sqrt(pm), std::sqrt(total)};
}

double positiveSupportRadius(const Autocorrelation& acf) {
  std::int64_t best = 0;
  for (std::int64_t a = 1; a <= acf.A; ++a)
    for (std::int64_t s = a + 1; s <= acf.W; ++s)
      if (acf.count(a, s - a) != 0) best = std::max(best, s);
  return static_cast<double>(best) * acf.h;
}

SlopeFit slopeFit(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size() || eps.size() < 2) throw Error("slopeFit needs matching samples");
  const double n = static_cast<double>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0) || !(values[k] > 0)) throw Error("slopeFit needs positive values");
    const double x = std::log(eps[k]), y = std::log(values[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  SlopeFit f;
  f.slope = cxy / vx;
  f.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

std::vector<ContinuumRow> continuumTable(int eMin, int eMax, int hRatio) {
  if (eMin > eMax || eMin < 2) throw Error("epsilon grid must satisfy 2 <= a <= b");
  if (hRatio < 8 || (hRatio & (hRatio - 1)) != 0) throw Error("h ratio must be a power of two >= 8");
  const int r = static_cast<int>(std::lround(std::log2(hRatio)));
  std::vector<ContinuumRow> rows;
  for (int e = eMin; e <= eMax; ++e) {
    const double eps = std::ldexp(1.0, -e);
    auto psi = buildStrip(eps, e + r);
    auto acf = autocorrelate(psi);
    auto q = quadrantNorms(acf);
    ContinuumRow row;
    row.eps = eps;
    row.h = psi.h;
    row.area = psi.area();
    row.n2 = std::sqrt(row.area);
    row.n4sq = q.total;
    row.npp = q.pp;
    row.npm = q.pm;
    row.radius = positiveSupportRadius(acf);
    rows.push_back(row);
  }
  return rows;
}

ContinuumSlopes continuumSlopes(const std::vector<ContinuumRow>& rows) {
  std::vector<double> e, n2, npp, npm, n4sq, n4, tnpp, tn4sq, tn2;
  for (const auto& r : rows) {
    e.push_back(r.eps);
    n2.push_back(r.n2);
    npp.push_back(r.npp);
    npm.push_back(r.npm);
    n4sq.push_back(r.n4sq);
    n4.push_back(std::sqrt(r.n4sq));
    // alpha~ = eps^{-1/2} alpha scales |alpha|^2 by 1/eps
    tn2.push_back(r.n2 / std::sqrt(r.eps));
    tnpp.push_back(r.npp / r.eps);
    tn4sq.push_back(r.n4sq / r.eps);
  }
  ContinuumSlopes s;
  s.n2 = slopeFit(e, n2);
  s.npp = slopeFit(e, npp);
  s.npm = slopeFit(e, npm);
  s.n4sq = slopeFit(e, n4sq);
  s.n4 = slopeFit(e, n4);
  s.normalizedNpp = slopeFit(e, tnpp);
  s.normalizedN4sq = slopeFit(e, tn4sq);
  s.normalizedN2Min = *std::min_element(tn2.begin(), tn2.end());
  s.normalizedN2Max = *std::max_element(tn2.begin(), tn2.end());
  // ratio ||P++|a~|^2|| / ||a~||_2^2 along decreasing eps (rows ordered by increasing e)
  s.normalizedRatioDecreasing = true;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (tnpp[k] / (tn2[k] * tn2[k]) >= tnpp[k - 1] / (tn2[k - 1] * tn2[k - 1])) s.normalizedRatioDecreasing = false;
  return s;
}

}  // namespace dyadlab
