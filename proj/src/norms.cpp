#include "dyadlab/norms.hpp"

#include <sstream>

namespace dyadlab {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

NormResult operatorNormDetailed(const LinearMap& A, const NormOptions& opt) {
  NormResult best;
  if (A.rows == 0 || A.cols == 0) return best;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  std::vector<double> x(A.cols), y, z;
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    for (auto& v : x) v = gauss(rng);
    double nx = norm2(x);
    for (auto& v : x) v /= nx;
    double rho = -1, change = 1;
    int it = 0;
    for (; it < opt.maxIterations; ++it) {
      A.apply(x, y);
      double ny = norm2(y);
      double next = ny * ny;
      if (next == 0.0) {
        rho = 0;
        change = 0;
        break;
      }
      A.applyT(y, z);
      double nz = norm2(z);
      for (std::size_t k = 0; k < x.size(); ++k) x[k] = z[k] / nz;
      change = rho < 0 ? 1.0 : std::fabs(next - rho) / next;
      rho = next;
      if (change <= opt.tol && it > 2) break;
    }
    if (it == opt.maxIterations) {
      std::ostringstream os;
      os << "power iteration did not converge after " << it << " iterations (relative residual " << change << ")";
      throw Error(os.str());
    }
    double value = std::sqrt(std::max(rho, 0.0));
    if (r == 0 || value > best.value) best = {value, it, change};
  }
  return best;
}

SequenceResolveResult sequenceResolve(const std::vector<double>& b, const std::vector<double>& d, double q) {
  if (!(q < 1.0)) throw Error("sequenceResolve needs q < 1");
  if (b.size() != d.size()) throw Error("sequenceResolve: length mismatch");
  SequenceResolveResult r;
  r.a.resize(b.size());
  double prev = 0;
  for (std::size_t n = 0; n < b.size(); ++n) {
    if (std::fabs(d[n]) > q) throw Error("sequenceResolve: |d_n| exceeds q");
    r.a[n] = b[n] + d[n] * prev;
    prev = r.a[n];
  }
  r.normA = norm2(r.a);
  r.normB = norm2(b);
  r.bound = r.normB / (1.0 - q);
  r.holds = r.normA <= r.bound * (1 + 1e-12);
  return r;
}

}  // namespace dyadlab
