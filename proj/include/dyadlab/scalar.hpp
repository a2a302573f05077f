#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace dyadlab {

// Exact element a + b*sqrt(2) of Q(sqrt 2) with arbitrary-precision rational parts.
class Surd {
 public:
  Surd() = default;
  Surd(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  Surd(mpq_class a, mpq_class b = 0) : a_(std::move(a)), b_(std::move(b)) {}

  static Surd sqrt2() { return Surd(0, 1); }
  static Surd fraction(long num, long den) {
    mpq_class q(num, den);
    q.canonicalize();
    return Surd(q);
  }

  const mpq_class& rational() const { return a_; }
  const mpq_class& radical() const { return b_; }
  bool isRational() const { return sgn(b_) == 0; }
  bool isZero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  int sign() const;
  double toDouble() const { return a_.get_d() + b_.get_d() * M_SQRT2; }
  std::string str() const;

  Surd operator-() const { return Surd(-a_, -b_); }
  Surd& operator+=(const Surd& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  Surd& operator-=(const Surd& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  Surd& operator*=(const Surd& o);
  Surd& operator/=(const Surd& o);

  friend Surd operator+(Surd l, const Surd& r) { return l += r; }
  friend Surd operator-(Surd l, const Surd& r) { return l -= r; }
  friend Surd operator*(Surd l, const Surd& r) { return l *= r; }
  friend Surd operator/(Surd l, const Surd& r) { return l /= r; }
  friend bool operator==(const Surd& l, const Surd& r) { return l.a_ == r.a_ && l.b_ == r.b_; }
  friend bool operator!=(const Surd& l, const Surd& r) { return !(l == r); }
  friend bool operator<(const Surd& l, const Surd& r) { return (l - r).sign() < 0; }
  friend bool operator>(const Surd& l, const Surd& r) { return r < l; }
  friend bool operator<=(const Surd& l, const Surd& r) { return !(r < l); }
  friend bool operator>=(const Surd& l, const Surd& r) { return !(l < r); }

 private:
  mpq_class a_{0};
  mpq_class b_{0};
};

Surd abs(const Surd& s);

// Uniform scalar vocabulary for the two backends (Surd exact, double float).
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static double fraction(long num, long den) { return static_cast<double>(num) / static_cast<double>(den); }
  // (sqrt 2)^e
  static double sqrt2Pow(int e) {
    int q = e >= 0 ? e / 2 : -((-e + 1) / 2);
    return std::ldexp((e - 2 * q) ? M_SQRT2 : 1.0, q);
  }
  static bool isZero(double v) { return v == 0.0; }
  static double toDouble(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
};

template <>
struct ScalarTraits<Surd> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";
  static Surd fraction(long num, long den) { return Surd::fraction(num, den); }
  static Surd sqrt2Pow(int e) {
    int q = e >= 0 ? e / 2 : -((-e + 1) / 2);
    mpq_class p(1);
    if (q >= 0)
      mpq_mul_2exp(p.get_mpq_t(), p.get_mpq_t(), static_cast<unsigned long>(q));
    else
      mpq_div_2exp(p.get_mpq_t(), p.get_mpq_t(), static_cast<unsigned long>(-q));
    return (e - 2 * q) ? Surd(0, p) : Surd(p);
  }
  static bool isZero(const Surd& v) { return v.isZero(); }
  static double toDouble(const Surd& v) { return v.toDouble(); }
  static Surd abs(const Surd& v) { return dyadlab::abs(v); }
};

template <class S>
bool isZero(const S& v) {
  return ScalarTraits<S>::isZero(v);
}
template <class S>
double toDouble(const S& v) {
  return ScalarTraits<S>::toDouble(v);
}

// |I|^{-1/2} for an interval at the given level: 2^{l/2}.
template <class S>
S invSqrtLength(int level) {
  return ScalarTraits<S>::sqrt2Pow(level);
}

}  // namespace dyadlab
