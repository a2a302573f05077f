#include "dyadlab/scalar.hpp"

namespace dyadlab {

int Surd::sign() const {
  int sa = sgn(a_), sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // opposite signs: compare a^2 with 2 b^2
  mpq_class a2 = a_ * a_;
  mpq_class b2 = 2 * b_ * b_;
  int c = cmp(a2, b2);
  if (c == 0) return 0;  // impossible for rational a, b unless both vanish
  return c > 0 ? sa : sb;
}

Surd& Surd::operator*=(const Surd& o) {
  if (sgn(b_) == 0 && sgn(o.b_) == 0) {
    a_ *= o.a_;
    return *this;
  }
  mpq_class na = a_ * o.a_ + 2 * b_ * o.b_;
  mpq_class nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  return *this;
}

Surd& Surd::operator/=(const Surd& o) {
  if (o.isZero()) throw std::domain_error("division by zero in Q(sqrt 2)");
  if (sgn(o.b_) == 0) {
    a_ /= o.a_;
    b_ /= o.a_;
    return *this;
  }
  mpq_class norm = o.a_ * o.a_ - 2 * o.b_ * o.b_;
  Surd conj(o.a_ / norm, -o.b_ / norm);
  return *this *= conj;
}

std::string Surd::str() const {
  if (sgn(b_) == 0) return a_.get_str();
  if (sgn(a_) == 0) return b_.get_str() + "*sqrt2";
  return a_.get_str() + (sgn(b_) > 0 ? "+" : "") + b_.get_str() + "*sqrt2";
}

Surd abs(const Surd& s) { return s.sign() < 0 ? -s : s; }

}  // namespace dyadlab
