#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyadlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Parity { Even = 0, Odd = 1 };

inline Parity parityOfLevel(int level) { return (level % 2 == 0) ? Parity::Even : Parity::Odd; }
inline Parity flip(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }

// Dyadic interval [k 2^-l, (k+1) 2^-l) inside [0,1).
struct DyadicInterval {
  int level = 0;
  std::int64_t position = 0;

  DyadicInterval() = default;
  DyadicInterval(int l, std::int64_t k);

  Parity parity() const { return parityOfLevel(level); }
  bool isEven() const { return level % 2 == 0; }
  DyadicInterval child(bool right) const { return {level + 1, 2 * position + (right ? 1 : 0)}; }
  DyadicInterval left() const { return child(false); }
  DyadicInterval right() const { return child(true); }
  bool contains(const DyadicInterval& other) const;
  bool strictlyContains(const DyadicInterval& other) const {
    return other.level > level && contains(other);
  }
  bool intersects(const DyadicInterval& other) const { return contains(other) || other.contains(*this); }
  void checkDepth(int N) const;
  std::string str() const;

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

DyadicInterval parent(const DyadicInterval& I);
DyadicInterval sibling(const DyadicInterval& I);
int hatSign(const DyadicInterval& I);
DyadicInterval parseInterval(const std::string& text);

// Cells of a level-N grid covered by I: [first, first + count).
inline std::int64_t firstCell(const DyadicInterval& I, int N) { return I.position << (N - I.level); }
inline std::int64_t cellCount(const DyadicInterval& I, int N) { return std::int64_t{1} << (N - I.level); }

// Value of the Haar function h_I at cell c (at resolution N), up to the factor |I|^{-1/2}: +1, -1 or 0.
int haarSignAtCell(const DyadicInterval& I, std::int64_t cell, int N);

std::vector<DyadicInterval> intervalsAtLevel(int level);
// All intervals with level in [minLevel, maxLevel], level-major then position.
std::vector<DyadicInterval> intervalsUpTo(int maxLevel, int minLevel = 0);

enum class ParityClass { EvenEven, EvenOdd, OddEven, OddOdd };

struct DyadicRectangle {
  DyadicInterval x;
  DyadicInterval y;

  ParityClass parityClass() const;
  int totalLevel() const { return x.level + y.level; }
  bool contains(const DyadicRectangle& other) const { return x.contains(other.x) && y.contains(other.y); }
  bool intersects(const DyadicRectangle& o) const { return x.intersects(o.x) && y.intersects(o.y); }
  void checkDepth(int N) const {
    x.checkDepth(N);
    y.checkDepth(N);
  }
  std::string str() const;

  friend bool operator==(const DyadicRectangle&, const DyadicRectangle&) = default;
  friend auto operator<=>(const DyadicRectangle&, const DyadicRectangle&) = default;
};

DyadicRectangle parent(const DyadicRectangle& R);   // R-hat
DyadicRectangle parentX(const DyadicRectangle& R);  // R_1 = I-hat x J
DyadicRectangle parentY(const DyadicRectangle& R);  // R_2 = I x J-hat
DyadicRectangle ancestorAt(const DyadicRectangle& R, int m);
DyadicRectangle parseRectangle(const std::string& text);
std::string toString(ParityClass c);

std::vector<DyadicRectangle> rectanglesUpTo(int maxLevel);

// Index of h_I in the one-variable basis {1, h_I : level < N}: 0 is the constant, h_{l:k} sits at 2^l + k.
inline int basisIndex(const DyadicInterval& I) { return (1 << I.level) + static_cast<int>(I.position); }
DyadicInterval intervalOfIndex(int index);

}  // namespace dyadlab
