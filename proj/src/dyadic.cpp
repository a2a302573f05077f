#include "dyadlab/dyadic.hpp"

#include <charconv>

namespace dyadlab {

DyadicInterval::DyadicInterval(int l, std::int64_t k) : level(l), position(k) {
  if (l < 0 || l > 40) throw Error("interval level out of range: " + std::to_string(l));
  if (k < 0 || k >= (std::int64_t{1} << l))
    throw Error("interval position " + std::to_string(k) + " out of range at level " + std::to_string(l));
}

bool DyadicInterval::contains(const DyadicInterval& other) const {
  if (other.level < level) return false;
  return (other.position >> (other.level - level)) == position;
}

void DyadicInterval::checkDepth(int N) const {
  if (level > N) throw Error("interval " + str() + " is finer than depth " + std::to_string(N));
}

std::string DyadicInterval::str() const { return std::to_string(level) + ":" + std::to_string(position); }

DyadicInterval parent(const DyadicInterval& I) {
  if (I.level == 0) throw Error("no parent in unit-square model");
  return {I.level - 1, I.position / 2};
}

DyadicInterval sibling(const DyadicInterval& I) {
  if (I.level == 0) throw Error("no sibling in unit-square model");
  return {I.level, I.position ^ 1};
}

int hatSign(const DyadicInterval& I) {
  if (I.level == 0) throw Error("hatSign undefined at level 0");
  return (I.position & 1) ? 1 : -1;
}

int haarSignAtCell(const DyadicInterval& I, std::int64_t cell, int N) {
  std::int64_t first = firstCell(I, N);
  std::int64_t count = cellCount(I, N);
  if (cell < first || cell >= first + count) return 0;
  return (cell - first >= count / 2) ? 1 : -1;
}

static int parseInt(const std::string& text, std::size_t begin, std::size_t end) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + begin, text.data() + end, value);
  if (ec != std::errc() || ptr != text.data() + end) throw Error("malformed dyadic notation: " + text);
  return value;
}

DyadicInterval parseInterval(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw Error("malformed interval notation: " + text);
  return {parseInt(text, 0, colon), parseInt(text, colon + 1, text.size())};
}

std::vector<DyadicInterval> intervalsAtLevel(int level) {
  std::vector<DyadicInterval> out;
  for (std::int64_t k = 0; k < (std::int64_t{1} << level); ++k) out.emplace_back(level, k);
  return out;
}

std::vector<DyadicInterval> intervalsUpTo(int maxLevel, int minLevel) {
  std::vector<DyadicInterval> out;
  for (int l = minLevel; l <= maxLevel; ++l)
    for (std::int64_t k = 0; k < (std::int64_t{1} << l); ++k) out.emplace_back(l, k);
  return out;
}

ParityClass DyadicRectangle::parityClass() const {
  bool ex = x.isEven(), ey = y.isEven();
  if (ex && ey) return ParityClass::EvenEven;
  if (ex) return ParityClass::EvenOdd;
  if (ey) return ParityClass::OddEven;
  return ParityClass::OddOdd;
}

std::string DyadicRectangle::str() const { return x.str() + "|" + y.str(); }

std::string toString(ParityClass c) {
  switch (c) {
    case ParityClass::EvenEven: return "even-even";
    case ParityClass::EvenOdd: return "even-odd";
    case ParityClass::OddEven: return "odd-even";
    case ParityClass::OddOdd: return "odd-odd";
  }
  return "?";
}

DyadicRectangle parent(const DyadicRectangle& R) { return {parent(R.x), parent(R.y)}; }
DyadicRectangle parentX(const DyadicRectangle& R) { return {parent(R.x), R.y}; }
DyadicRectangle parentY(const DyadicRectangle& R) { return {R.x, parent(R.y)}; }

DyadicRectangle ancestorAt(const DyadicRectangle& R, int m) {
  if (m < 0) throw Error("negative ancestor order");
  if (R.x.level < m || R.y.level < m)
    throw Error("rectangle " + R.str() + " has no ancestor of order " + std::to_string(m));
  return {{R.x.level - m, R.x.position >> m}, {R.y.level - m, R.y.position >> m}};
}

DyadicRectangle parseRectangle(const std::string& text) {
  auto bar = text.find('|');
  if (bar == std::string::npos) throw Error("malformed rectangle notation: " + text);
  return {parseInterval(text.substr(0, bar)), parseInterval(text.substr(bar + 1))};
}

std::vector<DyadicRectangle> rectanglesUpTo(int maxLevel) {
  std::vector<DyadicRectangle> out;
  auto all = intervalsUpTo(maxLevel);
  out.reserve(all.size() * all.size());
  for (const auto& I : all)
    for (const auto& J : all) out.push_back({I, J});
  return out;
}

DyadicInterval intervalOfIndex(int index) {
  if (index < 1) throw Error("basis index 0 is the constant, not a Haar function");
  int level = 0;
  while ((2 << level) <= index) ++level;
  return {level, index - (1 << level)};
}

}  // namespace dyadlab
