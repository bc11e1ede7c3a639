#pragma once

// Diagonal affine iterated function systems in the plane with exact rational
// coefficients, their axis projections, and the word/composition algebra.
//
// Words are read outermost-first: the word (i_1, ..., i_n) denotes
// f_{i_1} o f_{i_2} o ... o f_{i_n}. Letters are 1-based.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "affdim/error.hpp"
#include "affdim/rational.hpp"

namespace affdim {

inline constexpr std::size_t kDefaultWordCap = 1'000'000;

enum class Axis { x, y };

inline const char* to_string(Axis a) { return a == Axis::x ? "x" : "y"; }

using Letter = std::uint32_t;
using Word = std::vector<Letter>;

inline std::string to_string(const Word& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(w[i]);
  }
  return s + ")";
}

/// Closed interval [lo, hi] with exact endpoints.
struct Interval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  /// True when the closed intervals share no point (touching counts as meeting).
  bool strictly_separated_from(const Interval& o) const { return hi < o.lo || o.hi < lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Image of [0,1] under x -> ratio*x + offset.
inline Interval unit_image(const Rational& ratio, const Rational& offset) {
  Rational end = offset + ratio;
  if (ratio.sign() < 0) return {std::move(end), offset};
  return {offset, std::move(end)};
}

struct Rect {
  Interval x;
  Interval y;

  Rational diameter_squared() const {
    const Rational w = x.length();
    const Rational h = y.length();
    return w * w + h * h;
  }
  bool contains(const Rect& o) const { return x.contains(o.x) && y.contains(o.y); }
  bool strictly_disjoint(const Rect& o) const {
    return x.strictly_separated_from(o.x) || y.strictly_separated_from(o.y);
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

inline void require_contracting(const Rational& r, const char* what) {
  if (r.is_zero() || !(r.abs() < Rational(1))) {
    throw ValidationError(std::string(what) + " must satisfy 0 < |r| < 1, got " + r.to_string());
  }
}

/// x -> ratio*x + offset.
struct Similarity1D {
  Rational ratio{1};
  Rational offset{0};

  static Similarity1D identity() { return {}; }

  static Similarity1D make(Rational ratio, Rational offset) {
    require_contracting(ratio, "similarity ratio");
    return {std::move(ratio), std::move(offset)};
  }

  Rational operator()(const Rational& x) const { return ratio * x + offset; }

  /// (*this) o inner
  Similarity1D then_inner(const Similarity1D& inner) const {
    return {ratio * inner.ratio, ratio * inner.offset + offset};
  }
  friend bool operator==(const Similarity1D&, const Similarity1D&) = default;
};

class IFS1D {
 public:
  explicit IFS1D(std::vector<Similarity1D> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) throw ValidationError("an IFS needs at least one map");
    for (const auto& f : maps_) require_contracting(f.ratio, "similarity ratio");
  }

  std::size_t size() const { return maps_.size(); }
  const Similarity1D& operator[](std::size_t i) const { return maps_[i]; }
  const std::vector<Similarity1D>& maps() const { return maps_; }

  friend bool operator==(const IFS1D&, const IFS1D&) = default;

 private:
  std::vector<Similarity1D> maps_;
};

/// S(x,y) = (alpha*x + tx, beta*y + ty).
struct DiagonalMap {
  Rational alpha{1};
  Rational beta{1};
  Rational tx{0};
  Rational ty{0};

  static DiagonalMap identity() { return {}; }

  static DiagonalMap make(Rational alpha, Rational beta, Rational tx, Rational ty) {
    require_contracting(alpha, "alpha");
    require_contracting(beta, "beta");
    return {std::move(alpha), std::move(beta), std::move(tx), std::move(ty)};
  }

  Similarity1D component(Axis a) const {
    return a == Axis::x ? Similarity1D{alpha, tx} : Similarity1D{beta, ty};
  }

  /// (*this) o inner
  DiagonalMap then_inner(const DiagonalMap& inner) const {
    return {alpha * inner.alpha, beta * inner.beta, alpha * inner.tx + tx, beta * inner.ty + ty};
  }

  Rect unit_square_image() const { return {unit_image(alpha, tx), unit_image(beta, ty)}; }

  /// Same map with the roles of the two coordinates exchanged.
  DiagonalMap swapped() const { return {beta, alpha, ty, tx}; }

  friend bool operator==(const DiagonalMap&, const DiagonalMap&) = default;
};

class DiagonalIFS {
 public:
  explicit DiagonalIFS(std::vector<DiagonalMap> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) throw ValidationError("an IFS needs at least one map");
    for (const auto& s : maps_) {
      require_contracting(s.alpha, "alpha");
      require_contracting(s.beta, "beta");
    }
  }

  std::size_t size() const { return maps_.size(); }
  const DiagonalMap& operator[](std::size_t i) const { return maps_[i]; }
  const std::vector<DiagonalMap>& maps() const { return maps_; }

  /// Exact check that S_i([0,1]^2) is contained in [0,1]^2 for every i.
  bool maps_unit_square_into_itself() const {
    const Rect unit{{0, 1}, {0, 1}};
    for (const auto& s : maps_) {
      if (!unit.contains(s.unit_square_image())) return false;
    }
    return true;
  }

  DiagonalIFS swapped_axes() const {
    std::vector<DiagonalMap> out;
    out.reserve(maps_.size());
    for (const auto& s : maps_) out.push_back(s.swapped());
    return DiagonalIFS(std::move(out));
  }

  friend bool operator==(const DiagonalIFS&, const DiagonalIFS&) = default;

 private:
  std::vector<DiagonalMap> maps_;
};

inline void validate_word(const Word& word, std::size_t m) {
  for (Letter l : word) {
    if (l < 1 || l > m) {
      throw InvalidWord("letter " + std::to_string(l) + " out of range 1.." + std::to_string(m) +
                        " in word " + to_string(word));
    }
  }
}

inline Similarity1D compose_1d(const Word& word, const IFS1D& ifs) {
  validate_word(word, ifs.size());
  Similarity1D acc = Similarity1D::identity();
  for (auto it = word.rbegin(); it != word.rend(); ++it) acc = ifs[*it - 1].then_inner(acc);
  return acc;
}

inline DiagonalMap compose(const Word& word, const DiagonalIFS& ifs) {
  validate_word(word, ifs.size());
  DiagonalMap acc = DiagonalMap::identity();
  for (auto it = word.rbegin(); it != word.rend(); ++it) acc = ifs[*it - 1].then_inner(acc);
  return acc;
}

/// Exact image S_word([0,1]^2).
inline Rect cylinder_rect(const Word& word, const DiagonalIFS& ifs) {
  return compose(word, ifs).unit_square_image();
}

inline IFS1D project(const DiagonalIFS& ifs, Axis axis) {
  std::vector<Similarity1D> out;
  out.reserve(ifs.size());
  for (const auto& s : ifs.maps()) out.push_back(s.component(axis));
  return IFS1D(std::move(out));
}

/// m^n, or cap+1 when it would exceed cap.
inline std::size_t checked_power(std::size_t m, std::size_t n, std::size_t cap) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (r > cap / m) return cap + 1;
    r *= m;
  }
  return r;
}

/// Lexicographic index <-> word for words of length n over m letters.
inline Word word_from_index(std::size_t index, std::size_t m, std::size_t n) {
  Word w(n);
  for (std::size_t pos = n; pos-- > 0;) {
    w[pos] = static_cast<Letter>(index % m + 1);
    index /= m;
  }
  return w;
}

/// All m^k compositions of length k, lexicographic word order.
inline DiagonalIFS iterate(const DiagonalIFS& ifs, std::size_t k, std::size_t cap = kDefaultWordCap) {
  if (k < 1) throw ValidationError("iterate depth must be >= 1");
  const std::size_t m = ifs.size();
  const std::size_t total = checked_power(m, k, cap);
  if (total > cap) {
    throw BudgetExceeded("iterate: " + std::to_string(m) + "^" + std::to_string(k) +
                         " maps exceeds the cap of " + std::to_string(cap));
  }
  // Level j holds the m^j compositions; level j+1 = {S_i o w}, i outermost.
  std::vector<DiagonalMap> level = ifs.maps();
  for (std::size_t depth = 1; depth < k; ++depth) {
    std::vector<DiagonalMap> next;
    next.reserve(level.size() * m);
    for (const auto& outer : ifs.maps()) {
      for (const auto& inner : level) next.push_back(outer.then_inner(inner));
    }
    level = std::move(next);
  }
  return DiagonalIFS(std::move(level));
}

/// One-dimensional analogue of iterate(), same ordering.
inline std::vector<Similarity1D> iterate_1d(const IFS1D& ifs, std::size_t k, std::size_t cap = kDefaultWordCap) {
  const std::size_t m = ifs.size();
  if (checked_power(m, k, cap) > cap) {
    throw BudgetExceeded("enumeration of " + std::to_string(m) + "^" + std::to_string(k) +
                         " words exceeds the cap of " + std::to_string(cap));
  }
  std::vector<Similarity1D> level{Similarity1D::identity()};
  for (std::size_t depth = 0; depth < k; ++depth) {
    std::vector<Similarity1D> next;
    next.reserve(level.size() * m);
    for (const auto& outer : ifs.maps()) {
      for (const auto& inner : level) next.push_back(outer.then_inner(inner));
    }
    level = std::move(next);
  }
  return level;
}

}  // namespace affdim
