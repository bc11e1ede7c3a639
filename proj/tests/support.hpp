#pragma once

// Test-only helpers: literal system builders, seeded random systems, and
// brute-force oracles that deliberately avoid the library's fast paths.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "affdim/ifs.hpp"
#include "affdim/rational.hpp"

namespace affdim::test {

inline Rational q(long n, long d = 1) { return Rational(n, d); }

inline DiagonalMap dmap(Rational a, Rational b, Rational tx, Rational ty) {
  return DiagonalMap::make(std::move(a), std::move(b), std::move(tx), std::move(ty));
}

inline IFS1D line(std::vector<std::pair<Rational, Rational>> maps) {
  std::vector<Similarity1D> v;
  for (auto& [r, t] : maps) v.push_back(Similarity1D::make(r, t));
  return IFS1D(std::move(v));
}

/// m maps sharing ratios (a, b) with the given translations.
inline DiagonalIFS homogeneous(const Rational& a, const Rational& b,
                               const std::vector<std::pair<Rational, Rational>>& t) {
  std::vector<DiagonalMap> v;
  for (const auto& [x, y] : t) v.push_back(dmap(a, b, x, y));
  return DiagonalIFS(std::move(v));
}

/// The anisotropic overlapping example: alpha = 1/2, beta = 1/3.
inline DiagonalIFS anisotropic_example() {
  return homogeneous(q(1, 2), q(1, 3), {{q(0), q(0)}, {q(23, 100), q(1, 3)}, {q(1, 2), q(2, 3)}});
}

inline DiagonalIFS diagonal_segment() { return homogeneous(q(1, 2), q(1, 2), {{q(0), q(0)}, {q(1, 2), q(1, 2)}}); }

inline DiagonalIFS unit_square_system() {
  return homogeneous(q(1, 2), q(1, 2), {{q(0), q(0)}, {q(1, 2), q(0)}, {q(0), q(1, 2)}, {q(1, 2), q(1, 2)}});
}

inline DiagonalIFS four_corner_quarter() {
  return homogeneous(q(1, 4), q(1, 4), {{q(0), q(0)}, {q(3, 4), q(0)}, {q(0), q(3, 4)}, {q(3, 4), q(3, 4)}});
}

inline DiagonalIFS product_cantor() {
  return homogeneous(q(1, 3), q(1, 3), {{q(0), q(0)}, {q(2, 3), q(0)}, {q(0), q(2, 3)}, {q(2, 3), q(2, 3)}});
}

class Random {
 public:
  explicit Random(unsigned seed) : gen_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }

  /// p/q with 0 < |p/q| < 1, q <= max_den.
  Rational contraction(long max_den = 12, bool allow_negative = true) {
    const long d = integer(2, max_den);
    const long n = integer(1, d - 1);
    const long s = allow_negative && integer(0, 3) == 0 ? -1 : 1;
    return q(s * n, d);
  }

  Rational unit(long max_den = 12) {
    const long d = integer(1, max_den);
    return q(integer(0, d), d);
  }

  DiagonalIFS system(std::size_t m, bool allow_negative = true) {
    std::vector<DiagonalMap> v;
    for (std::size_t i = 0; i < m; ++i) {
      v.push_back(dmap(contraction(12, allow_negative), contraction(12, allow_negative), unit(), unit()));
    }
    return DiagonalIFS(std::move(v));
  }

  /// Maps whose unit-square images stay inside [0,1]^2, ratios at most 1/2.
  DiagonalIFS self_map_system(std::size_t m) {
    std::vector<DiagonalMap> v;
    for (std::size_t i = 0; i < m; ++i) {
      const Rational a = q(integer(1, 3), 6);
      const Rational b = q(integer(1, 3), 6);
      const Rational tx = unit(6) * (Rational(1) - a);
      const Rational ty = unit(6) * (Rational(1) - b);
      v.push_back(dmap(a, b, tx, ty));
    }
    return DiagonalIFS(std::move(v));
  }

  IFS1D line_system(std::size_t m, long max_den = 8) {
    std::vector<Similarity1D> v;
    for (std::size_t i = 0; i < m; ++i) v.push_back(Similarity1D::make(contraction(max_den), unit(max_den)));
    return IFS1D(std::move(v));
  }

  Word word(std::size_t len, std::size_t m) {
    Word w(len);
    for (auto& l : w) l = static_cast<Letter>(integer(1, static_cast<long>(m)));
    return w;
  }

  std::mt19937& engine() { return gen_; }

 private:
  std::mt19937 gen_;
};

/// f_w(0) and f_w'(0) by direct nested evaluation, innermost letter first.
inline std::pair<Rational, Rational> evaluate_word(const IFS1D& ifs, const Word& w) {
  Rational x = 0;
  Rational d = 1;
  for (std::size_t i = w.size(); i-- > 0;) {
    const auto& f = ifs[w[i] - 1];
    x = f.ratio * x + f.offset;
    d = d * f.ratio;
  }
  return {d, x};
}

inline std::vector<Word> all_words(std::size_t m, std::size_t n) {
  std::vector<Word> out{Word{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Word> next;
    for (const auto& w : out) {
      for (std::size_t l = 1; l <= m; ++l) {
        Word v = w;
        v.push_back(static_cast<Letter>(l));
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// All-pairs Delta_min over distinct words (quadratic), with the
/// lexicographically smallest minimising pair.
struct BruteSeparation {
  std::optional<Rational> delta;
  std::optional<std::pair<Word, Word>> witness;
};

inline BruteSeparation brute_min_separation(const IFS1D& ifs, std::size_t n) {
  const auto words = all_words(ifs.size(), n);
  std::vector<std::pair<Rational, Rational>> vals;
  for (const auto& w : words) vals.push_back(evaluate_word(ifs, w));
  BruteSeparation best;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      if (vals[i].first != vals[j].first) continue;
      const Rational d = (vals[i].second - vals[j].second).abs();
      if (!best.delta || d < *best.delta) {
        best.delta = d;
        best.witness = std::make_pair(words[i], words[j]);
      }
    }
  }
  return best;
}

/// Plain bisection root of a decreasing function, independent of the library.
inline double oracle_root(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace affdim::test
