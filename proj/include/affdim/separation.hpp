#pragma once

// Finite-depth evidence for the Hochman separation condition of a system of
// similarities on the line: the minimum offset gap Delta_min(n) among distinct
// length-n words with equal composite derivative, and exact complete-overlap
// detection.
//
// A finite computation can refute the condition (an exact overlap) but can
// never prove it; the verdict vocabulary keeps that asymmetry visible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "affdim/error.hpp"
#include "affdim/ifs.hpp"
#include "affdim/rational.hpp"

namespace affdim {

using WordPair = std::pair<Word, Word>;

/// Delta_min at one depth. `delta` is empty when every derivative class is a
/// singleton (Delta = infinity).
struct SeparationLevel {
  std::size_t n = 0;
  std::optional<Rational> delta;
  std::optional<WordPair> witness;

  bool infinite() const { return !delta.has_value(); }
  /// delta^(1/n); empty when infinite, 0 on an exact overlap.
  std::optional<double> rate() const {
    if (!delta) return std::nullopt;
    if (delta->is_zero()) return 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    if (const double d = delta->to_double(); d > 1e-300) return std::pow(d, inv_n);
    return std::exp(delta->log_abs() * inv_n);
  }
};

enum class Verdict { overlap_found, no_overlap_up_to_n, separation_healthy };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::overlap_found: return "overlap_found";
    case Verdict::no_overlap_up_to_n: return "no_overlap_up_to_n";
    case Verdict::separation_healthy: return "separation_healthy";
  }
  return "?";
}

struct SeparationReport {
  std::vector<SeparationLevel> per_level;
  std::optional<WordPair> overlap_witness;
  Verdict verdict = Verdict::no_overlap_up_to_n;
  double rate_floor = 1e-12;
  std::size_t n_max = 0;
  /// Set when the word cap stopped the run before n_max.
  bool budget_exhausted = false;
  std::string note;

  /// Smallest finite rate over the computed levels, if any.
  std::optional<double> min_rate() const {
    std::optional<double> best;
    for (const auto& l : per_level) {
      if (auto r = l.rate(); r && (!best || *r < *best)) best = r;
    }
    return best;
  }
};

/// All composite maps of one depth, lexicographic word order, built by
/// prepending letters to the previous depth.
class LevelEnumerator {
 public:
  LevelEnumerator(const IFS1D& ifs, std::size_t cap) : ifs_(ifs), cap_(cap), level_{Similarity1D::identity()} {}

  std::size_t depth() const { return depth_; }
  const std::vector<Similarity1D>& maps() const { return level_; }

  void advance() {
    const std::size_t m = ifs_.size();
    if (level_.size() > cap_ / m) {
      throw BudgetExceeded("enumerating " + std::to_string(m) + "^" + std::to_string(depth_ + 1) +
                           " words exceeds the cap of " + std::to_string(cap_));
    }
    std::vector<Similarity1D> next;
    next.reserve(level_.size() * m);
    for (const auto& outer : ifs_.maps()) {
      for (const auto& inner : level_) next.push_back(outer.then_inner(inner));
    }
    level_ = std::move(next);
    ++depth_;
  }

 private:
  const IFS1D& ifs_;
  std::size_t cap_;
  std::size_t depth_ = 0;
  std::vector<Similarity1D> level_;
};

namespace detail {

inline bool pair_less(std::size_t a1, std::size_t b1, std::size_t a2, std::size_t b2) {
  return a1 != a2 ? a1 < a2 : b1 < b2;
}

/// Minimum over derivative classes of the smallest gap between offsets. Only
/// neighbours in (ratio, offset) order can realise it. Ties go to the
/// lexicographically smallest (first word, second word) pair.
inline SeparationLevel separation_of_level(const std::vector<Similarity1D>& maps, std::size_t m, std::size_t n) {
  std::vector<std::size_t> order(maps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (auto c = maps[a].ratio <=> maps[b].ratio; c != 0) return c < 0;
    if (auto c = maps[a].offset <=> maps[b].offset; c != 0) return c < 0;
    return a < b;
  });

  SeparationLevel out;
  out.n = n;
  std::optional<Rational> best;
  std::size_t best_a = 0;
  std::size_t best_b = 0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const auto& f = maps[order[k]];
    const auto& g = maps[order[k + 1]];
    if (f.ratio != g.ratio) continue;
    Rational gap = g.offset - f.offset;
    std::size_t a = std::min(order[k], order[k + 1]);
    std::size_t b = std::max(order[k], order[k + 1]);
    // Runs of identical maps are index-sorted; their smallest pair is the
    // first two entries.
    if (gap.is_zero() && k > 0 && maps[order[k - 1]] == f) continue;
    if (!best || gap < *best || (gap == *best && pair_less(a, b, best_a, best_b))) {
      best = std::move(gap);
      best_a = a;
      best_b = b;
    }
  }
  if (best) {
    out.delta = std::move(best);
    out.witness = WordPair{word_from_index(best_a, m, n), word_from_index(best_b, m, n)};
  }
  return out;
}

}  // namespace detail

inline SeparationLevel min_separation(const IFS1D& ifs, std::size_t n, std::size_t cap = kDefaultWordCap) {
  if (n < 1) throw ValidationError("min_separation needs n >= 1");
  if (checked_power(ifs.size(), n, cap) > cap) {
    throw BudgetExceeded("enumerating " + std::to_string(ifs.size()) + "^" + std::to_string(n) +
                         " words exceeds the cap of " + std::to_string(cap));
  }
  LevelEnumerator e(ifs, cap);
  while (e.depth() < n) e.advance();
  return detail::separation_of_level(e.maps(), ifs.size(), n);
}

/// First pair of distinct equal-length words inducing the same map, smallest
/// depth first, then lexicographic.
inline std::optional<WordPair> has_exact_overlap(const IFS1D& ifs, std::size_t n_max,
                                                 std::size_t cap = kDefaultWordCap) {
  if (n_max < 1) throw ValidationError("has_exact_overlap needs n_max >= 1");
  LevelEnumerator e(ifs, cap);
  for (std::size_t n = 1; n <= n_max; ++n) {
    e.advance();
    auto level = detail::separation_of_level(e.maps(), ifs.size(), n);
    if (level.delta && level.delta->is_zero()) return level.witness;
  }
  return std::nullopt;
}

inline SeparationReport hochman_report(const IFS1D& ifs, std::size_t n_max, std::size_t cap = kDefaultWordCap,
                                       double rate_floor = 1e-12) {
  if (n_max < 1) throw ValidationError("hochman_report needs n_max >= 1");
  SeparationReport report;
  report.n_max = n_max;
  report.rate_floor = rate_floor;
  LevelEnumerator e(ifs, cap);
  for (std::size_t n = 1; n <= n_max; ++n) {
    try {
      e.advance();
    } catch (const BudgetExceeded&) {
      report.budget_exhausted = true;
      break;
    }
    auto level = detail::separation_of_level(e.maps(), ifs.size(), n);
    if (!report.overlap_witness && level.delta && level.delta->is_zero()) report.overlap_witness = level.witness;
    report.per_level.push_back(std::move(level));
  }

  if (report.overlap_witness) {
    report.verdict = Verdict::overlap_found;
    report.note = "exact complete overlap: the Hochman condition fails";
  } else {
    const auto r = report.min_rate();
    report.verdict = (!r || *r >= rate_floor) ? Verdict::separation_healthy : Verdict::no_overlap_up_to_n;
    report.note =
        "no exact overlap up to the computed depth; this is evidence for the Hochman condition, not a proof";
  }
  return report;
}

}  // namespace affdim
