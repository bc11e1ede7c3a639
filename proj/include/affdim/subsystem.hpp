#pragma once

// Homogeneous subsystems of iterates: frequency-typical words, the homogeneous
// system they generate, and a greedy thinning to a strongly separated
// subsystem.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "affdim/dimensions.hpp"
#include "affdim/error.hpp"
#include "affdim/ifs.hpp"
#include "affdim/rational.hpp"

namespace affdim {

/// Largest-remainder rounding of k*p: floors first, then the leftover units go
/// to the largest fractional parts, smallest index on ties.
inline std::vector<std::size_t> typical_counts(const WeightVector& w, std::size_t k) {
  if (k < 1) throw ValidationError("typical_counts needs k >= 1");
  const std::size_t m = w.size();
  std::vector<std::size_t> v(m);
  std::vector<double> frac(m);
  std::size_t used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double target = static_cast<double>(k) * w[i];
    const double fl = std::floor(target);
    v[i] = static_cast<std::size_t>(fl);
    frac[i] = target - fl;
    used += v[i];
  }
  // Rounding can push the floors past k by one unit at most in pathological
  // float cases; take it back from the smallest fractional part.
  while (used > k) {
    std::size_t j = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (v[i] > 0 && (j == m || frac[i] < frac[j])) j = i;
    }
    --v[j];
    frac[j] += 1.0;
    --used;
  }
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t r = 0; used < k; ++r, ++used) ++v[order[r % m]];
  return v;
}

/// k! / prod v_l!
inline BigInt multinomial(const std::vector<std::size_t>& counts) {
  BigInt result = 1;
  std::size_t total = 0;
  for (std::size_t c : counts) {
    for (std::size_t j = 1; j <= c; ++j) {
      ++total;
      result *= static_cast<unsigned long>(total);
      result /= static_cast<unsigned long>(j);  // exact: running binomial product
    }
  }
  return result;
}

struct TypicalWordSet {
  std::size_t k = 0;
  std::vector<std::size_t> counts;
  std::vector<Word> words;
  BigInt cardinality;
};

/// Calls visit(word, changed_from) for every arrangement of the multiset
/// with the given letter counts, in lexicographic order. `changed_from` is the
/// first position that differs from the previous word.
template <typename Visit>
void for_each_arrangement(const std::vector<std::size_t>& counts, Visit&& visit) {
  Word w;
  for (std::size_t l = 0; l < counts.size(); ++l) w.insert(w.end(), counts[l], static_cast<Letter>(l + 1));
  Word prev;
  do {
    std::size_t changed = 0;
    if (!prev.empty()) {
      while (changed < w.size() && w[changed] == prev[changed]) ++changed;
    }
    visit(static_cast<const Word&>(w), changed);
    prev = w;
  } while (std::next_permutation(w.begin(), w.end()));
}

inline void require_enumerable(const BigInt& count, std::size_t cap, const char* what) {
  if (count > BigInt(static_cast<unsigned long>(cap))) {
    throw BudgetExceeded(std::string(what) + ": " + count.get_str() + " words exceeds the cap of " +
                         std::to_string(cap));
  }
}

inline TypicalWordSet typical_words(const WeightVector& w, std::size_t k, std::size_t cap = kDefaultWordCap) {
  TypicalWordSet set;
  set.k = k;
  set.counts = typical_counts(w, k);
  set.cardinality = multinomial(set.counts);
  require_enumerable(set.cardinality, cap, "typical_words");
  for_each_arrangement(set.counts, [&](const Word& word, std::size_t) { set.words.push_back(word); });
  return set;
}

/// Both candidate roots of min{N a^t, N a b^(t-1)} = 1, with a = |alpha|, b = |beta|.
struct BranchRoots {
  double t1;
  double t2;
};

inline BranchRoots homogeneous_branch_roots(double log_count, double log_alpha, double log_beta) {
  return {log_count / -log_alpha, 1.0 + (log_count + log_alpha) / -log_beta};
}

/// Root of the pressure of N maps sharing the ratio pair (alpha, beta). In
/// closed form: with a >= b the larger and smaller |ratio|, t = ln N / -ln a
/// when N a <= 1, else 1 + ln(N a) / -ln b when that is below 2, else
/// 2 ln N / -ln(ab).
inline double homogeneous_root(const BigInt& count, const Rational& alpha, const Rational& beta) {
  if (count <= 1) return 0.0;
  const double ln_n = detail::log_abs_mpz(count);
  const double la = std::max(alpha.log_abs(), beta.log_abs());
  const double lb = std::min(alpha.log_abs(), beta.log_abs());
  if (ln_n + la <= 0.0) return ln_n / -la;
  const double t = 1.0 + (ln_n + la) / -lb;
  if (t < 2.0) return t;
  return 2.0 * ln_n / -(la + lb);
}

struct Translation {
  Rational x;
  Rational y;
  friend bool operator==(const Translation&, const Translation&) = default;
};

struct HomogeneousSystem {
  Rational common_alpha;
  Rational common_beta;
  std::vector<Translation> translations;
  std::vector<Word> source_words;
  std::size_t k = 0;
  double root = 0.0;

  std::size_t size() const { return translations.size(); }

  DiagonalIFS as_ifs() const {
    std::vector<DiagonalMap> maps;
    maps.reserve(translations.size());
    for (const auto& t : translations) maps.push_back({common_alpha, common_beta, t.x, t.y});
    return DiagonalIFS(std::move(maps));
  }
};

/// The system of compositions over the typical words of length k. Weights
/// default to natural_weights(ifs).
inline HomogeneousSystem homogeneous_subsystem(const DiagonalIFS& ifs, std::size_t k,
                                               const std::optional<WeightVector>& weights = std::nullopt,
                                               std::size_t cap = kDefaultWordCap) {
  const WeightVector w = weights ? *weights : natural_weights(ifs);
  if (w.size() != ifs.size()) throw ValidationError("weight vector length does not match the IFS");
  const auto counts = typical_counts(w, k);
  const BigInt card = multinomial(counts);
  require_enumerable(card, cap, "homogeneous_subsystem");

  HomogeneousSystem sys;
  sys.k = k;
  sys.common_alpha = 1;
  sys.common_beta = 1;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    for (std::size_t j = 0; j < counts[l]; ++j) {
      sys.common_alpha *= ifs[l].alpha;
      sys.common_beta *= ifs[l].beta;
    }
  }

  const std::size_t n = card.get_ui();
  sys.translations.reserve(n);
  sys.source_words.reserve(n);
  // prefix[j] = S_{w_1} o ... o S_{w_j}; reuse the prefix shared with the
  // previous word.
  std::vector<DiagonalMap> prefix(k + 1, DiagonalMap::identity());
  for_each_arrangement(counts, [&](const Word& word, std::size_t changed) {
    for (std::size_t j = changed; j < k; ++j) prefix[j + 1] = prefix[j].then_inner(ifs[word[j] - 1]);
    const DiagonalMap& s = prefix[k];
    if (s.alpha != sys.common_alpha || s.beta != sys.common_beta) {
      throw Error("internal: typical word " + to_string(word) + " is not homogeneous");
    }
    sys.translations.push_back({s.tx, s.ty});
    sys.source_words.push_back(word);
  });
  sys.root = homogeneous_root(card, sys.common_alpha, sys.common_beta);
  return sys;
}

struct SubsystemResult {
  HomogeneousSystem system;
  bool ssc_certified = false;
  double achieved_dimension = 0.0;
  double target_dimension = 0.0;
  double epsilon = 0.0;
  std::size_t iterate_depth_total = 0;
  bool target_reached = false;
  bool budget_exhausted = false;
};

/// Exact check that the unit-square images of all maps are pairwise disjoint
/// (closed rectangles, so touching fails).
inline bool unit_square_images_disjoint(const HomogeneousSystem& sys) {
  std::vector<Rect> rects;
  rects.reserve(sys.size());
  for (const auto& t : sys.translations) {
    rects.push_back({unit_image(sys.common_alpha, t.x), unit_image(sys.common_beta, t.y)});
  }
  for (std::size_t i = 0; i < rects.size(); ++i) {
    for (std::size_t j = i + 1; j < rects.size(); ++j) {
      if (!rects[i].strictly_disjoint(rects[j])) return false;
    }
  }
  return true;
}

namespace detail {

/// Greedy interval scheduling on one axis; all intervals share one length,
/// so keeping the leftmost compatible interval is optimal for that axis.
inline std::vector<std::size_t> sweep(const std::vector<Interval>& iv) {
  std::vector<std::size_t> order(iv.size());
  for (std::size_t i = 0; i < iv.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (auto c = iv[a].lo <=> iv[b].lo; c != 0) return c < 0;
    return a < b;
  });
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    if (kept.empty() || iv[kept.back()].hi < iv[idx].lo) kept.push_back(idx);
  }
  return kept;
}

inline std::size_t distinct_count(std::vector<Interval> iv) {
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return static_cast<std::size_t>(
      std::unique(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo == b.lo; }) -
      iv.begin());
}

}  // namespace detail

/// Keeps a subset of maps whose unit-square images are pairwise disjoint.
inline SubsystemResult ssc_thin(const HomogeneousSystem& system) {
  std::vector<Interval> xs;
  std::vector<Interval> ys;
  xs.reserve(system.size());
  ys.reserve(system.size());
  for (const auto& t : system.translations) {
    xs.push_back(unit_image(system.common_alpha, t.x));
    ys.push_back(unit_image(system.common_beta, t.y));
  }

  std::vector<std::size_t> kept = detail::sweep(xs);
  if (2 * kept.size() < detail::distinct_count(xs)) {
    auto by_y = detail::sweep(ys);
    if (by_y.size() > kept.size()) kept = std::move(by_y);
  }
  std::sort(kept.begin(), kept.end());

  SubsystemResult result;
  result.system.common_alpha = system.common_alpha;
  result.system.common_beta = system.common_beta;
  result.system.k = system.k;
  for (std::size_t idx : kept) {
    result.system.translations.push_back(system.translations[idx]);
    if (idx < system.source_words.size()) result.system.source_words.push_back(system.source_words[idx]);
  }
  const BigInt kept_count(static_cast<unsigned long>(kept.size()));
  result.system.root = homogeneous_root(kept_count, system.common_alpha, system.common_beta);
  result.achieved_dimension = result.system.root;
  result.target_dimension = system.root;
  result.iterate_depth_total = system.k;
  result.ssc_certified = unit_square_images_disjoint(result.system);
  return result;
}

/// Searches k = 1..k_max for a strongly separated homogeneous subsystem whose
/// dimension is within epsilon of the attractor's.
inline SubsystemResult approximate_subsystem(const DiagonalIFS& ifs, double epsilon, std::size_t k_max,
                                             std::size_t cap = kDefaultWordCap,
                                             const std::optional<WeightVector>& weights = std::nullopt) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (k_max < 1) throw ValidationError("k_max must be >= 1");
  const double target = theorem_b_dimension(ifs).value;
  const WeightVector w = weights ? *weights : natural_weights(ifs);

  std::optional<SubsystemResult> best;
  bool exhausted = false;
  for (std::size_t k = 1; k <= k_max; ++k) {
    HomogeneousSystem sys;
    try {
      sys = homogeneous_subsystem(ifs, k, w, cap);
    } catch (const BudgetExceeded&) {
      exhausted = true;
      break;
    }
    SubsystemResult r = ssc_thin(sys);
    r.target_dimension = target;
    r.epsilon = epsilon;
    r.target_reached = r.ssc_certified && r.achieved_dimension >= target - epsilon;
    if (r.target_reached) return r;
    if (!best || (r.ssc_certified && r.achieved_dimension > best->achieved_dimension)) best = std::move(r);
  }
  if (!best) throw BudgetExceeded("approximate_subsystem: no depth fits within the word cap");
  best->budget_exhausted = exhausted;
  return *best;
}

}  // namespace affdim
