#pragma once

// Box-counting estimates from deterministic cylinder covers.
//
// Grid convention: with cells C_i = [i*delta, (i+1)*delta), a closed cylinder
// side [a, b] (always a < b) occupies cells floor(a/delta) .. ceil(b/delta)-1.
// The right endpoint is treated as exclusive, so a cylinder ending exactly on
// a grid line does not spill into the next cell.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "affdim/error.hpp"
#include "affdim/ifs.hpp"
#include "affdim/rational.hpp"

namespace affdim {

struct CoverSpec {
  std::optional<std::size_t> fixed_depth;
  std::optional<double> target_diameter;
  std::vector<Rect> rectangles;
  std::vector<Word> words;
  /// False when the leaf cap stopped refinement; such a cover is not a cover.
  bool usable = true;

  Rational max_diameter_squared() const {
    Rational best = 0;
    for (const auto& r : rectangles) best = max(best, r.diameter_squared());
    return best;
  }
};

struct BoxCountSeries {
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
  /// Index of the first scale used by the fit.
  std::size_t fit_start = 0;
};

struct EstimatorOptions {
  std::size_t node_cap = 50'000'000;
  int min_exponent = 3;
  int max_allowed_exponent = 11;
};

namespace detail {

inline void require_self_map(const DiagonalIFS& ifs) {
  if (!ifs.maps_unit_square_into_itself()) {
    throw ValidationError("box counting needs every map to send [0,1]^2 into itself");
  }
}

class Grid {
 public:
  explicit Grid(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be positive");
    delta_ = Rational::from_double(delta);
    inv_ = Rational(1) / delta_;
    const BigInt n = inv_.ceil();
    if (n > BigInt(1UL << 20)) throw ValidationError("delta too small for the occupancy grid");
    cells_ = n.get_ui();
  }

  std::size_t cells_per_axis() const { return cells_; }
  const Rational& delta() const { return delta_; }

  std::pair<std::size_t, std::size_t> range(const Interval& iv) const {
    const auto clamp = [&](BigInt v) -> std::size_t {
      if (v < 0) return 0;
      if (v >= BigInt(static_cast<unsigned long>(cells_))) return cells_ - 1;
      return v.get_ui();
    };
    const std::size_t lo = clamp((iv.lo * inv_).floor());
    const std::size_t hi = clamp(BigInt((iv.hi * inv_).ceil() - 1));
    return {lo, std::max(lo, hi)};
  }

  std::uint64_t key(std::size_t i, std::size_t j) const { return static_cast<std::uint64_t>(i) * cells_ + j; }

 private:
  Rational delta_;
  Rational inv_;
  std::size_t cells_ = 1;
};

/// Set of occupied cells; a bitmap while it is small enough.
class CellSet {
 public:
  explicit CellSet(const Grid& g) : grid_(g) {
    const std::uint64_t total = static_cast<std::uint64_t>(g.cells_per_axis()) * g.cells_per_axis();
    if (total <= (1ULL << 26)) bits_.assign(total, false);
  }

  void mark(const Rect& r) {
    const auto [x0, x1] = grid_.range(r.x);
    const auto [y0, y1] = grid_.range(r.y);
    for (std::size_t i = x0; i <= x1; ++i) {
      for (std::size_t j = y0; j <= y1; ++j) {
        const auto k = grid_.key(i, j);
        if (!bits_.empty()) {
          bits_[k] = true;
        } else {
          keys_.push_back(k);
        }
      }
    }
  }

  /// True when every cell the rectangle meets is already marked (bitmap
  /// mode only; otherwise false).
  bool all_marked(const Rect& r) const {
    if (bits_.empty()) return false;
    const auto [x0, x1] = grid_.range(r.x);
    const auto [y0, y1] = grid_.range(r.y);
    for (std::size_t i = x0; i <= x1; ++i) {
      for (std::size_t j = y0; j <= y1; ++j) {
        if (!bits_[grid_.key(i, j)]) return false;
      }
    }
    return true;
  }

  /// Sorted keys i*n + j.
  std::vector<std::uint64_t> keys() {
    if (!bits_.empty()) {
      std::vector<std::uint64_t> out;
      for (std::uint64_t k = 0; k < bits_.size(); ++k) {
        if (bits_[k]) out.push_back(k);
      }
      return out;
    }
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
    return keys_;
  }

 private:
  const Grid& grid_;
  std::vector<bool> bits_;
  std::vector<std::uint64_t> keys_;
};

/// Depth-first refinement of cylinders; `stop(map, depth)` decides leaves.
/// Returns false if more than `cap` nodes would be visited.
template <bool TrackWords, typename Stop, typename Leaf>
bool refine(const DiagonalIFS& ifs, std::size_t cap, Stop&& stop, Leaf&& leaf) {
  struct Node {
    DiagonalMap map;
    std::size_t depth;
    Word word;
  };
  std::vector<Node> stack;
  stack.push_back({DiagonalMap::identity(), 0, {}});
  std::size_t visited = 0;
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (++visited > cap) return false;
    if (stop(node.map, node.depth)) {
      leaf(node.map, std::move(node.word));
      continue;
    }
    // Reverse push keeps leaves in lexicographic order.
    for (std::size_t i = ifs.size(); i-- > 0;) {
      Word w;
      if constexpr (TrackWords) {
        w = node.word;
        w.push_back(static_cast<Letter>(i + 1));
      }
      stack.push_back({node.map.then_inner(ifs[i]), node.depth + 1, std::move(w)});
    }
  }
  return true;
}

}  // namespace detail

/// Adaptive cover: refine every cylinder until its diameter is <= target.
inline CoverSpec cover(const DiagonalIFS& ifs, double target_diameter, std::size_t cap = kDefaultWordCap) {
  detail::require_self_map(ifs);
  if (!(target_diameter > 0.0)) throw ValidationError("target diameter must be positive");
  const Rational t = Rational::from_double(target_diameter);
  const Rational t2 = t * t;
  CoverSpec c;
  c.target_diameter = target_diameter;
  c.usable = detail::refine<true>(
      ifs, cap,
      [&](const DiagonalMap& s, std::size_t) { return s.unit_square_image().diameter_squared() <= t2; },
      [&](const DiagonalMap& s, Word w) {
        c.rectangles.push_back(s.unit_square_image());
        c.words.push_back(std::move(w));
      });
  return c;
}

/// All cylinders of word length n.
inline CoverSpec cover_fixed_depth(const DiagonalIFS& ifs, std::size_t n, std::size_t cap = kDefaultWordCap) {
  detail::require_self_map(ifs);
  if (checked_power(ifs.size(), n, cap) > cap) throw BudgetExceeded("fixed-depth cover exceeds the cap");
  CoverSpec c;
  c.fixed_depth = n;
  detail::refine<true>(
      ifs, kDefaultWordCap * 64, [&](const DiagonalMap&, std::size_t depth) { return depth == n; },
      [&](const DiagonalMap& s, Word w) {
        c.rectangles.push_back(s.unit_square_image());
        c.words.push_back(std::move(w));
      });
  return c;
}

/// Sorted occupied-cell keys (i * cells + j) of a cover at scale delta.
inline std::vector<std::uint64_t> occupancy(const CoverSpec& c, double delta) {
  if (!c.usable) throw ValidationError("cover is incomplete (cap reached); refusing to count");
  const detail::Grid grid(delta);
  const Rational half = grid.delta() / Rational(2);
  if (c.max_diameter_squared() > half * half) {
    throw ValidationError("cover too coarse: cylinder diameters must be <= delta/2");
  }
  detail::CellSet cells(grid);
  for (const auto& r : c.rectangles) cells.mark(r);
  return cells.keys();
}

inline std::size_t box_count(const CoverSpec& c, double delta) { return occupancy(c, delta).size(); }

/// Same cells as occupancy(cover(ifs, delta/2), delta), without materialising
/// the cover. A cylinder's descendants only meet cells the cylinder meets, so
/// refinement stops once it lies in a single cell or all of its cells are
/// already occupied.
inline std::vector<std::uint64_t> occupied_cells(const DiagonalIFS& ifs, double delta,
                                                 std::size_t node_cap = EstimatorOptions{}.node_cap) {
  detail::require_self_map(ifs);
  const detail::Grid grid(delta);
  const Rational half = grid.delta() / Rational(2);
  const Rational half2 = half * half;
  detail::CellSet cells(grid);
  const bool complete = detail::refine<false>(
      ifs, node_cap,
      [&](const DiagonalMap& s, std::size_t) {
        const Rect r = s.unit_square_image();
        if (r.diameter_squared() <= half2) return true;
        const auto [x0, x1] = grid.range(r.x);
        const auto [y0, y1] = grid.range(r.y);
        return (x0 == x1 && y0 == y1) || cells.all_marked(r);
      },
      [&](const DiagonalMap& s, Word) { cells.mark(s.unit_square_image()); });
  if (!complete) throw BudgetExceeded("box counting exceeded the node cap of " + std::to_string(node_cap));
  return cells.keys();
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  std::vector<double> residuals;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

/// Box counts at delta = 2^-min_exponent .. 2^-max_exponent and the slope of
/// ln N against ln(1/delta), ignoring the two coarsest scales.
inline BoxCountSeries estimate_box_dimension(const DiagonalIFS& ifs, int max_exponent,
                                             const EstimatorOptions& opt = {}) {
  if (max_exponent < opt.min_exponent || max_exponent > opt.max_allowed_exponent) {
    throw ValidationError("max exponent must lie in [" + std::to_string(opt.min_exponent) + ", " +
                          std::to_string(opt.max_allowed_exponent) + "]");
  }
  BoxCountSeries s;
  for (int e = opt.min_exponent; e <= max_exponent; ++e) {
    const double delta = std::ldexp(1.0, -e);
    s.scales.push_back(delta);
    s.counts.push_back(occupied_cells(ifs, delta, opt.node_cap).size());
  }
  s.fit_start = s.scales.size() >= 4 ? 2 : 0;
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = s.fit_start; i < s.scales.size(); ++i) {
    x.push_back(-std::log(s.scales[i]));
    y.push_back(std::log(static_cast<double>(s.counts[i])));
  }
  if (x.size() == 1) {
    s.slope = y[0] / x[0];
    s.r_squared = 1.0;
    s.residuals = {0.0};
  } else {
    LinearFit f = least_squares(x, y);
    s.slope = f.slope;
    s.intercept = f.intercept;
    s.r_squared = f.r_squared;
    s.residuals = std::move(f.residuals);
  }
  s.slope = std::clamp(s.slope, 0.0, 2.0);
  return s;
}

inline void write_csv(const BoxCountSeries& s, std::ostream& out) {
  out << "delta,count,ln_inv_delta,ln_count\n";
  out.precision(17);
  for (std::size_t i = 0; i < s.scales.size(); ++i) {
    out << s.scales[i] << ',' << s.counts[i] << ',' << -std::log(s.scales[i]) << ','
        << std::log(static_cast<double>(s.counts[i])) << '\n';
  }
}

/// Plain (P2) graymap of the occupancy grid, top row = largest y; occupied
/// cells are black.
inline void write_pgm(const DiagonalIFS& ifs, double delta, std::ostream& out,
                      std::size_t node_cap = EstimatorOptions{}.node_cap) {
  const detail::Grid grid(delta);
  const auto keys = occupied_cells(ifs, delta, node_cap);
  const std::size_t n = grid.cells_per_axis();
  std::vector<bool> occ(n * n, false);
  for (auto k : keys) occ[k] = true;
  out << "P2\n" << n << ' ' << n << "\n255\n";
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t j = n - 1 - row;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out << ' ';
      out << (occ[grid.key(i, j)] ? 0 : 255);
    }
    out << '\n';
  }
}

}  // namespace affdim
