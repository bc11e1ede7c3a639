#pragma once

// Entropy, Lyapunov exponents, similarity/Lyapunov/affinity dimensions and
// the closed dimension formulas for diagonal self-affine sets and measures.
// Logarithms are natural throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "affdim/error.hpp"
#include "affdim/ifs.hpp"
#include "affdim/rational.hpp"

namespace affdim {

struct RootOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
};

/// Root of a strictly decreasing function f with f(lo) >= target >= f(hi).
inline double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                double target, const RootOptions& opt = {}) {
  for (int it = 0; it < opt.max_iterations && hi - lo > opt.tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit WeightVector(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw ValidationError("weight vector is empty");
    double sum = 0.0;
    for (double v : p_) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("weights must be positive and finite");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > kSumTolerance) {
      throw ValidationError("weights sum to " + std::to_string(sum) + ", not 1");
    }
  }

  static WeightVector uniform(std::size_t m) { return WeightVector(std::vector<double>(m, 1.0 / static_cast<double>(m))); }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }

 private:
  std::vector<double> p_;
};

struct SpectralSummary {
  double entropy = 0.0;
  double chi_x = 0.0;
  double chi_y = 0.0;
};

enum class CaseTag { A1, A2, B1, B2, out_of_theorem_scope };

inline const char* to_string(CaseTag c) {
  switch (c) {
    case CaseTag::A1: return "A1";
    case CaseTag::A2: return "A2";
    case CaseTag::B1: return "B1";
    case CaseTag::B2: return "B2";
    case CaseTag::out_of_theorem_scope: return "out_of_theorem_scope";
  }
  return "?";
}

/// What a dimension value depends on. Hochman evidence itself comes from the
/// separation module; `checked_depth` stays 0 until a caller attaches it.
struct Hypotheses {
  std::vector<Axis> hochman_required;  // in the caller's coordinates
  bool inequalities_hold = false;
  int checked_depth = 0;
};

struct DimensionReport {
  double value = 0.0;
  CaseTag case_tag = CaseTag::out_of_theorem_scope;
  Hypotheses hypotheses;
  double s_x = 0.0;
  double s_y = 0.0;
  double t0 = 0.0;
  /// True when the theorem's "alpha" role was played by the y-axis.
  bool axes_swapped = false;
};

inline double entropy(const WeightVector& w) {
  double h = 0.0;
  for (double p : w.values()) h -= p * std::log(p);
  return std::max(h, 0.0);
}

inline SpectralSummary lyapunov_exponents(const WeightVector& w, const DiagonalIFS& ifs) {
  if (w.size() != ifs.size()) {
    throw ValidationError("weight vector has " + std::to_string(w.size()) + " entries, IFS has " +
                          std::to_string(ifs.size()) + " maps");
  }
  SpectralSummary s;
  s.entropy = entropy(w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    s.chi_x -= w[i] * ifs[i].alpha.log_abs();
    s.chi_y -= w[i] * ifs[i].beta.log_abs();
  }
  return s;
}

namespace detail {

inline std::vector<double> log_abs_all(const DiagonalIFS& ifs, Axis axis) {
  std::vector<double> out;
  out.reserve(ifs.size());
  for (const auto& s : ifs.maps()) out.push_back((axis == Axis::x ? s.alpha : s.beta).log_abs());
  return out;
}

/// sum_i exp(t * logs[i])
inline double power_sum(const std::vector<double>& logs, double t) {
  double acc = 0.0;
  for (double l : logs) acc += std::exp(t * l);
  return acc;
}

/// sum_i exp(la[i] + (t - 1) * lb[i]), i.e. sum |a_i| |b_i|^(t-1).
inline double mixed_sum(const std::vector<double>& la, const std::vector<double>& lb, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < la.size(); ++i) acc += std::exp(la[i] + (t - 1.0) * lb[i]);
  return acc;
}

/// Root of a strictly decreasing f with f(0) >= 1 and f -> 0: grows the
/// bracket until f drops below 1.
inline double root_from_zero(const std::function<double(double)>& f, const RootOptions& opt) {
  if (f(0.0) <= 1.0) return 0.0;
  double hi = 1.0;
  while (f(hi) >= 1.0) {
    hi *= 2.0;
    if (hi > 1e6) throw ValidationError("root bracket did not close");
  }
  return bisect_decreasing(f, 0.0, hi, 1.0, opt);
}

inline bool at_most_one(double ratio) { return ratio <= 1.0 + 1e-12; }

}  // namespace detail

/// Unique s >= 0 with sum |r_i|^s = 1.
inline double similarity_dimension(const std::vector<Rational>& ratios, const RootOptions& opt = {}) {
  if (ratios.empty()) throw ValidationError("similarity_dimension of an empty list");
  std::vector<double> logs;
  logs.reserve(ratios.size());
  for (const auto& r : ratios) {
    require_contracting(r, "ratio");
    logs.push_back(r.log_abs());
  }
  return detail::root_from_zero([&](double s) { return detail::power_sum(logs, s); }, opt);
}

inline std::vector<Rational> ratios(const DiagonalIFS& ifs, Axis axis) {
  std::vector<Rational> out;
  out.reserve(ifs.size());
  for (const auto& s : ifs.maps()) out.push_back(axis == Axis::x ? s.alpha : s.beta);
  return out;
}

/// Which formula of the piecewise pressure is in force.
enum class PressureBranch { below_one, one_to_two, from_two };

/// Evaluates one branch formula at any t >= 0 (used for boundary checks).
inline double pressure_branch(const DiagonalIFS& ifs, PressureBranch branch, double t) {
  const auto la = detail::log_abs_all(ifs, Axis::x);
  const auto lb = detail::log_abs_all(ifs, Axis::y);
  switch (branch) {
    case PressureBranch::below_one:
      return std::max(detail::power_sum(la, t), detail::power_sum(lb, t));
    case PressureBranch::one_to_two:
      return std::max(detail::mixed_sum(la, lb, t), detail::mixed_sum(lb, la, t));
    case PressureBranch::from_two: {
      double acc = 0.0;
      for (std::size_t i = 0; i < la.size(); ++i) acc += std::exp(0.5 * t * (la[i] + lb[i]));
      return acc;
    }
  }
  return 0.0;
}

inline PressureBranch branch_for(double t) {
  if (t < 1.0) return PressureBranch::below_one;
  if (t < 2.0) return PressureBranch::one_to_two;
  return PressureBranch::from_two;
}

/// Piecewise subadditive pressure of a diagonal system.
inline double pressure(const DiagonalIFS& ifs, double t) {
  if (!(t >= 0.0)) throw ValidationError("pressure needs t >= 0");
  return pressure_branch(ifs, branch_for(t), t);
}

/// Unique t0 with P(t0) = 1. P is continuous and strictly decreasing, and
/// P(0) = m, so the root is 0 exactly when m = 1.
inline double affinity_dimension(const DiagonalIFS& ifs, const RootOptions& opt = {}) {
  if (ifs.size() == 1) return 0.0;
  return detail::root_from_zero([&](double t) { return pressure(ifs, t); }, opt);
}

/// Exact test of s <= 1 for the similarity dimension s of the given ratios:
/// since s -> sum |r_i|^s decreases, s <= 1 iff sum |r_i| <= 1.
inline bool similarity_dimension_at_most_one(const std::vector<Rational>& ratios) {
  Rational sum = 0;
  for (const auto& r : ratios) sum += r.abs();
  return sum <= Rational(1);
}

namespace detail {

/// Orientation in which the "alpha" axis has the larger similarity dimension.
/// Which side of 1 each dimension lies on is decided exactly.
struct Oriented {
  DiagonalIFS ifs;
  bool swapped;
  double s_x;
  double s_y;
  bool major_at_most_one;  // s_alpha <= 1
  bool minor_at_most_one;  // s_beta <= 1
};

inline Oriented orient_by_similarity(const DiagonalIFS& ifs, const RootOptions& opt) {
  const double sx = similarity_dimension(ratios(ifs, Axis::x), opt);
  const double sy = similarity_dimension(ratios(ifs, Axis::y), opt);
  const bool x_small = similarity_dimension_at_most_one(ratios(ifs, Axis::x));
  const bool y_small = similarity_dimension_at_most_one(ratios(ifs, Axis::y));
  bool swap = sy > sx;
  if (x_small != y_small) swap = x_small;  // the axis with s > 1 is the major one
  if (swap) return {ifs.swapped_axes(), true, sx, sy, x_small && y_small, x_small || y_small};
  return {ifs, false, sx, sy, x_small && y_small, x_small || y_small};
}

inline Axis actual_axis(Axis role, bool swapped) {
  if (!swapped) return role;
  return role == Axis::x ? Axis::y : Axis::x;
}

}  // namespace detail

/// Bernoulli weights that realise the affinity dimension: |a_i|^t when the
/// dominant similarity dimension is <= 1, |a_i||b_i|^(t-1) otherwise, where a
/// is the axis of larger similarity dimension.
inline WeightVector natural_weights(const DiagonalIFS& ifs, const RootOptions& opt = {}) {
  const auto o = detail::orient_by_similarity(ifs, opt);
  const double t = affinity_dimension(o.ifs, opt);
  const auto la = detail::log_abs_all(o.ifs, Axis::x);
  const auto lb = detail::log_abs_all(o.ifs, Axis::y);
  const std::size_t m = la.size();
  std::vector<double> p(m);
  if (o.major_at_most_one) {
    for (std::size_t i = 0; i < m; ++i) p[i] = std::exp(t * la[i]);
  } else if (t < 2.0) {
    // Use whichever branch attains the max; in scope it is always the first.
    const bool first = detail::mixed_sum(la, lb, t) >= detail::mixed_sum(lb, la, t);
    for (std::size_t i = 0; i < m; ++i) {
      p[i] = first ? std::exp(la[i] + (t - 1.0) * lb[i]) : std::exp(lb[i] + (t - 1.0) * la[i]);
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) p[i] = std::exp(0.5 * t * (la[i] + lb[i]));
  }
  // Absorb the bisection residual so the vector is a probability vector.
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return WeightVector(std::move(p));
}

/// Lyapunov dimension of the Bernoulli measure with weights w.
inline DimensionReport lyapunov_dimension(const WeightVector& w, const DiagonalIFS& ifs,
                                          const RootOptions& opt = {}) {
  const SpectralSummary s = lyapunov_exponents(w, ifs);
  DimensionReport r;
  r.s_x = similarity_dimension(ratios(ifs, Axis::x), opt);
  r.s_y = similarity_dimension(ratios(ifs, Axis::y), opt);
  r.t0 = affinity_dimension(ifs, opt);

  // The weak-contraction axis plays the alpha role.
  r.axes_swapped = s.chi_y < s.chi_x;
  const double chi_a = r.axes_swapped ? s.chi_y : s.chi_x;
  const double chi_b = r.axes_swapped ? s.chi_x : s.chi_y;
  const double h = s.entropy;
  const Axis a_axis = detail::actual_axis(Axis::x, r.axes_swapped);
  const Axis b_axis = detail::actual_axis(Axis::y, r.axes_swapped);

  if (detail::at_most_one(h / chi_a)) {
    r.value = h / chi_a;
    r.case_tag = CaseTag::A1;
    r.hypotheses.hochman_required = {a_axis};
    r.hypotheses.inequalities_hold = true;
  } else if (detail::at_most_one(h / chi_b)) {
    r.value = 1.0 + (h - chi_a) / chi_b;
    r.case_tag = CaseTag::A2;
    r.hypotheses.hochman_required = {a_axis, b_axis};
    r.hypotheses.inequalities_hold = true;
  } else {
    r.value = std::min(2.0, 1.0 + (h - chi_a) / chi_b);
    r.case_tag = CaseTag::out_of_theorem_scope;
    r.hypotheses.hochman_required = {a_axis, b_axis};
    r.hypotheses.inequalities_hold = false;
  }
  return r;
}

/// Root d of sum |a_i| |b_i|^(d-1) = 1 on [1, 2]; requires sum|a| >= 1 >= sum|a||b|.
inline double mixed_root(const DiagonalIFS& oriented, const RootOptions& opt = {}) {
  const auto la = detail::log_abs_all(oriented, Axis::x);
  const auto lb = detail::log_abs_all(oriented, Axis::y);
  return bisect_decreasing([&](double d) { return detail::mixed_sum(la, lb, d); }, 1.0, 2.0, 1.0, opt);
}

/// Dimension of the attractor under the Hochman hypotheses.
inline DimensionReport theorem_b_dimension(const DiagonalIFS& ifs, const RootOptions& opt = {}) {
  const auto o = detail::orient_by_similarity(ifs, opt);
  DimensionReport r;
  r.s_x = o.s_x;
  r.s_y = o.s_y;
  r.axes_swapped = o.swapped;
  r.t0 = affinity_dimension(ifs, opt);
  const Axis a_axis = detail::actual_axis(Axis::x, o.swapped);
  const Axis b_axis = detail::actual_axis(Axis::y, o.swapped);

  if (o.major_at_most_one) {
    r.value = std::max(o.s_x, o.s_y);
    r.case_tag = CaseTag::B1;
    r.hypotheses.hochman_required = {a_axis};
    r.hypotheses.inequalities_hold = true;
  } else if (o.minor_at_most_one) {
    r.value = mixed_root(o.ifs, opt);
    r.case_tag = CaseTag::B2;
    r.hypotheses.hochman_required = {a_axis, b_axis};
    r.hypotheses.inequalities_hold = true;
  } else {
    r.value = r.t0;
    r.case_tag = CaseTag::out_of_theorem_scope;
    r.hypotheses.hochman_required = {a_axis, b_axis};
    r.hypotheses.inequalities_hold = false;
  }
  return r;
}

}  // namespace affdim
