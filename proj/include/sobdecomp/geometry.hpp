#pragma once

#include <cstdint>
#include <vector>

namespace sobdecomp {

/// Open interval (lo, hi), lo < hi strictly.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo_, double hi_);

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
};

/// An open set G inside a finite window, stored as sorted pairwise-disjoint
/// open intervals. F denotes the closed complement of G within the window.
/// The interval list may be empty (G empty) or cover the window (F empty).
/// Values are immutable after construction.
class OpenSetG {
 public:
  /// Validates: intervals sorted by lo, pairwise disjoint (no touching),
  /// each contained in the window.
  OpenSetG(Interval window, std::vector<Interval> intervals);

  const Interval& window() const { return window_; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  /// Total Lebesgue measure of G.
  double g_measure() const;
  /// Measure of F = window \ G.
  double f_measure() const { return window_.length() - g_measure(); }
  /// The subspace induced by G is proper iff |F| > 0.
  bool proper() const { return f_measure() > 0.0; }

  /// Maximal closed components of F, ordered left to right. Zero-length
  /// components (where G touches the window edge) are omitted.
  std::vector<Interval> f_components() const;

 private:
  Interval window_;
  std::vector<Interval> intervals_;
};

/// Clips raw intervals to the window, merges overlapping or touching ones,
/// and sorts. Throws std::invalid_argument if raw is empty or if nothing
/// remains after clipping ("G has zero measure in window").
OpenSetG normalize_intervals(const std::vector<Interval>& raw,
                             const Interval& window);

/// G whose complement inside `base` is the depth-k generalized Cantor set:
/// recursively remove the open middle fraction `ratio` from each kept piece,
/// k times. The window portions flanking `base` are added to G. Endpoints
/// are computed by exact rational recursion and rounded to double once.
OpenSetG cantor_complement(const Interval& base, int depth, double ratio,
                           const Interval& window);

/// Piecewise-linear scale function: slope 1 on G, slope 0 on F,
/// s(base_point) = 0. Hence s(x) - s(y) = |G ∩ (y, x)| for x > y.
class ScaleFunction {
 public:
  ScaleFunction(double base_point, std::vector<double> breakpoints,
                std::vector<double> values);

  double base_point() const { return base_point_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }

  /// Evaluates s(x). Throws std::domain_error outside the breakpoint span.
  double operator()(double x) const;

 private:
  double base_point_;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Builds the scale function of G with the given base point (must lie in
/// the window).
ScaleFunction make_scale_function(const OpenSetG& g, double base_point);
/// Convenience: base point at the left window edge.
ScaleFunction make_scale_function(const OpenSetG& g);

inline double scale_eval(const ScaleFunction& s, double x) { return s(x); }

}  // namespace sobdecomp
