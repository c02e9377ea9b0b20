#include "sobdecomp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace sobdecomp {

namespace {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

// Exact rational value of a finite double: d = m * 2^e with integer m.
Rational rational_of(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("non-finite coordinate");
  int exp = 0;
  double frac = std::frexp(d, &exp);  // frac in [0.5, 1), d = frac * 2^exp
  // frac * 2^53 is an exact integer for any double.
  const double scaled = std::ldexp(frac, 53);
  BigInt mantissa(static_cast<long long>(scaled));
  int e2 = exp - 53;
  if (e2 >= 0) return Rational(mantissa << e2, BigInt(1));
  return Rational(mantissa, BigInt(1) << (-e2));
}

double to_double(const Rational& r) {
  // One rounding: convert through high-precision float division.
  namespace mp = boost::multiprecision;
  mp::cpp_bin_float_100 num(r.numerator().str());
  mp::cpp_bin_float_100 den(r.denominator().str());
  return static_cast<double>(num / den);
}

}  // namespace

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi)) {
    throw std::invalid_argument("interval requires lo < hi, got [" +
                                std::to_string(lo_) + ", " +
                                std::to_string(hi_) + "]");
  }
}

OpenSetG::OpenSetG(Interval window, std::vector<Interval> intervals)
    : window_(window), intervals_(std::move(intervals)) {
  double prev_hi = window_.lo;
  bool first = true;
  for (const Interval& iv : intervals_) {
    if (!window_.contains(iv)) {
      throw std::invalid_argument("G interval not contained in window");
    }
    if (!first && !(iv.lo > prev_hi)) {
      throw std::invalid_argument("G intervals must be sorted and disjoint");
    }
    if (first && !(iv.lo >= prev_hi)) {
      throw std::invalid_argument("G interval starts before window");
    }
    prev_hi = iv.hi;
    first = false;
  }
}

double OpenSetG::g_measure() const {
  double total = 0.0;
  for (const Interval& iv : intervals_) total += iv.length();
  return total;
}

std::vector<Interval> OpenSetG::f_components() const {
  std::vector<Interval> comps;
  double prev = window_.lo;
  for (const Interval& iv : intervals_) {
    if (iv.lo > prev) comps.emplace_back(prev, iv.lo);
    prev = iv.hi;
  }
  if (window_.hi > prev) comps.emplace_back(prev, window_.hi);
  return comps;
}

OpenSetG normalize_intervals(const std::vector<Interval>& raw,
                             const Interval& window) {
  if (raw.empty()) throw std::invalid_argument("empty raw interval list");

  std::vector<Interval> clipped;
  for (const Interval& iv : raw) {
    double lo = std::max(iv.lo, window.lo);
    double hi = std::min(iv.hi, window.hi);
    if (lo < hi) clipped.push_back(Interval(lo, hi));
  }
  if (clipped.empty()) {
    throw std::invalid_argument("G has zero measure in window");
  }
  std::sort(clipped.begin(), clipped.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  std::vector<Interval> merged;
  merged.push_back(clipped.front());
  for (std::size_t i = 1; i < clipped.size(); ++i) {
    Interval& last = merged.back();
    if (clipped[i].lo <= last.hi) {
      // Overlapping or touching: merging away zero-length gaps keeps
      // single-point F components out of the configuration.
      last.hi = std::max(last.hi, clipped[i].hi);
    } else {
      merged.push_back(clipped[i]);
    }
  }
  return OpenSetG(window, std::move(merged));
}

OpenSetG cantor_complement(const Interval& base, int depth, double ratio,
                           const Interval& window) {
  if (depth < 0) throw std::invalid_argument("cantor depth must be >= 0");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("cantor ratio must lie in (0, 1)");
  }
  if (!window.contains(base)) {
    throw std::invalid_argument("cantor base must be contained in window");
  }

  // Kept pieces of the Cantor recursion, as exact rational endpoints.
  std::vector<std::pair<Rational, Rational>> pieces;
  pieces.emplace_back(rational_of(base.lo), rational_of(base.hi));
  const Rational keep = (Rational(1, 1) - rational_of(ratio)) / Rational(2, 1);
  for (int level = 0; level < depth; ++level) {
    std::vector<std::pair<Rational, Rational>> next;
    next.reserve(pieces.size() * 2);
    for (const auto& [a, b] : pieces) {
      const Rational len = b - a;
      next.emplace_back(a, a + len * keep);
      next.emplace_back(b - len * keep, b);
    }
    pieces.swap(next);
  }

  // G = window minus the kept pieces: the gaps between them plus the flanks.
  std::vector<Interval> gaps;
  double prev = window.lo;
  for (const auto& [a, b] : pieces) {
    const double lo = to_double(a);
    const double hi = to_double(b);
    if (lo > prev) gaps.emplace_back(prev, lo);
    prev = hi;
  }
  if (window.hi > prev) gaps.emplace_back(prev, window.hi);
  return OpenSetG(window, std::move(gaps));
}

ScaleFunction::ScaleFunction(double base_point,
                             std::vector<double> breakpoints,
                             std::vector<double> values)
    : base_point_(base_point),
      breakpoints_(std::move(breakpoints)),
      values_(std::move(values)) {
  if (breakpoints_.size() != values_.size() || breakpoints_.size() < 2) {
    throw std::invalid_argument("scale function needs matching breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw std::invalid_argument("scale breakpoints must increase");
    }
    if (values_[i] < values_[i - 1]) {
      throw std::invalid_argument("scale function must be nondecreasing");
    }
  }
}

double ScaleFunction::operator()(double x) const {
  if (x < breakpoints_.front() || x > breakpoints_.back()) {
    throw std::domain_error("x outside window");
  }
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  if (it == breakpoints_.begin()) return values_.front();
  if (it == breakpoints_.end()) return values_.back();
  const std::size_t hi = static_cast<std::size_t>(it - breakpoints_.begin());
  const std::size_t lo = hi - 1;
  const double t =
      (x - breakpoints_[lo]) / (breakpoints_[hi] - breakpoints_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

ScaleFunction make_scale_function(const OpenSetG& g, double base_point) {
  const Interval& w = g.window();
  if (!w.contains(base_point)) {
    throw std::invalid_argument("scale base point outside window");
  }
  std::vector<double> xs;
  xs.push_back(w.lo);
  for (const Interval& iv : g.intervals()) {
    if (iv.lo > xs.back()) xs.push_back(iv.lo);
    if (iv.hi > xs.back()) xs.push_back(iv.hi);
  }
  if (w.hi > xs.back()) xs.push_back(w.hi);

  // Cumulative G-measure from the left window edge, then shift the gauge.
  std::vector<double> vals(xs.size(), 0.0);
  std::size_t g_idx = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    double seg = 0.0;
    if (g_idx < g.intervals().size()) {
      const Interval& iv = g.intervals()[g_idx];
      if (iv.lo <= xs[i - 1] && xs[i] <= iv.hi) {
        seg = xs[i] - xs[i - 1];
        if (xs[i] == iv.hi) ++g_idx;
      }
    }
    vals[i] = vals[i - 1] + seg;
  }
  ScaleFunction raw(base_point, xs, vals);
  const double shift = raw(base_point);
  for (double& v : vals) v -= shift;
  return ScaleFunction(base_point, std::move(xs), std::move(vals));
}

ScaleFunction make_scale_function(const OpenSetG& g) {
  return make_scale_function(g, g.window().lo);
}

}  // namespace sobdecomp
