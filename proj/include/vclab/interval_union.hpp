#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "vclab/error.hpp"

namespace vclab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double v) const {
    const bool above = lo_closed ? v >= lo : v > lo;
    const bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
  }
  bool is_empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of intervals of the extended real line, kept in normalized
/// form: sorted, pairwise disjoint, never touching, infinite ends open. Two
/// unions describe the same set iff their normalized forms are equal.
class IntervalUnion {
 public:
  IntervalUnion() = default;

  explicit IntervalUnion(std::vector<Interval> parts) : parts_(std::move(parts)) { normalize(); }

  static IntervalUnion empty_set() { return {}; }
  static IntervalUnion real_line() { return IntervalUnion({Interval{}}); }
  /// R \ {0}.
  static IntervalUnion punctured_line() {
    return IntervalUnion({Interval{-kInf, 0.0, false, false}, Interval{0.0, kInf, false, false}});
  }
  static IntervalUnion closed(double lo, double hi) { return IntervalUnion({Interval{lo, hi, true, true}}); }
  static IntervalUnion open(double lo, double hi) { return IntervalUnion({Interval{lo, hi, false, false}}); }
  static IntervalUnion ray_from(double lo, bool closed = true) { return IntervalUnion({Interval{lo, kInf, closed, false}}); }
  static IntervalUnion ray_to(double hi, bool closed = true) { return IntervalUnion({Interval{-kInf, hi, false, closed}}); }

  const std::vector<Interval>& intervals() const { return parts_; }
  std::size_t interval_count() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }

  bool contains(double v) const {
    // First interval whose upper end is not below v.
    auto it = std::lower_bound(parts_.begin(), parts_.end(), v,
                               [](const Interval& iv, double x) { return iv.hi < x; });
    for (; it != parts_.end() && it->lo <= v; ++it)
      if (it->contains(v)) return true;
    return false;
  }

  /// Finite endpoints in increasing order (with repeats removed).
  std::vector<double> endpoints() const {
    std::vector<double> out;
    for (const auto& iv : parts_) {
      if (std::isfinite(iv.lo)) out.push_back(iv.lo);
      if (std::isfinite(iv.hi)) out.push_back(iv.hi);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  IntervalUnion unite(const IntervalUnion& other) const {
    std::vector<Interval> all = parts_;
    all.insert(all.end(), other.parts_.begin(), other.parts_.end());
    return IntervalUnion(std::move(all));
  }

  IntervalUnion complement() const {
    std::vector<Interval> out;
    double cursor = -kInf;
    bool cursor_closed = false;  // whether `cursor` itself belongs to the gap
    for (const auto& iv : parts_) {
      out.push_back(Interval{cursor, iv.lo, cursor_closed, !iv.lo_closed});
      cursor = iv.hi;
      cursor_closed = !iv.hi_closed;
    }
    out.push_back(Interval{cursor, kInf, cursor_closed, false});
    return IntervalUnion(std::move(out));
  }

  IntervalUnion intersect(const IntervalUnion& other) const {
    return complement().unite(other.complement()).complement();
  }

  std::string to_string() const {
    if (parts_.empty()) return "{}";
    std::ostringstream os;
    os.precision(12);
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      const auto& iv = parts_[i];
      if (i) os << " U ";
      os << (iv.lo_closed ? '[' : '(');
      if (std::isinf(iv.lo)) os << "-inf";
      else os << iv.lo;
      os << ", ";
      if (std::isinf(iv.hi)) os << "inf";
      else os << iv.hi;
      os << (iv.hi_closed ? ']' : ')');
    }
    return os.str();
  }

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  void normalize() {
    for (auto& iv : parts_) {
      require(!std::isnan(iv.lo) && !std::isnan(iv.hi), "IntervalUnion: NaN endpoint");
      if (std::isinf(iv.lo)) iv.lo_closed = false;
      if (std::isinf(iv.hi)) iv.hi_closed = false;
    }
    std::erase_if(parts_, [](const Interval& iv) { return iv.is_empty(); });
    std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) {
      if (a.lo != b.lo) return a.lo < b.lo;
      return a.lo_closed && !b.lo_closed;
    });
    std::vector<Interval> merged;
    for (const auto& iv : parts_) {
      if (!merged.empty()) {
        auto& last = merged.back();
        const bool touches = iv.lo < last.hi || (iv.lo == last.hi && (iv.lo_closed || last.hi_closed));
        if (touches) {
          if (iv.hi > last.hi) {
            last.hi = iv.hi;
            last.hi_closed = iv.hi_closed;
          } else if (iv.hi == last.hi) {
            last.hi_closed = last.hi_closed || iv.hi_closed;
          }
          continue;
        }
      }
      merged.push_back(iv);
    }
    parts_ = std::move(merged);
  }

  std::vector<Interval> parts_;
};

}  // namespace vclab
