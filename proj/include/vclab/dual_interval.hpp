#pragma once

// Dual sets of the Box-Cox subgraph family. For a point (x,t) the dual set
// T(x,t) = {lambda != 0 : (x,t) in S_lambda} is a union of at most two
// intervals whose shape is fixed by the signs of x-1, t and t-ln x. Counting
// the cells of the arrangement of n dual sets gives |F cap A| exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vclab/core.hpp"
#include "vclab/families.hpp"
#include "vclab/interval_union.hpp"

namespace vclab {

enum class DualCase {
  above_log,       // x>1, t >= ln x          [c, inf)
  below_log,       // x>1, 0 < t < ln x       [c, 0) U (0, inf)
  upper_zero,      // x>1, t = 0              R \ {0}
  upper_negative,  // x>1, t < 0              {}
  lower_positive,  // x<1, t > 0              {}
  lower_zero,      // x<1, t = 0              R \ {0}
  above_lower_log, // x<1, ln x < t < 0       (-inf, 0) U (0, d]
  at_or_below_log, // x<1, t <= ln x          (-inf, d]
  degenerate,      // x = 1
};

inline constexpr std::array<DualCase, 9> kAllDualCases{
    DualCase::above_log,      DualCase::below_log,       DualCase::upper_zero,
    DualCase::upper_negative, DualCase::lower_positive,  DualCase::lower_zero,
    DualCase::above_lower_log, DualCase::at_or_below_log, DualCase::degenerate};

inline std::string to_string(DualCase c) {
  switch (c) {
    case DualCase::above_log: return "x>1,t>=ln(x)";
    case DualCase::below_log: return "x>1,0<t<ln(x)";
    case DualCase::upper_zero: return "x>1,t=0";
    case DualCase::upper_negative: return "x>1,t<0";
    case DualCase::lower_positive: return "x<1,t>0";
    case DualCase::lower_zero: return "x<1,t=0";
    case DualCase::above_lower_log: return "x<1,ln(x)<t<0";
    case DualCase::at_or_below_log: return "x<1,t<=ln(x)";
    case DualCase::degenerate: return "x=1";
  }
  return "?";
}

struct DualCaseResult {
  DualCase case_id = DualCase::degenerate;
  IntervalUnion set;
  /// c (lower end of an upward ray) or d (upper end of a downward ray).
  std::optional<double> root;
};

/// h(lambda) = (x^lambda - 1)/lambda, continuously extended by ln x at 0.
inline double box_cox_in_lambda(double x, double lambda) {
  const double lx = std::log(x);
  if (lambda == 0.0) return lx;
  return std::expm1(lambda * lx) / lambda;
}

/// Solves h(lambda) = t for the increasing h above by bracket doubling from
/// +-1 followed by bisection down to adjacent doubles. Returns the bracket
/// (lo, hi) with h(lo) < t <= h(hi), or h(lo) <= t < h(hi) when `tie_low`
/// (h is monotone only up to rounding, so the side that takes ties matters
/// for the closed endpoint).
inline std::pair<double, double> solve_box_cox_root(double x, double t, bool tie_low = false) {
  auto h = [x](double l) { return box_cox_in_lambda(x, l); };
  auto below = [&](double l) { return tie_low ? h(l) <= t : h(l) < t; };
  double lo = -1.0, hi = 1.0;
  while (below(hi)) {
    lo = hi;
    hi *= 2.0;
    require(std::isfinite(hi), "tdual: root bracket diverged");
  }
  while (!below(lo)) {
    hi = lo;
    lo *= 2.0;
    require(std::isfinite(lo), "tdual: root bracket diverged");
  }
  for (int it = 0; it < 2200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (below(mid)) lo = mid;
    else hi = mid;
  }
  return {lo, hi};
}

inline constexpr double kRootSnap = 1e-10;

inline DualCaseResult tdual(double x, double t) {
  require(std::isfinite(x) && std::isfinite(t), "tdual: non-finite input");
  require(x > 0.0, "tdual: x must be positive");
  DualCaseResult r;
  if (x == 1.0) {
    r.case_id = DualCase::degenerate;
    r.set = t == 0.0 ? IntervalUnion::punctured_line() : IntervalUnion::empty_set();
    return r;
  }
  const double lx = std::log(x);
  const auto punctured = IntervalUnion::punctured_line();
  if (x > 1.0) {
    if (t < 0.0) r.case_id = DualCase::upper_negative;
    else if (t == 0.0) r.case_id = DualCase::upper_zero;
    else r.case_id = t >= lx ? DualCase::above_log : DualCase::below_log;
    if (t <= 0.0) {
      r.set = t == 0.0 ? punctured : IntervalUnion::empty_set();
      return r;
    }
    double c = solve_box_cox_root(x, t).second;
    if (std::abs(c) < kRootSnap) c = 0.0;
    r.root = c;
    r.set = IntervalUnion::ray_from(c, c != 0.0).intersect(punctured);
    return r;
  }
  if (t > 0.0) r.case_id = DualCase::lower_positive;
  else if (t == 0.0) r.case_id = DualCase::lower_zero;
  else r.case_id = t > lx ? DualCase::above_lower_log : DualCase::at_or_below_log;
  if (t >= 0.0) {
    r.set = t == 0.0 ? punctured : IntervalUnion::empty_set();
    return r;
  }
  double d = solve_box_cox_root(x, t, true).first;
  if (std::abs(d) < kRootSnap) d = 0.0;
  r.root = d;
  r.set = IntervalUnion::ray_to(d, d != 0.0).intersect(punctured);
  return r;
}

/// Membership vectors realized as lambda sweeps R \ {0}: one probe inside
/// every cell of the arrangement (each finite endpoint, each midpoint between
/// consecutive breakpoints, two sentinels), 0 itself never probed.
inline TraceSet atom_traces(const std::vector<IntervalUnion>& sets) {
  require(!sets.empty(), "atom_traces: need at least one set");
  std::vector<double> breaks{0.0};
  for (const auto& s : sets)
    for (double e : s.endpoints()) breaks.push_back(e);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double span = 0.0;
  for (double b : breaks) span = std::max(span, std::abs(b));
  std::vector<double> probes{-(span + 1.0), span + 1.0};
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (breaks[i] != 0.0) probes.push_back(breaks[i]);
    if (i + 1 < breaks.size()) probes.push_back(0.5 * (breaks[i] + breaks[i + 1]));
  }

  TraceSet out(sets.size());
  for (double lambda : probes) {
    Trace tr(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (sets[i].contains(lambda)) tr.set(i);
    out.insert(std::move(tr));
  }
  return out;
}

struct Lemma1Report {
  std::size_t n = 0;
  std::size_t count = 0;
  std::size_t bound = 0;
  bool bound_ok = false;
  std::array<std::size_t, kAllDualCases.size()> cases{};

  nlohmann::json to_json() const {
    nlohmann::json hist = nlohmann::json::object();
    for (std::size_t i = 0; i < kAllDualCases.size(); ++i)
      if (cases[i]) hist[to_string(kAllDualCases[i])] = cases[i];
    return {{"n", n}, {"count", count}, {"bound", bound}, {"bound_ok", bound_ok}, {"cases", hist}};
  }
};

inline std::vector<DualCaseResult> tdual_all(const PointSet& pts) {
  require(pts.dim() == 2, "lemma1: points must be (x, t) pairs");
  std::vector<DualCaseResult> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(tdual(pts[i][0], pts[i][1]));
  return out;
}

inline TraceSet dual_traces(const PointSet& pts) {
  std::vector<IntervalUnion> sets;
  for (auto& r : tdual_all(pts)) sets.push_back(std::move(r.set));
  return atom_traces(sets);
}

inline Lemma1Report lemma1_check(const PointSet& pts) {
  require(!pts.empty(), "lemma1: empty point set");
  Lemma1Report rep;
  rep.n = pts.size();
  std::vector<IntervalUnion> sets;
  for (auto& r : tdual_all(pts)) {
    ++rep.cases[static_cast<std::size_t>(r.case_id)];
    sets.push_back(std::move(r.set));
  }
  rep.count = atom_traces(sets).size();
  rep.bound = rep.n + 1;
  rep.bound_ok = rep.count <= rep.bound;
  return rep;
}

}  // namespace vclab
