#pragma once

// Shatter functions, VC-dimension and friends for any FamilyHandle.
//
// Counts obtained from sampled point sets are lower bounds on Delta(n). For
// half-planes, shifted unions, T_lambda subgraphs, finite powersets and unions
// of those, the trace set of each sampled point set is computed exactly by a
// family-specific enumerator; for the rest it comes from random parameters.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "vclab/core.hpp"
#include "vclab/dual_interval.hpp"
#include "vclab/families.hpp"
#include "vclab/fit.hpp"
#include "vclab/parallel.hpp"
#include "vclab/rng.hpp"

namespace vclab {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Exact enumerators

/// Open half-planes: a set {a x + b y + c < 0} is a prefix of the points
/// sorted by the score a x + b y. The order only changes at directions
/// perpendicular to some p - q, so one direction strictly between each pair
/// of consecutive critical directions, with every prefix cut, reaches every
/// trace.
inline TraceSet halfplane_traces(const HalfPlaneModel& model, const PointSet& pts) {
  const std::size_t n = pts.size();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> breaks;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pts[j][0] - pts[i][0], dy = pts[j][1] - pts[i][1];
      if (dx == 0.0 && dy == 0.0) continue;
      double phi = std::atan2(dy, dx) + 0.5 * std::numbers::pi;
      phi = std::fmod(phi + two_pi, two_pi);
      breaks.push_back(phi);
      breaks.push_back(std::fmod(phi + std::numbers::pi, two_pi));
    }

  // Admissible directions (cos t, sin t): upper needs sin t < 0, lower > 0.
  double lo = 0.0, hi = two_pi;
  bool circular = true;
  if (model.variant() == HalfPlaneVariant::upper) lo = std::numbers::pi, circular = false;
  if (model.variant() == HalfPlaneVariant::lower) hi = std::numbers::pi, circular = false;
  std::erase_if(breaks, [&](double b) { return !(b > lo && b < hi); });
  if (!circular || breaks.empty()) {
    breaks.push_back(lo);
    breaks.push_back(hi);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> directions;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) directions.push_back(0.5 * (breaks[i] + breaks[i + 1]));
  if (circular) directions.push_back(std::fmod(0.5 * (breaks.back() + breaks.front() + two_pi), two_pi));

  TraceSet out(n);
  std::vector<std::size_t> order(n);
  std::vector<double> score(n);
  for (double theta : directions) {
    const double a = std::cos(theta), b = std::sin(theta);
    if (!model.admits(b)) continue;
    for (std::size_t i = 0; i < n; ++i) score[i] = a * pts[i][0] + b * pts[i][1];
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return score[x] < score[y]; });
    Trace cur(n);
    out.insert(cur);
    for (std::size_t r = 0; r < n; ++r) {
      cur.set(order[r]);
      if (r + 1 == n || score[order[r]] < score[order[r + 1]]) out.insert(cur);
    }
  }
  return out;
}

/// Shifted union x + J: point p is cut out iff x lies in p - J, a union of
/// open intervals. Sweeps all interval ends in order, recording the state at
/// every event coordinate and in every gap.
inline TraceSet shifted_union_traces(const ShiftedUnionModel& model, const PointSet& pts) {
  const std::size_t n = pts.size();
  const auto& parts = model.shifted_union().intervals();
  struct Event {
    double at;
    std::uint32_t point;
    bool entry;
  };
  std::vector<Event> events;
  events.reserve(2 * n * parts.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double p = pts[i][0];
    for (const auto& iv : parts) {
      events.push_back({p - iv.hi, static_cast<std::uint32_t>(i), true});
      events.push_back({p - iv.lo, static_cast<std::uint32_t>(i), false});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });

  // Keys are the raw bits for n <= 128 and a 128-bit Zobrist hash otherwise.
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept { return static_cast<std::size_t>(splitmix64(k.first ^ splitmix64(k.second))); }
  };
  const bool raw = n <= 128;
  std::vector<Key> zobrist;
  if (!raw) {
    Rng rng(0x5eedf00dULL);
    zobrist.resize(n);
    for (auto& z : zobrist) z = {rng.next(), rng.next()};
  }
  auto toggle = [&](Key& key, std::uint32_t i) {
    if (raw) {
      if (i < 64) key.first ^= std::uint64_t{1} << i;
      else key.second ^= std::uint64_t{1} << (i - 64);
    } else {
      key.first ^= zobrist[i].first;
      key.second ^= zobrist[i].second;
    }
  };

  TraceSet out(n);
  std::unordered_set<Key, KeyHash> seen;
  Key key{0, 0};
  Trace state(n);
  auto record = [&](const Key& k, const Trace& t) {
    if (seen.insert(k).second) out.insert(t);
  };
  record(key, state);
  for (std::size_t g = 0; g < events.size();) {
    std::size_t e = g;
    while (e < events.size() && events[e].at == events[g].at) ++e;
    // At the event coordinate itself: intervals ending here are already
    // left, those starting here not yet entered (all intervals are open).
    for (std::size_t i = g; i < e; ++i)
      if (!events[i].entry) {
        toggle(key, events[i].point);
        state.flip(events[i].point);
      }
    record(key, state);
    for (std::size_t i = g; i < e; ++i)
      if (events[i].entry) {
        toggle(key, events[i].point);
        state.flip(events[i].point);
      }
    record(key, state);
    g = e;
  }
  return out;
}

/// Powerset of k anchors: only anchors present among the points matter.
inline TraceSet finite_powerset_traces(const FinitePowersetModel& model, const PointSet& pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> hits;  // point indices per anchor that occurs
  for (double a : model.anchors()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (pts[i][0] == a) idx.push_back(i);
    if (!idx.empty()) hits.push_back(std::move(idx));
  }
  TraceSet out(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << hits.size()); ++mask) {
    Trace t(n);
    for (std::size_t j = 0; j < hits.size(); ++j)
      if ((mask >> j) & 1u)
        for (auto i : hits[j]) t.set(i);
    out.insert(std::move(t));
  }
  return out;
}

/// Exact trace set of `pts` when the family has an enumerator.
inline std::optional<TraceSet> exact_traces(const FamilyHandle& family, const PointSet& pts) {
  require(pts.dim() == family.point_dim(), family.name() + ": point dimension mismatch");
  require(!pts.empty(), "exact_traces: empty point set");
  if (auto m = family.model_as<HalfPlaneModel>()) return halfplane_traces(*m, pts);
  if (auto m = family.model_as<ShiftedUnionModel>()) return shifted_union_traces(*m, pts);
  if (family.model_as<TLambdaModel>()) return dual_traces(pts);
  if (auto m = family.model_as<FinitePowersetModel>()) return finite_powerset_traces(*m, pts);
  if (family.model_as<XLambdaModel>()) {
    // X_lambda = [1, inf) for every lambda != 0.
    TraceSet out(pts.size());
    out.insert(trace(family, Params{1.0}, pts));
    return out;
  }
  if (auto m = family.model_as<UnionModel>()) {
    TraceSet out(pts.size());
    for (const auto& part : m->parts()) {
      auto t = exact_traces(part, pts);
      if (!t) return std::nullopt;
      out.merge(*t);
    }
    return out;
  }
  return std::nullopt;
}

inline bool has_exact_enumerator(const FamilyHandle& family) {
  if (auto m = family.model_as<UnionModel>())
    return std::all_of(m->parts().begin(), m->parts().end(), has_exact_enumerator);
  return family.model_as<HalfPlaneModel>() || family.model_as<ShiftedUnionModel>() ||
         family.model_as<TLambdaModel>() || family.model_as<FinitePowersetModel>() ||
         family.model_as<XLambdaModel>();
}

// ---------------------------------------------------------------------------
// Shatter profiles

enum class Method { exact, sampled };

inline std::string to_string(Method m) { return m == Method::exact ? "exact" : "sampled"; }

using PointSampler = std::function<PointSet(std::size_t, Rng&)>;

struct ShatterOptions {
  std::uint64_t seed = 1;
  std::size_t point_sets = 8;     // point sets tried per n
  std::size_t param_budget = 2000; // random parameters per point set (sampled method)
  bool use_exact = true;
  /// Draw one point set of the largest size per try and use its prefixes, so
  /// that the point sets are nested across n.
  bool nested = false;
  unsigned jobs = 1;
  PointSampler sampler;  // defaults to the family's own sampler
};

struct ShatterEntry {
  std::size_t n = 0;
  std::uint64_t delta_hat = 0;
  Method method = Method::sampled;
  std::size_t point_sets_tried = 0;
  std::size_t params_tried = 0;
  PointSet best_points;  // a point set achieving delta_hat
};

struct DensityFit {
  double exponent = 0.0;
  double constant = 1.0;
  double r2 = 1.0;
};

struct ShatterProfile {
  std::string family;
  std::uint64_t seed = 0;
  std::vector<ShatterEntry> entries;
  DensityFit fitted_density;

  std::optional<std::uint64_t> delta_at(std::size_t n) const {
    for (const auto& e : entries)
      if (e.n == n) return e.delta_hat;
    return std::nullopt;
  }
};

namespace detail {

enum : std::uint64_t { kTagPoints = 0x70, kTagParams = 0x71 };

inline PointSet draw_points(const FamilyHandle& family, const ShatterOptions& opt, std::size_t n, std::size_t attempt) {
  Rng rng(derive_seed(opt.seed, {kTagPoints, n, attempt}));
  return opt.sampler ? opt.sampler(n, rng) : family.sample_points(n, rng);
}

inline std::vector<Params> draw_params(const FamilyHandle& family, std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<Params> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(family.sample_params(rng));
  return out;
}

/// Trace set on one point set: exact when possible, else random search.
inline std::pair<TraceSet, Method> traces_for(const FamilyHandle& family, const PointSet& pts, const ShatterOptions& opt,
                                              std::uint64_t param_seed) {
  if (opt.use_exact)
    if (auto t = exact_traces(family, pts)) return {std::move(*t), Method::exact};
  require(opt.param_budget > 0, "shatter: parameter search budget must be positive");
  return {collect_traces(family, draw_params(family, param_seed, opt.param_budget), pts), Method::sampled};
}

}  // namespace detail

/// Lower bound on Delta(n): max trace count over sampled point sets.
inline ShatterEntry estimate_delta(const FamilyHandle& family, std::size_t n, const ShatterOptions& opt) {
  require(n >= 1, "estimate_delta: n must be positive");
  require(opt.point_sets > 0, "estimate_delta: budget must be positive");
  require((opt.use_exact && has_exact_enumerator(family)) || opt.param_budget > 0,
          "estimate_delta: parameter search budget must be positive");
  struct Slot {
    std::uint64_t count = 0;
    Method method = Method::sampled;
    PointSet pts;
  };
  auto slots = parallel_map(opt.point_sets, opt.jobs, [&](std::size_t attempt) {
    Slot s;
    s.pts = detail::draw_points(family, opt, n, attempt);
    auto [traces, method] = detail::traces_for(family, s.pts, opt, derive_seed(opt.seed, {detail::kTagParams, n, attempt}));
    s.count = traces.size();
    s.method = method;
    return s;
  });
  ShatterEntry e;
  e.n = n;
  e.point_sets_tried = opt.point_sets;
  e.method = slots.front().method;
  e.params_tried = e.method == Method::exact ? 0 : opt.param_budget * opt.point_sets;
  std::size_t best = 0;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i].count > slots[best].count) best = i;
  e.delta_hat = slots[best].count;
  e.best_points = std::move(slots[best].pts);
  return e;
}

/// Fits log Delta ~ log C + r log n after dropping the smallest quarter of
/// the n values (rounded up).
inline DensityFit fit_density(const ShatterProfile& profile) {
  auto entries = profile.entries;
  require(entries.size() >= 4, "fit_density: need at least 4 entries");
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  require(entries.back().n >= 10 * entries.front().n, "fit_density: n must span at least one decade");
  const std::size_t drop = (entries.size() + 3) / 4;
  std::vector<double> x, y;
  for (std::size_t i = drop; i < entries.size(); ++i) {
    x.push_back(std::log(static_cast<double>(entries[i].n)));
    y.push_back(std::log(static_cast<double>(std::max<std::uint64_t>(entries[i].delta_hat, 1))));
  }
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) return {0.0, std::exp(y.front()), 1.0};
  const auto f = fit_line(x, y);
  return {f.slope, std::exp(f.intercept), f.r2};
}

inline ShatterProfile shatter_profile(const FamilyHandle& family, const std::vector<std::size_t>& n_grid,
                                      const ShatterOptions& opt) {
  require(!n_grid.empty(), "shatter_profile: empty n grid");
  ShatterProfile prof;
  prof.family = family.name();
  prof.seed = opt.seed;
  if (!opt.nested) {
    for (auto n : n_grid) prof.entries.push_back(estimate_delta(family, n, opt));
  } else {
    const std::size_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
    std::vector<PointSet> bases;
    for (std::size_t attempt = 0; attempt < opt.point_sets; ++attempt)
      bases.push_back(detail::draw_points(family, opt, n_max, attempt));
    for (auto n : n_grid) {
      // One parameter seed per attempt for every n keeps the sampled
      // method monotone along the prefixes as well.
      ShatterEntry e;
      e.n = n;
      e.point_sets_tried = opt.point_sets;
      for (std::size_t attempt = 0; attempt < opt.point_sets; ++attempt) {
        const auto pts = bases[attempt].prefix(n);
        auto [traces, method] = detail::traces_for(family, pts, opt, derive_seed(opt.seed, {detail::kTagParams, attempt}));
        e.method = method;
        if (traces.size() > e.delta_hat || e.best_points.empty()) {
          e.delta_hat = std::max<std::uint64_t>(e.delta_hat, traces.size());
          e.best_points = pts;
        }
      }
      e.params_tried = e.method == Method::exact ? 0 : opt.param_budget * opt.point_sets;
      prof.entries.push_back(std::move(e));
    }
  }
  if (prof.entries.size() >= 4 && prof.entries.back().n >= 10 * prof.entries.front().n)
    prof.fitted_density = fit_density(prof);
  return prof;
}

// ---------------------------------------------------------------------------
// VC dimension

struct VcDimResult {
  std::size_t dim = 0;
  bool reached_budget = false;  // true means "at least dim"
  Method method = Method::exact;
  PointSet witness;
};

struct VcDimOptions {
  std::uint64_t seed = 1;
  std::size_t random_sets = 32;    // random point sets tried per m after the structured candidates
  std::size_t param_budget = 4000; // sampled method only
  unsigned jobs = 1;
  PointSampler sampler;
};

/// Largest m <= budget_dim for which a shattered m-set was found. Stops at
/// the first m without a witness (shattering is inherited by subsets).
inline VcDimResult vc_dim(const FamilyHandle& family, std::size_t budget_dim, const VcDimOptions& opt = {}) {
  require(budget_dim <= 20, "vc_dim: budget_dim must be at most 20");
  VcDimResult res;
  ShatterOptions so;
  so.seed = opt.seed;
  so.param_budget = opt.param_budget;
  so.sampler = opt.sampler;
  for (std::size_t m = 1; m <= budget_dim; ++m) {
    std::vector<PointSet> candidates = family.witness_candidates(m);
    for (std::size_t r = 0; r < opt.random_sets; ++r) candidates.push_back(detail::draw_points(family, so, m, r));
    std::vector<char> hit(candidates.size(), 0);
    std::vector<char> exact(candidates.size(), 1);
    parallel_for(candidates.size(), opt.jobs, [&](std::size_t i) {
      auto [traces, method] = detail::traces_for(family, candidates[i], so, derive_seed(opt.seed, {detail::kTagParams, m, i}));
      hit[i] = traces.shattered();
      exact[i] = method == Method::exact;
    });
    const auto found = std::find(hit.begin(), hit.end(), 1);
    if (found == hit.end()) return res;
    const auto idx = static_cast<std::size_t>(found - hit.begin());
    res.dim = m;
    res.witness = candidates[idx];
    if (!exact[idx]) res.method = Method::sampled;
  }
  res.reached_budget = true;
  return res;
}

// ---------------------------------------------------------------------------
// Dual shatter function

/// Distinct membership vectors of the probe points with respect to the given
/// members; each vector witnesses one nonempty atom.
inline TraceSet dual_atoms(const FamilyHandle& family, const std::vector<Params>& members, const PointSet& probes) {
  require(!members.empty(), "dual_atoms: need at least one member");
  for (const auto& p : members) family.validate_params(p);
  require(probes.dim() == family.point_dim(), family.name() + ": probe dimension mismatch");
  TraceSet out(members.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    Trace t(members.size());
    for (std::size_t j = 0; j < members.size(); ++j)
      if (family.contains(members[j], probes[i])) t.set(j);
    out.insert(std::move(t));
  }
  return out;
}

struct DualShatterOptions {
  std::uint64_t seed = 1;
  std::size_t probe_budget = 20000;
};

/// Lower bound on the atom count of m random members.
inline std::size_t dual_shatter(const FamilyHandle& family, std::size_t m, const DualShatterOptions& opt = {}) {
  require(m >= 1, "dual_shatter: m must be positive");
  auto members = detail::draw_params(family, derive_seed(opt.seed, {0xd0, m}), m);
  Rng rng(derive_seed(opt.seed, {0xd1, m}));
  return dual_atoms(family, members, family.sample_points(opt.probe_budget, rng)).size();
}

// ---------------------------------------------------------------------------
// Sauer-Shelah and unions

/// sum_{j=0}^{v} C(n, j), exact.
inline BigInt sauer_bound(std::uint64_t n, std::uint64_t v) {
  require(v <= n, "sauer_bound: need v <= n");
  // 64-bit fast path, abandoned on the first step that could overflow.
  std::uint64_t term = 1, sum = 1;
  bool fits = true;
  for (std::uint64_t j = 1; j <= v && fits; ++j) {
    const unsigned __int128 next = static_cast<unsigned __int128>(term) * (n - j + 1);
    term = static_cast<std::uint64_t>(next / j);
    const unsigned __int128 s = static_cast<unsigned __int128>(sum) + term;
    if (next / j > UINT64_MAX || s > UINT64_MAX) fits = false;
    sum = static_cast<std::uint64_t>(s);
  }
  if (fits) return BigInt(sum);
  BigInt t = 1, total = 1;
  for (std::uint64_t j = 1; j <= v; ++j) {
    t = t * (n - j + 1) / j;
    total += t;
  }
  return total;
}

/// True iff the union's Delta-hat is at most the sum of the components' at
/// every n. All profiles must share the same n grid.
inline bool union_bound_check(const std::vector<ShatterProfile>& parts, const ShatterProfile& whole) {
  require(!parts.empty(), "union_bound_check: no component profiles");
  for (const auto& p : parts) {
    require(p.entries.size() == whole.entries.size(), "union_bound_check: mismatched n grids");
    for (std::size_t i = 0; i < p.entries.size(); ++i)
      require(p.entries[i].n == whole.entries[i].n, "union_bound_check: mismatched n grids");
  }
  for (std::size_t i = 0; i < whole.entries.size(); ++i) {
    std::uint64_t sum = 0;
    for (const auto& p : parts) sum += p.entries[i].delta_hat;
    if (whole.entries[i].delta_hat > sum) return false;
  }
  return true;
}

}  // namespace vclab
