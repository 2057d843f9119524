#pragma once

// Brute-force reference computations, written independently of the fast
// engines and used to cross-check them on small instances.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "vclab/core.hpp"
#include "vclab/families.hpp"

namespace vclab::oracle {

/// Traces of the Box-Cox subgraphs on `pts` over a dense lambda grid: grid_size
/// values tan(pi (u - 1/2)) for u uniform on (0,1), plus both sides of every
/// root of (x^l - 1)/l = t, located with TOMS 748. Membership is evaluated
/// directly from the subgraph inequality.
inline TraceSet lambda_grid_traces(const PointSet& pts, std::size_t grid_size) {
  const auto family = t_lambda_family();
  std::vector<double> lambdas;
  lambdas.reserve(grid_size + 4 * pts.size());
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_size);
    lambdas.push_back(std::tan(std::numbers::pi * (u - 0.5)));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = pts[i][0], t = pts[i][1];
    if (x == 1.0 || t == 0.0 || (x > 1.0) != (t > 0.0)) continue;
    auto g = [x, t](double l) { return (l == 0.0 ? std::log(x) : std::expm1(l * std::log(x)) / l) - t; };
    double lo = -1.0, hi = 1.0;
    while (g(hi) < 0.0) hi *= 2.0;
    while (g(lo) > 0.0) lo *= 2.0;
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    const double r = 0.5 * (a + b);
    const double step = 1e-9 * std::max(1.0, std::abs(r));
    lambdas.push_back(r - step);
    lambdas.push_back(r + step);
  }
  TraceSet out(pts.size());
  for (double l : lambdas) {
    if (l == 0.0) continue;
    out.insert(trace(family, Params{l}, pts));
  }
  return out;
}

/// Half-plane traces from the separators through every pair of points: each
/// line through p and q is shifted both ways and rotated both ways about the
/// midpoint by amounts small enough not to cross any other point, with both
/// orientations, plus the empty and full sets.
inline TraceSet halfplane_pair_traces(const HalfPlaneModel& model, const PointSet& pts) {
  const std::size_t n = pts.size();
  TraceSet out(n);
  auto add = [&](double a, double b, double c) {
    for (double s : {1.0, -1.0}) {
      const Params p{s * a, s * b, s * c};
      if (!model.admits(p[1])) continue;
      Trace t(n);
      for (std::size_t i = 0; i < n; ++i)
        if (model.contains(p, pts[i])) t.set(i);
      out.insert(std::move(t));
    }
  };
  out.insert(Trace(n));
  Trace full(n);
  for (std::size_t i = 0; i < n; ++i) full.set(i);
  out.insert(full);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double px = pts[i][0], py = pts[i][1], qx = pts[j][0], qy = pts[j][1];
      const double dx = qx - px, dy = qy - py;
      const double len = std::hypot(dx, dy);
      if (len == 0.0) continue;
      // Unit normal (a,b); line a x + b y + c = 0 through p and q.
      const double a = -dy / len, b = dx / len, c = -(a * px + b * py);
      double gap = len;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double dist = std::abs(a * pts[k][0] + b * pts[k][1] + c);
        if (dist > 1e-12 * len) gap = std::min(gap, dist);
      }
      const double shift = gap * 1e-3;
      const double mx = 0.5 * (px + qx), my = 0.5 * (py + qy);
      double reach = 0.0;
      for (std::size_t k = 0; k < n; ++k) reach = std::max(reach, std::hypot(pts[k][0] - mx, pts[k][1] - my));
      const double angle = shift / std::max(reach, 1e-300);
      add(a, b, c + shift);
      add(a, b, c - shift);
      for (double sgn : {1.0, -1.0}) {
        const double ca = std::cos(sgn * angle), sa = std::sin(sgn * angle);
        const double ra = a * ca - b * sa, rb = a * sa + b * ca;
        add(ra, rb, -(ra * mx + rb * my));
      }
    }
  return out;
}

/// Shifted-union traces at the breakpoint-induced shifts a - e (a a point, e
/// an endpoint of J), the midpoints between consecutive ones, and two
/// sentinels, evaluated through the family's membership predicate.
inline TraceSet shifted_union_shift_traces(const FamilyHandle& family, const ShiftedUnionModel& model, const PointSet& pts) {
  std::vector<double> cands;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (double e : model.shifted_union().endpoints()) cands.push_back(pts[i][0] - e);
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  std::vector<double> shifts = cands;
  for (std::size_t i = 0; i + 1 < cands.size(); ++i) shifts.push_back(0.5 * (cands[i] + cands[i + 1]));
  shifts.push_back(cands.front() - 1.0);
  shifts.push_back(cands.back() + 1.0);
  TraceSet out(pts.size());
  for (double s : shifts) out.insert(trace(family, Params{s}, pts));
  return out;
}

/// Subsets realized by some member, by testing all 2^n subsets against the
/// given trace list (n <= 20).
inline std::size_t realizable_subsets(const TraceSet& candidates) {
  const std::size_t n = candidates.point_count();
  require(n <= 20, "realizable_subsets: n too large");
  std::size_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
    if (candidates.contains(Trace::from_mask(n, mask))) ++count;
  return count;
}

/// Minimum number of sample points whose closed eps-balls cover all m points,
/// by exhaustive search over subsets of increasing size (m <= 20).
inline std::size_t min_cover(const std::vector<std::vector<double>>& dist, double eps) {
  const std::size_t m = dist.size();
  require(m <= 20, "min_cover: too many points");
  if (m == 0) return 0;
  std::vector<std::uint32_t> reach(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (dist[i][j] <= eps) reach[i] |= 1u << j;
  const std::uint32_t all = m == 32 ? ~0u : (1u << m) - 1;
  std::size_t best = m;
  for (std::uint32_t mask = 1; mask <= all; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size >= best) continue;
    std::uint32_t covered = 0;
    for (std::size_t i = 0; i < m; ++i)
      if ((mask >> i) & 1u) covered |= reach[i];
    if (covered == all) best = size;
  }
  return best;
}

}  // namespace vclab::oracle
