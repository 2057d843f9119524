#pragma once

// Empirical L^p covering numbers of function classes.
//
// A curve is measured on a finite sample of M members and an empirical
// measure Q on n support points, so every count lower-bounds the covering
// number of the class itself. Covers use centers from the sample (closed
// balls, D <= eps); packings are eps-separated (D > eps).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vclab/core.hpp"
#include "vclab/families.hpp"
#include "vclab/fit.hpp"
#include "vclab/parallel.hpp"
#include "vclab/rng.hpp"

namespace vclab {

struct EmpiricalMeasure {
  PointSet support;  // uniform weights 1/n

  std::size_t size() const { return support.size(); }
  double weight() const { return 1.0 / static_cast<double>(support.size()); }
};

/// values[i][k] = f_i(x_k), stored row-major.
struct ValueMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  ValueMatrix() = default;
  ValueMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
};

inline ValueMatrix evaluate_class(const FamilyHandle& family, const std::vector<Params>& params, const EmpiricalMeasure& q,
                                  unsigned jobs = 1) {
  require(family.has_evaluator(), family.name() + ": covering numbers need a function class");
  require(q.size() > 0, "evaluate_class: empty measure");
  require(q.support.dim() + 1 == family.point_dim(), family.name() + ": measure lives in the wrong dimension");
  for (const auto& p : params) family.validate_params(p);
  ValueMatrix v(params.size(), q.size());
  parallel_for(params.size(), jobs, [&](std::size_t i) {
    double* r = v.row(i);
    for (std::size_t k = 0; k < q.size(); ++k) r[k] = family.evaluate(params[i], q.support[k]);
  });
  return v;
}

inline double lp_distance(const double* f, const double* g, std::size_t n, int p) {
  double s = 0.0;
  if (p == 1) {
    for (std::size_t k = 0; k < n; ++k) s += std::abs(f[k] - g[k]);
    return s / static_cast<double>(n);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double d = f[k] - g[k];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(n));
}

using DistMatrix = std::vector<std::vector<double>>;

inline DistMatrix pairwise_dist(const ValueMatrix& v, int p, unsigned jobs = 1) {
  require(p == 1 || p == 2, "pairwise_dist: p must be 1 or 2");
  DistMatrix d(v.rows, std::vector<double>(v.rows, 0.0));
  parallel_for(v.rows, jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < v.rows; ++j)
      if (j != i) d[i][j] = lp_distance(v.row(i), v.row(j), v.cols, p);
  });
  return d;
}

inline DistMatrix pairwise_dist(const FamilyHandle& family, const std::vector<Params>& params, const EmpiricalMeasure& q,
                                int p, unsigned jobs = 1) {
  return pairwise_dist(evaluate_class(family, params, q, jobs), p, jobs);
}

/// ||F||_{p,Q} for the pointwise envelope F = max_i |f_i| of the sample.
inline double envelope_norm(const ValueMatrix& v, int p) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.cols; ++k) {
    double e = 0.0;
    for (std::size_t i = 0; i < v.rows; ++i) e = std::max(e, std::abs(v.row(i)[k]));
    s += p == 1 ? e : e * e;
  }
  s /= static_cast<double>(v.cols);
  return p == 1 ? s : std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Cover and packing on an abstract "within" relation

/// Greedy set cover: repeatedly take the member whose ball holds the most
/// still-uncovered members (lowest index on ties).
template <class Within>
std::size_t greedy_cover_by(std::size_t m, Within&& within) {
  std::vector<std::uint32_t> gain(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (within(i, j)) ++gain[i];
  std::vector<char> covered(m, 0);
  std::size_t remaining = m, centers = 0;
  while (remaining > 0) {
    const auto best = static_cast<std::size_t>(std::max_element(gain.begin(), gain.end()) - gain.begin());
    ++centers;
    for (std::size_t j = 0; j < m; ++j) {
      if (covered[j] || !within(best, j)) continue;
      covered[j] = 1;
      --remaining;
      for (std::size_t i = 0; i < m; ++i)
        if (within(i, j)) --gain[i];
    }
  }
  return centers;
}

/// Maximal separated set built in index order: member i joins unless it is
/// within reach of a member already taken.
template <class Within>
std::size_t greedy_packing_by(std::size_t m, Within&& within) {
  std::vector<std::size_t> taken;
  for (std::size_t i = 0; i < m; ++i) {
    bool ok = true;
    for (auto c : taken)
      if (within(i, c)) {
        ok = false;
        break;
      }
    if (ok) taken.push_back(i);
  }
  return taken.size();
}

inline std::size_t greedy_cover(const DistMatrix& d, double eps) {
  return greedy_cover_by(d.size(), [&](std::size_t i, std::size_t j) { return d[i][j] <= eps; });
}

inline std::size_t greedy_packing(const DistMatrix& d, double eps) {
  return greedy_packing_by(d.size(), [&](std::size_t i, std::size_t j) { return d[i][j] <= eps; });
}

// ---------------------------------------------------------------------------
// Entropy curves

struct EntropyEntry {
  double epsilon = 0.0;  // relative radius, in units of ||F||_{p,Q}
  std::size_t n_cover = 0;
  std::size_t n_pack_lower = 0;
  std::size_t n_pack_double = 0;  // packing lower bound at 2 epsilon
};

struct EntropyCurve {
  std::string family;
  int p = 1;
  double envelope_norm = 0.0;
  std::size_t sample_size = 0;  // number of members M
  std::vector<EntropyEntry> entries;
};

/// Geometric grid of `count` relative radii from lo to hi.
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  require(count >= 2 && lo > 0.0 && hi > lo, "geometric_grid: bad range");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  return g;
}

inline std::vector<double> default_epsilons() { return geometric_grid(0.02, 0.3, 12); }

/// Curve over the relative radii `eps` (increasing). Distances are bucketed
/// into one byte per pair against the thresholds {e ||F||} and {2e ||F||},
/// which is all covers and packings ever look at.
inline EntropyCurve entropy_curve(const ValueMatrix& v, std::vector<double> eps, int p, unsigned jobs = 1) {
  require(p == 1 || p == 2, "entropy_curve: p must be 1 or 2");
  require(v.rows > 0 && v.cols > 0, "entropy_curve: empty value matrix");
  require(!eps.empty(), "entropy_curve: no radii");
  std::sort(eps.begin(), eps.end());
  EntropyCurve curve;
  curve.p = p;
  curve.sample_size = v.rows;
  curve.envelope_norm = envelope_norm(v, p);
  const double scale = curve.envelope_norm > 0.0 ? curve.envelope_norm : 1.0;

  std::vector<double> thresholds;
  for (double e : eps) {
    thresholds.push_back(e * scale);
    thresholds.push_back(2.0 * e * scale);
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  require(thresholds.size() < 255, "entropy_curve: too many radii");
  auto level_of = [&](double t) {
    return static_cast<std::uint8_t>(std::lower_bound(thresholds.begin(), thresholds.end(), t) - thresholds.begin());
  };

  // level(i,j) = number of thresholds strictly below D(i,j), so that
  // D(i,j) <= thresholds[k] iff level(i,j) <= k.
  const std::size_t m = v.rows;
  std::vector<std::uint8_t> level(m * m, 0);
  parallel_for(m, jobs, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = lp_distance(v.row(i), v.row(j), v.cols, p);
      level[i * m + j] = static_cast<std::uint8_t>(std::lower_bound(thresholds.begin(), thresholds.end(), d) - thresholds.begin());
    }
  });
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) level[i * m + j] = level[j * m + i];

  auto within_at = [&](std::uint8_t k) {
    return [&level, m, k](std::size_t i, std::size_t j) { return level[i * m + j] <= k; };
  };
  for (double e : eps) {
    const auto within = within_at(level_of(e * scale));
    const std::size_t pack = greedy_packing_by(m, within);
    // A maximal e-separated set is itself an e-cover.
    const std::size_t cover = std::min(greedy_cover_by(m, within), pack);
    curve.entries.push_back({e, cover, pack, greedy_packing_by(m, within_at(level_of(2.0 * e * scale)))});
  }
  // A cover at a smaller radius is a cover at every larger one.
  for (std::size_t i = 1; i < curve.entries.size(); ++i)
    curve.entries[i].n_cover = std::min(curve.entries[i].n_cover, curve.entries[i - 1].n_cover);
  return curve;
}

struct EntropyOptions {
  std::uint64_t seed = 1;
  std::size_t members = 4000;   // M, sampled parameter vectors
  std::size_t support = 100;    // n, support points of Q
  int p = 1;
  std::vector<double> epsilons = default_epsilons();
  unsigned jobs = 1;
};

inline EmpiricalMeasure sample_measure(const FamilyHandle& family, std::size_t n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0xe0, n}));
  return {family.sample_inputs(n, rng)};
}

inline std::vector<Params> sample_members(const FamilyHandle& family, std::size_t m, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0xe1, m}));
  std::vector<Params> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(family.sample_params(rng));
  return out;
}

inline EntropyCurve entropy_curve(const FamilyHandle& family, const EntropyOptions& opt) {
  const auto q = sample_measure(family, opt.support, opt.seed);
  const auto members = sample_members(family, opt.members, opt.seed);
  auto curve = entropy_curve(evaluate_class(family, members, q, opt.jobs), opt.epsilons, opt.p, opt.jobs);
  curve.family = family.name();
  return curve;
}

/// Random non-decreasing step functions into [0,1] on the grid (k+0.5)/n:
/// each has `jumps` jumps at uniform grid positions with uniform heights,
/// normalized to end at a uniform level in [0,1].
inline ValueMatrix monotone_class_values(std::size_t members, std::size_t grid, std::size_t jumps, std::uint64_t seed) {
  ValueMatrix v(members, grid);
  Rng rng(derive_seed(seed, {0xe2, members, grid, jumps}));
  std::vector<double> inc(grid);
  for (std::size_t i = 0; i < members; ++i) {
    std::fill(inc.begin(), inc.end(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < jumps; ++j) {
      const double h = rng.uniform();
      inc[rng.below(grid)] += h;
      total += h;
    }
    const double top = rng.uniform();
    double acc = 0.0;
    double* r = v.row(i);
    for (std::size_t k = 0; k < grid; ++k) {
      acc += inc[k];
      r[k] = total > 0.0 ? top * acc / total : 0.0;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Exponent fits

struct CoverFit {
  double b_hat = 0.0;   // slope of log N against log(1/eps)
  double a_hat = 1.0;   // exp(intercept)
  double r2 = 1.0;
  double rss_power = 0.0;
  // log N = log K1 + K2 eps^{-v}
  double k1 = 1.0, k2 = 0.0, v = 1.0;
  double rss_exp = 0.0;
  bool exp_form_better = false;
  double max_residual = 0.0;  // largest positive residual of the power fit
  std::size_t points_used = 0;
};

/// Fits the curve entries with 1 < N <= M/10 (above that the finite sample
/// saturates). The exponential form scans v over [0.5, 2].
inline CoverFit fit_cover_exponent(const EntropyCurve& curve) {
  std::vector<double> x, y, eps;
  const double cap = static_cast<double>(curve.sample_size) / 10.0;
  for (const auto& e : curve.entries) {
    const auto n = static_cast<double>(e.n_cover);
    if (n <= cap && n > 1.0) {
      x.push_back(std::log(1.0 / e.epsilon));
      y.push_back(std::log(n));
      eps.push_back(e.epsilon);
    }
  }
  CoverFit fit;
  fit.points_used = x.size();
  if (x.empty() && !curve.entries.empty() &&
      std::all_of(curve.entries.begin(), curve.entries.end(), [](const auto& e) { return e.n_cover == 1; }))
    return fit;  // constant class
  if (x.size() < 4) throw ContractError("fit_cover_exponent: fewer usable points than the fits need");
  const auto power = fit_line(x, y);
  fit.b_hat = power.slope;
  fit.a_hat = std::exp(power.intercept);
  fit.r2 = power.r2;
  fit.rss_power = power.rss;
  for (double r : power.residuals) fit.max_residual = std::max(fit.max_residual, r);

  fit.rss_exp = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= 150; ++step) {
    const double v = 0.5 + 0.01 * step;
    std::vector<double> z;
    for (double e : eps) z.push_back(std::pow(e, -v));
    const auto f = fit_line(z, y);
    if (f.rss < fit.rss_exp) {
      fit.rss_exp = f.rss;
      fit.v = v;
      fit.k1 = std::exp(f.intercept);
      fit.k2 = f.slope;
    }
  }
  fit.exp_form_better = fit.rss_exp < fit.rss_power;
  return fit;
}

struct CertificateCheck {
  int d = 0;
  double eta = 0.5;
  double a = 1.0;  // constant used in A (1/eps)^{d+eta}
  double b_hat = 0.0;
  bool violation = false;
  std::vector<double> violating_epsilons;
  std::string note =
      "measured covering numbers come from a finite sample of the class, so this check can expose "
      "implementation errors but cannot confirm the bound";
};

/// Compares the fitted curve with A (1/eps)^{d+eta}, A being the fitted
/// constant lifted so the power fit dominates its own data points.
inline CertificateCheck certificate_compare(const EntropyCurve& curve, int d, double eta = 0.5) {
  CertificateCheck c;
  c.d = d;
  c.eta = eta;
  const auto fit = fit_cover_exponent(curve);
  c.b_hat = fit.b_hat;
  c.a = fit.a_hat * std::exp(fit.max_residual);
  const double cap = static_cast<double>(curve.sample_size) / 10.0;
  for (const auto& e : curve.entries) {
    if (static_cast<double>(e.n_cover) > cap) continue;
    const double bound = c.a * std::pow(1.0 / e.epsilon, static_cast<double>(d) + eta);
    if (static_cast<double>(e.n_cover) > bound * (1.0 + 1e-12)) {
      c.violation = true;
      c.violating_epsilons.push_back(e.epsilon);
    }
  }
  return c;
}

}  // namespace vclab
