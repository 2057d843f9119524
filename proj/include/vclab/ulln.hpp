#pragma once

// Monte-Carlo study of sup_f |P_n f - P f| over a finite grid of class
// members, as the sample size grows.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vclab/core.hpp"
#include "vclab/families.hpp"
#include "vclab/fit.hpp"
#include "vclab/parallel.hpp"
#include "vclab/rng.hpp"

namespace vclab {

/// A finite grid of functions, a data law and the exact means P f.
struct UllnProblem {
  std::string name;
  std::size_t data_dim = 1;
  std::function<void(Rng&, double*)> draw;  // writes one data point
  /// Adds f_j(x) to sums[j] for every grid member j.
  std::function<void(const double*, double*)> accumulate;
  std::vector<double> reference;  // P f_j
  /// Grid members [0, subgrid) form the coarser grid used for the
  /// refinement-monotonicity check.
  std::size_t subgrid = 0;

  std::size_t grid_size() const { return reference.size(); }
};

/// Evaluates the whole grid on `probes` data points and rejects the problem
/// if any value is non-finite or an evaluation throws.
inline void check_envelope(const UllnProblem& prob, std::size_t probes, std::uint64_t seed, double bound) {
  Rng rng(derive_seed(seed, {0xf0}));
  std::vector<double> x(prob.data_dim), v(prob.grid_size());
  try {
    for (std::size_t i = 0; i < probes; ++i) {
      prob.draw(rng, x.data());
      std::fill(v.begin(), v.end(), 0.0);
      prob.accumulate(x.data(), v.data());
      for (double f : v)
        if (!std::isfinite(f) || std::abs(f) > bound) throw ConfigError(prob.name + ": unbounded envelope on the data support");
    }
  } catch (const ContractError& e) {
    throw ConfigError(prob.name + ": class not bounded on the data support (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------
// Problems

/// Mean of T_lambda under uniform(a, b).
inline double t_lambda_uniform_mean(double lambda, double a, double b) {
  require(lambda != 0.0, "t_lambda mean: lambda must be nonzero");
  if (lambda == -1.0) return (std::log(b / a) / (b - a) - 1.0) / lambda;
  const double l1 = lambda + 1.0;
  return ((std::pow(b, l1) - std::pow(a, l1)) / (l1 * (b - a)) - 1.0) / lambda;
}

inline double t_lambda_uniform_mean_quadrature(double lambda, double a, double b) {
  auto f = [lambda](double x) { return box_cox(lambda, x); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14) / (b - a);
}

/// T_lambda for lambda = (j - 200)/100, j = 0..400 without lambda = 0, under
/// uniform(a, b) with a > 0. Powers are advanced multiplicatively along the
/// grid and re-anchored every 64 steps.
inline UllnProblem t_lambda_ulln_problem(double a = 0.5, double b = 2.0, double lambda_max = 2.0, double step = 0.01) {
  if (!(a > 0.0 && b > a)) throw ConfigError("t_lambda ulln: data law needs 0 < a < b (T_lambda is unbounded near 0 for lambda < 0)");
  const auto count = static_cast<std::size_t>(std::llround(2.0 * lambda_max / step));
  std::vector<double> lambdas;
  for (std::size_t j = 0; j <= count; ++j) {
    const double l = (static_cast<double>(j) - static_cast<double>(count) / 2.0) * step;
    if (std::abs(l) > step / 2.0) lambdas.push_back(l);
  }
  UllnProblem p;
  p.name = "t_lambda";
  p.data_dim = 1;
  p.draw = [a, b](Rng& rng, double* x) { x[0] = rng.uniform(a, b); };
  for (double l : lambdas) p.reference.push_back(t_lambda_uniform_mean(l, a, b));
  // Even positions (step 0.02) are moved to the front to form the subgrid.
  std::vector<std::size_t> order(lambdas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_partition(order.begin(), order.end(), [](std::size_t i) { return i % 2 == 0; });
  p.subgrid = (lambdas.size() + 1) / 2;
  std::vector<double> ref(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) ref[i] = p.reference[order[i]];
  p.reference = ref;
  auto slot = std::make_shared<std::vector<std::size_t>>(lambdas.size());
  for (std::size_t i = 0; i < order.size(); ++i) (*slot)[order[i]] = i;
  p.accumulate = [lambdas, slot, step](const double* x, double* sums) {
    const double lx = std::log(x[0]);
    const double mult = std::exp(step * lx);
    double pw = 0.0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      if (j % 64 == 0 || (j > 0 && lambdas[j] - lambdas[j - 1] > 1.5 * step)) pw = std::exp(lambdas[j] * lx);
      else pw *= mult;
      sums[(*slot)[j]] += (pw - 1.0) / lambdas[j];
    }
  };
  return p;
}

/// The piecewise link with constants precomputed for repeated evaluation.
struct LinkMember {
  std::vector<double> a, b, beta;
  LinkTails tails{};

  LinkMember(std::span<const double> a_, std::span<const double> b_, std::span<const double> beta_)
      : a(a_.begin(), a_.end()), b(b_.begin(), b_.end()), beta(beta_.begin(), beta_.end()) {
    check_link_knots(a, b);
    tails = link_tails(a, b);
  }
  double eta(double u) const {
    const std::size_t k = a.size();
    if (u <= a[0]) return tails.B1 * std::exp(tails.c1 * (u - a[0]));
    if (u >= a[k - 1]) return 1.0 - tails.Bk * std::exp(-tails.ck * (u - a[k - 1]));
    const auto i = static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), u) - a.begin()) - 1;
    return b[i] + (b[i + 1] - b[i]) * (u - a[i]) / (a[i + 1] - a[i]);
  }
  double operator()(const double* x) const {
    double u = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) u += beta[j] * x[j];
    return eta(u);
  }
};

/// E eta(beta . X) for X uniform on [-1,1]^d, d <= 2: integrates eta against
/// the (trapezoidal) density of beta . X piece by piece.
inline double link_uniform_mean(const LinkMember& f) {
  const std::size_t d = f.beta.size();
  require(d == 1 || d == 2, "link mean: only d = 1 or 2 is supported");
  double w1 = std::abs(f.beta[0]), w2 = d == 2 ? std::abs(f.beta[1]) : 0.0;
  if (w1 < w2) std::swap(w1, w2);
  if (w1 == 0.0) return f.eta(0.0);
  auto density = [w1, w2](double u) {
    if (w2 == 0.0) return std::abs(u) <= w1 ? 0.5 / w1 : 0.0;
    const double overlap = std::min(w1, u + w2) - std::max(-w1, u - w2);
    return overlap > 0.0 ? overlap / (4.0 * w1 * w2) : 0.0;
  };
  const double lo = -(w1 + w2), hi = w1 + w2;
  std::vector<double> cuts{lo, hi, -(w1 - w2), w1 - w2};
  for (double k : f.a) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = std::max(cuts[i], lo), h = std::min(cuts[i + 1], hi);
    if (h <= l) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double u) { return f.eta(u) * density(u); }, l, h, 10, 1e-13);
  }
  return total;
}

/// `members` random piecewise links (the family's sampling box), data
/// uniform on [-1,1]^d.
inline UllnProblem piecewise_link_ulln_problem(std::size_t k, std::size_t d, std::size_t members, std::uint64_t seed) {
  const auto family = piecewise_link_family(k, d);
  const auto& model = *family.model_as<PiecewiseLinkModel>();
  Rng rng(derive_seed(seed, {0xf1, k, d}));
  auto grid = std::make_shared<std::vector<LinkMember>>();
  UllnProblem p;
  p.name = "piecewise_link";
  p.data_dim = d;
  for (std::size_t i = 0; i < members; ++i) {
    const auto params = family.sample_params(rng);
    grid->emplace_back(model.a(params), model.b(params), model.beta(params));
    p.reference.push_back(link_uniform_mean(grid->back()));
  }
  p.subgrid = members / 2;
  p.draw = [d](Rng& r, double* x) {
    for (std::size_t j = 0; j < d; ++j) x[j] = r.uniform(-1.0, 1.0);
  };
  p.accumulate = [grid](const double* x, double* sums) {
    for (std::size_t j = 0; j < grid->size(); ++j) sums[j] += (*grid)[j](x);
  };
  return p;
}

/// f = c, one member.
inline UllnProblem constant_ulln_problem(double c) {
  UllnProblem p;
  p.name = "constant";
  p.draw = [](Rng& rng, double* x) { x[0] = rng.uniform(); };
  p.accumulate = [c](const double*, double* sums) { sums[0] += c; };
  p.reference = {c};
  p.subgrid = 1;
  return p;
}

/// One fixed function, f(x) = x under uniform(0,1): the classical LLN.
inline UllnProblem single_function_ulln_problem() {
  UllnProblem p;
  p.name = "identity";
  p.draw = [](Rng& rng, double* x) { x[0] = rng.uniform(); };
  p.accumulate = [](const double* x, double* sums) { sums[0] += x[0]; };
  p.reference = {0.5};
  p.subgrid = 1;
  return p;
}

// ---------------------------------------------------------------------------
// Runs

/// Each replication is one sample path of length max(n_grid); sup_dev at n
/// is read off its first n points, so the n-grid is observed along the same
/// path as in a sequential experiment.
struct UllnConfig {
  std::vector<std::size_t> n_grid{100, 1000, 10000, 100000};
  std::size_t reps = 50;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

struct UllnRun {
  std::string name;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 0;
  std::size_t grid_size = 0;
  std::vector<std::vector<double>> sup_dev;     // [n index][rep]
  std::vector<std::vector<double>> sub_sup_dev; // same over the subgrid
};

inline UllnRun run_ulln(const UllnProblem& prob, const UllnConfig& cfg) {
  require(!cfg.n_grid.empty() && cfg.reps > 0, "run_ulln: empty design");
  require(std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end()) && cfg.n_grid.front() > 0,
          "run_ulln: n grid must be positive and increasing");
  require(prob.grid_size() > 0 && prob.subgrid <= prob.grid_size(), "run_ulln: bad parameter grid");
  UllnRun run;
  run.name = prob.name;
  run.n_grid = cfg.n_grid;
  run.reps = cfg.reps;
  run.grid_size = prob.grid_size();
  struct Cell {
    double sup = 0.0, sub = 0.0;
  };
  auto out = parallel_map(cfg.reps, cfg.jobs, [&](std::size_t rep) {
    Rng rng(derive_seed(cfg.seed, {0xf2, rep}));
    std::vector<double> sums(prob.grid_size(), 0.0), x(prob.data_dim);
    std::vector<Cell> cells;
    std::size_t drawn = 0;
    for (const std::size_t n : cfg.n_grid) {
      for (; drawn < n; ++drawn) {
        prob.draw(rng, x.data());
        prob.accumulate(x.data(), sums.data());
      }
      Cell cell;
      for (std::size_t j = 0; j < sums.size(); ++j) {
        const double dev = std::abs(sums[j] / static_cast<double>(n) - prob.reference[j]);
        cell.sup = std::max(cell.sup, dev);
        if (j < prob.subgrid) cell.sub = std::max(cell.sub, dev);
      }
      cells.push_back(cell);
    }
    return cells;
  });
  run.sup_dev.assign(cfg.n_grid.size(), std::vector<double>(cfg.reps));
  run.sub_sup_dev = run.sup_dev;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep)
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
      run.sup_dev[i][rep] = out[rep][i].sup;
      run.sub_sup_dev[i][rep] = out[rep][i].sub;
    }
  return run;
}

struct RateFit {
  bool degenerate = false;  // all medians zero, alpha undefined
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double c = 0.0;
  double r2 = 0.0;
  std::vector<double> medians;
  std::vector<double> ratios;      // median / (log n / sqrt n)
  std::vector<double> max_ratios;  // max over reps of sup_dev / (log n / sqrt n)
  bool ratio_non_increasing = false;
};

inline double log_rate(std::size_t n) {
  const double x = static_cast<double>(n);
  return std::log(x) / std::sqrt(x);
}

inline RateFit fit_rate(const UllnRun& run) {
  RateFit f;
  for (std::size_t i = 0; i < run.n_grid.size(); ++i) {
    const double med = median(run.sup_dev[i]);
    f.medians.push_back(med);
    f.ratios.push_back(med / log_rate(run.n_grid[i]));
    f.max_ratios.push_back(*std::max_element(run.sup_dev[i].begin(), run.sup_dev[i].end()) / log_rate(run.n_grid[i]));
  }
  f.ratio_non_increasing = true;
  for (std::size_t i = 1; i < f.ratios.size(); ++i)
    if (f.ratios[i] > f.ratios[i - 1]) f.ratio_non_increasing = false;
  if (std::any_of(f.medians.begin(), f.medians.end(), [](double m) { return m <= 0.0; })) {
    f.degenerate = true;
    return f;
  }
  require(run.n_grid.size() >= 2, "fit_rate: need at least two sample sizes");
  std::vector<double> n(run.n_grid.begin(), run.n_grid.end());
  const auto pw = fit_power(n, f.medians);
  f.alpha = -pw.exponent;
  f.c = pw.constant;
  f.r2 = pw.r2;
  return f;
}

/// Doubles a grid of random members until the median sup deviation at
/// n = probe_n moves by less than `tol` (relative). `make(G)` must return a
/// problem whose first G/2 members equal those of make(G/2).
inline std::size_t refine_grid(const std::function<UllnProblem(std::size_t)>& make, std::size_t start, std::size_t max_size,
                               std::size_t probe_n, std::size_t reps, std::uint64_t seed, double tol = 0.02) {
  UllnConfig cfg;
  cfg.n_grid = {probe_n};
  cfg.reps = reps;
  cfg.seed = seed;
  double prev = median(run_ulln(make(start), cfg).sup_dev[0]);
  std::size_t g = start;
  while (2 * g <= max_size) {
    const double next = median(run_ulln(make(2 * g), cfg).sup_dev[0]);
    const double change = prev > 0.0 ? std::abs(next - prev) / prev : 0.0;
    g *= 2;
    if (change < tol) break;
    prev = next;
  }
  return g;
}

}  // namespace vclab
