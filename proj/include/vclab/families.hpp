#pragma once

// Built-in parametric families. Each is a FamilyModel exposed through a
// FamilyHandle and reports the VC-density bound given by its parameter count.
//
// Sampling boxes (used for random parameter search and entropy sampling;
// compactness is a measurement choice, the families themselves accept any
// parameter in their domain):
//   t_lambda          lambda in [-3,3] \ {0}; points x log-uniform on (0.1,10), t in (-3,3)
//   halfplane         unit normal at a uniform angle, offset in [-1.5,1.5]; points in [-1,1]^2
//   finite_powerset   uniform subset index; points mix the anchors with uniform (0,1) draws
//   shifted_union     shift in [-(2^N+2), 2^N+1]; points stratified, anchors + uniform, or anchor clusters
//   piecewise_link    knots in [-3,3], levels in (0,1), beta in [-2,2]^d; inputs in [-1,1]^d
//   gaussian_link     mu in [-2,2], sigma in [0.1,2], beta in [-2,2]^d; inputs in [-1,1]^d
//   harmonic2d        A entries in [-2,2] with |det A| >= max(0.1, min_abs_det), c in [-1,1]^2

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "vclab/core.hpp"
#include "vclab/interval_union.hpp"

namespace vclab {

/// Standard normal CDF via erfc, Phi(z) = erfc(-z/sqrt 2)/2. glibc's erfc is
/// accurate to a couple of ulps, which keeps the relative error of Phi below
/// 1e-12 over the whole line (the complementary form avoids cancellation in
/// the left tail).
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * (std::numbers::sqrt2 / 2.0)); }

/// Box-Cox transform T_lambda(x) = (x^lambda - 1)/lambda for x > 0, and
/// -1/lambda at x = 0 when lambda > 0.
inline double box_cox(double lambda, double x) {
  require(lambda != 0.0 && std::isfinite(lambda), "box_cox: lambda must be finite and nonzero");
  if (x > 0.0) return std::expm1(lambda * std::log(x)) / lambda;
  if (x == 0.0 && lambda > 0.0) return -1.0 / lambda;
  throw ContractError("box_cox: undefined at x=" + std::to_string(x) + " for lambda=" + std::to_string(lambda));
}

inline std::vector<double> default_anchors(std::size_t k) {
  std::vector<double> a(k);
  for (std::size_t i = 0; i < k; ++i) a[i] = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(k));
  return a;
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool all_finite(ParamView p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

inline PointSet uniform_box(std::size_t n, std::size_t dim, double lo, double hi, Rng& rng) {
  PointSet out(dim);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : p) v = rng.uniform(lo, hi);
    out.push_back(p);
  }
  return out;
}

inline void shuffle(std::vector<double>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace detail

/// Base for function classes whose set family is the class of subgraphs.
class SubgraphModel : public FamilyModel {
 public:
  bool has_evaluator() const override { return true; }
  bool contains(ParamView params, PointView point) const override {
    const double t = point.back();
    return subgraph_contains(evaluate(params, point.first(point.size() - 1)), t, convention());
  }
};

// ---------------------------------------------------------------------------

/// Subgraphs S_lambda of the Box-Cox transforms on R>=0 x R, using the closed
/// lower branch so that membership matches the dual-interval case table
/// exactly (see SubgraphConvention).
class TLambdaModel final : public SubgraphModel {
 public:
  std::string name() const override { return "t_lambda"; }
  std::size_t param_dim() const override { return 1; }
  std::size_t point_dim() const override { return 2; }
  int certified_bound() const override { return 1; }
  SubgraphConvention convention() const override { return SubgraphConvention::closed_lower; }

  bool params_valid(ParamView p) const override { return std::isfinite(p[0]) && p[0] != 0.0; }
  double evaluate(ParamView p, PointView x) const override { return box_cox(p[0], x[0]); }
  bool contains(ParamView params, PointView point) const override {
    require(point[0] >= 0.0, "t_lambda: points must have x >= 0");
    return SubgraphModel::contains(params, point);
  }

  Params sample_params(Rng& rng) const override {
    double l = 0.0;
    while (l == 0.0) l = rng.uniform(-3.0, 3.0);
    return {l};
  }
  PointSet sample_points(std::size_t n, Rng& rng) const override {
    PointSet out(2);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = rng.log_uniform(0.1, 10.0);
      out.push_back({x, rng.uniform(-3.0, 3.0)});
    }
    return out;
  }
  PointSet sample_inputs(std::size_t n, Rng& rng) const override { return detail::uniform_box(n, 1, 0.5, 2.0, rng); }
};

/// X_lambda = {x >= 0 : 0 <= T_lambda(x)}, a one-parameter family of subsets of R.
class XLambdaModel final : public FamilyModel {
 public:
  std::string name() const override { return "x_lambda"; }
  std::size_t param_dim() const override { return 1; }
  std::size_t point_dim() const override { return 1; }
  int certified_bound() const override { return 1; }
  bool params_valid(ParamView p) const override { return std::isfinite(p[0]) && p[0] != 0.0; }
  bool contains(ParamView p, PointView x) const override {
    if (x[0] <= 0.0) return false;  // T_lambda(0) = -1/lambda < 0, or undefined for lambda < 0
    return box_cox(p[0], x[0]) >= 0.0;
  }
  Params sample_params(Rng& rng) const override {
    double l = 0.0;
    while (l == 0.0) l = rng.uniform(-3.0, 3.0);
    return {l};
  }
  PointSet sample_points(std::size_t n, Rng& rng) const override {
    PointSet out(1);
    for (std::size_t i = 0; i < n; ++i) out.push_back({rng.log_uniform(0.1, 10.0)});
    return out;
  }
};

// ---------------------------------------------------------------------------

enum class HalfPlaneVariant { upper, lower, all };

inline std::string to_string(HalfPlaneVariant v) {
  switch (v) {
    case HalfPlaneVariant::upper: return "upper";
    case HalfPlaneVariant::lower: return "lower";
    case HalfPlaneVariant::all: return "all";
  }
  return "?";
}

/// Open half-planes {(x,y) : a*x + b*y + c < 0}. `upper` restricts to b < 0
/// (the region above a non-vertical line), `lower` to b > 0, `all` takes any
/// coefficients, so upper and lower occupy disjoint parameter encodings inside
/// `all`.
class HalfPlaneModel final : public FamilyModel {
 public:
  explicit HalfPlaneModel(HalfPlaneVariant variant) : variant_(variant) {}

  HalfPlaneVariant variant() const { return variant_; }
  std::string name() const override { return "halfplane_" + to_string(variant_); }
  std::size_t param_dim() const override { return 3; }
  std::size_t point_dim() const override { return 2; }
  int certified_bound() const override { return 3; }

  bool admits(double b) const {
    switch (variant_) {
      case HalfPlaneVariant::upper: return b < 0.0;
      case HalfPlaneVariant::lower: return b > 0.0;
      case HalfPlaneVariant::all: return true;
    }
    return false;
  }
  bool params_valid(ParamView p) const override { return detail::all_finite(p) && admits(p[1]); }
  bool contains(ParamView p, PointView x) const override { return p[0] * x[0] + p[1] * x[1] + p[2] < 0.0; }

  Params sample_params(Rng& rng) const override {
    for (;;) {
      const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      Params p{std::cos(theta), std::sin(theta), rng.uniform(-1.5, 1.5)};
      if (admits(p[1])) return p;
    }
  }
  PointSet sample_points(std::size_t n, Rng& rng) const override { return detail::uniform_box(n, 2, -1.0, 1.0, rng); }
  std::vector<PointSet> witness_candidates(std::size_t m) const override {
    PointSet polygon(2);
    for (std::size_t i = 0; i < m; ++i) {
      const double angle = 0.1 + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
      polygon.push_back({std::cos(angle), std::sin(angle)});
    }
    return {polygon};
  }

 private:
  HalfPlaneVariant variant_;
};

// ---------------------------------------------------------------------------

/// All subsets of k fixed reals; the parameter is the subset index (bit j
/// selects anchor j).
class FinitePowersetModel final : public FamilyModel {
 public:
  explicit FinitePowersetModel(std::vector<double> anchors) : anchors_(std::move(anchors)) {
    if (anchors_.empty() || anchors_.size() > 24) throw ConfigError("finite_powerset: need 1..24 anchors");
    auto sorted = anchors_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("finite_powerset: anchors must be distinct");
    if (!detail::all_finite(anchors_)) throw ConfigError("finite_powerset: anchors must be finite");
  }

  const std::vector<double>& anchors() const { return anchors_; }
  std::size_t k() const { return anchors_.size(); }
  std::uint64_t subset_count() const { return std::uint64_t{1} << k(); }

  std::string name() const override { return "finite_powerset"; }
  std::size_t param_dim() const override { return 1; }
  std::size_t point_dim() const override { return 1; }
  int certified_bound() const override { return 0; }
  bool params_valid(ParamView p) const override {
    return p[0] >= 0.0 && p[0] < static_cast<double>(subset_count()) && std::floor(p[0]) == p[0];
  }
  bool contains(ParamView p, PointView x) const override {
    const auto mask = static_cast<std::uint64_t>(p[0]);
    for (std::size_t j = 0; j < anchors_.size(); ++j)
      if (anchors_[j] == x[0]) return (mask >> j) & 1u;
    return false;
  }

  Params sample_params(Rng& rng) const override { return {static_cast<double>(rng.below(subset_count()))}; }
  /// A random permutation of the anchors fills the first min(n,k) slots, the
  /// rest are uniform on (0,1).
  PointSet sample_points(std::size_t n, Rng& rng) const override {
    auto a = anchors_;
    detail::shuffle(a, rng);
    PointSet out(1);
    for (std::size_t i = 0; i < n; ++i) out.push_back({i < a.size() ? a[i] : rng.uniform()});
    return out;
  }
  std::vector<PointSet> witness_candidates(std::size_t m) const override {
    if (m > k()) return {};
    return {PointSet::on_line(std::span(anchors_).first(m))};
  }

 private:
  std::vector<double> anchors_;
};

// ---------------------------------------------------------------------------

/// Translates x + J of a fixed union J of 2^N blocks. Block i (1-based, living
/// in the window (i, i+1)) is i + I_i where I_i is the union of radius-r open
/// intervals around the anchors selected by the bit pattern i-1, so the shift
/// -i cuts out exactly subset i-1 of the anchors.
class ShiftedUnionModel final : public FamilyModel {
 public:
  ShiftedUnionModel(std::size_t n_anchors, std::vector<double> anchors) : anchors_(std::move(anchors)) {
    if (n_anchors == 0) throw ConfigError("shifted_union: N must be positive");
    if (n_anchors > 20) throw ConfigError("shifted_union: N > 20 exceeds the 2^N block budget");
    if (anchors_.size() != n_anchors) throw ConfigError("shifted_union: expected N anchors");
    for (std::size_t j = 0; j < anchors_.size(); ++j) {
      if (!(anchors_[j] > 0.0 && anchors_[j] < 1.0)) throw ConfigError("shifted_union: anchors must lie in (0,1)");
      if (j > 0 && !(anchors_[j - 1] < anchors_[j])) throw ConfigError("shifted_union: anchors must be strictly increasing");
    }
    double gap = std::min(anchors_.front(), 1.0 - anchors_.back());
    for (std::size_t j = 1; j < anchors_.size(); ++j) gap = std::min(gap, anchors_[j] - anchors_[j - 1]);
    radius_ = gap / 4.0;
    std::vector<Interval> parts;
    for (std::uint64_t i = 1; i <= block_count(); ++i) {
      const std::uint64_t mask = i - 1;
      for (std::size_t j = 0; j < anchors_.size(); ++j)
        if ((mask >> j) & 1u) {
          const double centre = static_cast<double>(i) + anchors_[j];
          parts.push_back(Interval{centre - radius_, centre + radius_, false, false});
        }
    }
    union_ = IntervalUnion(std::move(parts));
  }

  std::size_t n_anchors() const { return anchors_.size(); }
  const std::vector<double>& anchors() const { return anchors_; }
  double radius() const { return radius_; }
  std::uint64_t block_count() const { return std::uint64_t{1} << anchors_.size(); }
  /// J, the union of all blocks.
  const IntervalUnion& shifted_union() const { return union_; }
  /// I_i (inside (0,1)) for block i in 1..2^N.
  IntervalUnion block(std::uint64_t i) const {
    require(i >= 1 && i <= block_count(), "shifted_union: block index out of range");
    std::vector<Interval> parts;
    for (std::size_t j = 0; j < anchors_.size(); ++j)
      if (((i - 1) >> j) & 1u) parts.push_back(Interval{anchors_[j] - radius_, anchors_[j] + radius_, false, false});
    return IntervalUnion(std::move(parts));
  }

  std::string name() const override { return "shifted_union"; }
  std::size_t param_dim() const override { return 1; }
  std::size_t point_dim() const override { return 1; }
  int certified_bound() const override { return 1; }
  bool params_valid(ParamView p) const override { return std::isfinite(p[0]); }
  bool contains(ParamView p, PointView x) const override { return union_.contains(x[0] - p[0]); }

  Params sample_params(Rng& rng) const override {
    const double b = static_cast<double>(block_count());
    return {rng.uniform(-(b + 2.0), b + 1.0)};
  }
  /// Strategies: stratified on (0,1) (one point per cell of width 1/n),
  /// anchors first with uniform fill, or clusters at the anchors spread over
  /// up to 4n unit windows. Clusters come closest to the sweep's ceiling of
  /// one new trace per breakpoint.
  PointSet sample_points(std::size_t n, Rng& rng) const override {
    PointSet out(1);
    const auto mode = rng.below(4);
    if (mode == 0) {
      for (std::size_t i = 0; i < n; ++i)
        out.push_back({(static_cast<double>(i) + rng.uniform()) / static_cast<double>(n)});
    } else if (mode >= 2) {
      const auto windows = std::min<std::uint64_t>(block_count(), 4 * n);
      for (std::size_t i = 0; i < n; ++i)
        out.push_back({anchors_[i % anchors_.size()] + rng.uniform(-0.5, 0.5) * radius_ +
                       static_cast<double>(rng.below(windows))});
    } else {
      for (std::size_t i = 0; i < n; ++i) out.push_back({i < anchors_.size() ? anchors_[i] : rng.uniform()});
    }
    return out;
  }
  std::vector<PointSet> witness_candidates(std::size_t m) const override {
    if (m > anchors_.size()) return {};
    return {PointSet::on_line(std::span(anchors_).first(m))};
  }

 private:
  std::vector<double> anchors_;
  double radius_ = 0.0;
  IntervalUnion union_;
};

inline std::shared_ptr<const ShiftedUnionModel> shifted_union_construct(std::size_t n_anchors,
                                                                        std::vector<double> anchors) {
  return std::make_shared<const ShiftedUnionModel>(n_anchors, std::move(anchors));
}

// ---------------------------------------------------------------------------

/// Tail constants of the piecewise link: value and slope match the first and
/// last linear pieces.
struct LinkTails {
  double B1, c1, Bk, ck;
};

inline void check_link_knots(std::span<const double> a, std::span<const double> b) {
  require(a.size() >= 2 && a.size() == b.size(), "link: need k >= 2 knots with matching levels");
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(std::isfinite(a[i]) && std::isfinite(b[i]), "link: non-finite knot");
    require(b[i] > 0.0 && b[i] < 1.0, "link: levels must lie in (0,1)");
    if (i > 0) {
      require(a[i - 1] < a[i], "link: knots a must be strictly increasing");
      require(b[i - 1] < b[i], "link: levels b must be strictly increasing");
    }
  }
}

inline LinkTails link_tails(std::span<const double> a, std::span<const double> b) {
  const std::size_t k = a.size();
  const double left_slope = (b[1] - b[0]) / (a[1] - a[0]);
  const double right_slope = (b[k - 1] - b[k - 2]) / (a[k - 1] - a[k - 2]);
  return {b[0], left_slope / b[0], 1.0 - b[k - 1], right_slope / (1.0 - b[k - 1])};
}

/// eta_k(u): exponential left tail B1*exp(c1(u-a1)), linear between knots,
/// exponential right tail 1 - Bk*exp(-ck(u-ak)).
inline double eval_link(std::span<const double> a, std::span<const double> b, double u) {
  check_link_knots(a, b);
  const std::size_t k = a.size();
  const auto tails = link_tails(a, b);
  if (u <= a[0]) return tails.B1 * std::exp(tails.c1 * (u - a[0]));
  if (u >= a[k - 1]) return 1.0 - tails.Bk * std::exp(-tails.ck * (u - a[k - 1]));
  const auto it = std::upper_bound(a.begin(), a.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - a.begin()) - 1;
  return b[i] + (b[i + 1] - b[i]) * (u - a[i]) / (a[i + 1] - a[i]);
}

/// eta_k(x . beta) with parameters laid out as [a_1..a_k, b_1..b_k, beta_1..beta_d].
class PiecewiseLinkModel final : public SubgraphModel {
 public:
  PiecewiseLinkModel(std::size_t k, std::size_t d) : k_(k), d_(d) {
    if (k < 2) throw ConfigError("piecewise_link: k must be at least 2");
    if (d < 1) throw ConfigError("piecewise_link: d must be at least 1");
  }

  std::size_t knots() const { return k_; }
  std::size_t input_dim() const { return d_; }
  std::span<const double> a(ParamView p) const { return p.subspan(0, k_); }
  std::span<const double> b(ParamView p) const { return p.subspan(k_, k_); }
  std::span<const double> beta(ParamView p) const { return p.subspan(2 * k_, d_); }

  std::string name() const override { return "piecewise_link"; }
  std::size_t param_dim() const override { return 2 * k_ + d_; }
  std::size_t point_dim() const override { return d_ + 1; }
  /// The bound counts the four tail constants as parameters as well.
  int certified_bound() const override { return static_cast<int>(2 * k_ + 2 + d_); }

  bool params_valid(ParamView p) const override {
    if (!detail::all_finite(p)) return false;
    for (std::size_t i = 0; i < k_; ++i) {
      if (!(p[k_ + i] > 0.0 && p[k_ + i] < 1.0)) return false;
      if (i > 0 && !(p[i - 1] < p[i] && p[k_ + i - 1] < p[k_ + i])) return false;
    }
    return true;
  }
  double evaluate(ParamView p, PointView x) const override {
    return eval_link(a(p), b(p), detail::dot(x, beta(p)));
  }

  Params sample_params(Rng& rng) const override {
    Params p(param_dim());
    for (;;) {
      for (std::size_t i = 0; i < k_; ++i) {
        p[i] = rng.uniform(-3.0, 3.0);
        p[k_ + i] = rng.uniform();
      }
      std::sort(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k_));
      std::sort(p.begin() + static_cast<std::ptrdiff_t>(k_), p.begin() + static_cast<std::ptrdiff_t>(2 * k_));
      for (std::size_t j = 0; j < d_; ++j) p[2 * k_ + j] = rng.uniform(-2.0, 2.0);
      if (params_valid(p)) return p;
    }
  }
  PointSet sample_points(std::size_t n, Rng& rng) const override {
    PointSet out(d_ + 1);
    std::vector<double> q(d_ + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d_; ++j) q[j] = rng.uniform(-1.0, 1.0);
      q[d_] = rng.uniform(-0.25, 1.25);
      out.push_back(q);
    }
    return out;
  }
  PointSet sample_inputs(std::size_t n, Rng& rng) const override { return detail::uniform_box(n, d_, -1.0, 1.0, rng); }

 private:
  std::size_t k_, d_;
};

// ---------------------------------------------------------------------------

/// Phi((x . beta - mu)/sigma) with parameters [mu, sigma, beta_1..beta_d].
class GaussianLinkModel final : public SubgraphModel {
 public:
  explicit GaussianLinkModel(std::size_t d) : d_(d) {
    if (d < 1) throw ConfigError("gaussian_link: d must be at least 1");
  }
  std::size_t input_dim() const { return d_; }

  std::string name() const override { return "gaussian_link"; }
  std::size_t param_dim() const override { return d_ + 2; }
  std::size_t point_dim() const override { return d_ + 1; }
  int certified_bound() const override { return static_cast<int>(d_ + 2); }
  bool params_valid(ParamView p) const override { return detail::all_finite(p) && p[1] > 0.0; }
  double evaluate(ParamView p, PointView x) const override {
    return normal_cdf((detail::dot(x, p.subspan(2, d_)) - p[0]) / p[1]);
  }

  Params sample_params(Rng& rng) const override {
    Params p(param_dim());
    p[0] = rng.uniform(-2.0, 2.0);
    p[1] = rng.uniform(0.1, 2.0);
    for (std::size_t j = 0; j < d_; ++j) p[2 + j] = rng.uniform(-2.0, 2.0);
    return p;
  }
  PointSet sample_points(std::size_t n, Rng& rng) const override {
    PointSet out(d_ + 1);
    std::vector<double> q(d_ + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d_; ++j) q[j] = rng.uniform(-1.0, 1.0);
      q[d_] = rng.uniform(-0.25, 1.25);
      out.push_back(q);
    }
    return out;
  }
  PointSet sample_inputs(std::size_t n, Rng& rng) const override { return detail::uniform_box(n, d_, -1.0, 1.0, rng); }

 private:
  std::size_t d_;
};

// ---------------------------------------------------------------------------

/// g(x) = h(A(x-c)/|A(x-c)|) for x != c and -C at x = c, with h a fixed
/// trigonometric polynomial of degree m on the unit circle. Parameters are
/// [A11, A12, A21, A22, c1, c2]; h's coefficients are fixed data laid out as
/// [c0, cos_1, sin_1, ..., cos_m, sin_m].
class Harmonic2DModel final : public SubgraphModel {
 public:
  Harmonic2DModel(std::size_t degree, std::vector<double> coefficients, double min_abs_det)
      : degree_(degree), coef_(std::move(coefficients)), min_abs_det_(min_abs_det) {
    if (coef_.empty()) coef_ = default_coefficients(degree_);
    if (coef_.size() != 2 * degree_ + 1) throw ConfigError("harmonic2d: expected 2m+1 coefficients");
    if (!(min_abs_det_ > 0.0)) throw ConfigError("harmonic2d: the A-domain must exclude singular matrices (min_abs_det > 0)");
    double s = 0.0;
    for (double c : coef_) s += std::abs(c);
    sup_bound_ = s;
    floor_value_ = s + 1.0;
  }

  static std::vector<double> default_coefficients(std::size_t m) {
    std::vector<double> c{0.5};
    for (std::size_t j = 1; j <= m; ++j) {
      c.push_back(1.0 / static_cast<double>(j));
      c.push_back(0.5 / static_cast<double>(j));
    }
    return c;
  }

  std::size_t degree() const { return degree_; }
  const std::vector<double>& coefficients() const { return coef_; }
  /// Upper bound on sup|h| (sum of absolute coefficients).
  double sup_bound() const { return sup_bound_; }
  /// The constant C used at x = c.
  double floor_value() const { return floor_value_; }

  double h(double theta) const {
    double s = coef_[0];
    for (std::size_t j = 1; j <= degree_; ++j) {
      const double jt = static_cast<double>(j) * theta;
      s += coef_[2 * j - 1] * std::cos(jt) + coef_[2 * j] * std::sin(jt);
    }
    return s;
  }

  std::string name() const override { return "harmonic2d"; }
  std::size_t param_dim() const override { return 6; }
  std::size_t point_dim() const override { return 3; }
  int certified_bound() const override { return 6; }
  bool params_valid(ParamView p) const override {
    return detail::all_finite(p) && std::abs(p[0] * p[3] - p[1] * p[2]) >= min_abs_det_;
  }
  double evaluate(ParamView p, PointView x) const override {
    const double dx = x[0] - p[4], dy = x[1] - p[5];
    if (dx == 0.0 && dy == 0.0) return -floor_value_;
    const double v1 = p[0] * dx + p[1] * dy, v2 = p[2] * dx + p[3] * dy;
    return h(std::atan2(v2, v1));
  }

  Params sample_params(Rng& rng) const override {
    const double det_floor = std::max(0.1, min_abs_det_);
    Params p(6);
    for (;;) {
      for (std::size_t i = 0; i < 4; ++i) p[i] = rng.uniform(-2.0, 2.0);
      if (std::abs(p[0] * p[3] - p[1] * p[2]) >= det_floor) break;
    }
    p[4] = rng.uniform(-1.0, 1.0);
    p[5] = rng.uniform(-1.0, 1.0);
    return p;
  }
  PointSet sample_points(std::size_t n, Rng& rng) const override {
    PointSet out(3);
    for (std::size_t i = 0; i < n; ++i)
      out.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-floor_value_, floor_value_)});
    return out;
  }
  PointSet sample_inputs(std::size_t n, Rng& rng) const override { return detail::uniform_box(n, 2, -1.0, 1.0, rng); }

 private:
  std::size_t degree_;
  std::vector<double> coef_;
  double min_abs_det_;
  double sup_bound_ = 0.0;
  double floor_value_ = 0.0;
};

// ---------------------------------------------------------------------------

/// Finite union of families over the same point space. Parameters are
/// [selector, component params..., zero padding].
class UnionModel final : public FamilyModel {
 public:
  explicit UnionModel(std::vector<FamilyHandle> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw ConfigError("union: no components");
    for (const auto& f : parts_) {
      if (f.point_dim() != parts_.front().point_dim()) throw ConfigError("union: components disagree on point dimension");
      width_ = std::max(width_, f.param_dim());
    }
  }

  const std::vector<FamilyHandle>& parts() const { return parts_; }
  std::size_t selector(ParamView p) const { return static_cast<std::size_t>(p[0]); }
  ParamView component_params(ParamView p) const { return p.subspan(1, parts_[selector(p)].param_dim()); }

  /// Encodes component params for this union.
  Params encode(std::size_t which, ParamView params) const {
    Params p(param_dim(), 0.0);
    p[0] = static_cast<double>(which);
    std::copy(params.begin(), params.end(), p.begin() + 1);
    return p;
  }

  std::string name() const override {
    std::string s = "union(";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + parts_[i].name();
    return s + ")";
  }
  std::size_t param_dim() const override { return 1 + width_; }
  std::size_t point_dim() const override { return parts_.front().point_dim(); }
  int certified_bound() const override {
    int b = 0;
    for (const auto& f : parts_) b = std::max(b, f.certified_bound());
    return b;
  }
  bool params_valid(ParamView p) const override {
    if (!(p[0] >= 0.0 && p[0] < static_cast<double>(parts_.size()) && std::floor(p[0]) == p[0])) return false;
    return parts_[selector(p)].model().params_valid(component_params(p));
  }
  bool contains(ParamView p, PointView x) const override { return parts_[selector(p)].contains(component_params(p), x); }

  Params sample_params(Rng& rng) const override {
    const std::size_t which = rng.below(parts_.size());
    return encode(which, parts_[which].sample_params(rng));
  }
  PointSet sample_points(std::size_t n, Rng& rng) const override { return parts_.front().sample_points(n, rng); }
  std::vector<PointSet> witness_candidates(std::size_t m) const override {
    std::vector<PointSet> out;
    for (const auto& f : parts_)
      for (auto& c : f.witness_candidates(m)) out.push_back(std::move(c));
    return out;
  }

 private:
  std::vector<FamilyHandle> parts_;
  std::size_t width_ = 0;
};

// ---------------------------------------------------------------------------
// Convenience constructors

inline FamilyHandle t_lambda_family() { return FamilyHandle(std::make_shared<TLambdaModel>()); }
inline FamilyHandle x_lambda_family() { return FamilyHandle(std::make_shared<XLambdaModel>()); }
inline FamilyHandle halfplane_family(HalfPlaneVariant v) { return FamilyHandle(std::make_shared<HalfPlaneModel>(v)); }
inline FamilyHandle finite_powerset_family(std::vector<double> anchors) {
  return FamilyHandle(std::make_shared<FinitePowersetModel>(std::move(anchors)));
}
inline FamilyHandle shifted_union_family(std::size_t n_anchors) {
  return FamilyHandle(shifted_union_construct(n_anchors, default_anchors(n_anchors)));
}
inline FamilyHandle shifted_union_family(std::size_t n_anchors, std::vector<double> anchors) {
  return FamilyHandle(shifted_union_construct(n_anchors, std::move(anchors)));
}
inline FamilyHandle piecewise_link_family(std::size_t k, std::size_t d) {
  return FamilyHandle(std::make_shared<PiecewiseLinkModel>(k, d));
}
inline FamilyHandle gaussian_link_family(std::size_t d) { return FamilyHandle(std::make_shared<GaussianLinkModel>(d)); }
inline FamilyHandle harmonic2d_family(std::size_t m, std::vector<double> coefficients = {}, double min_abs_det = 1e-12) {
  return FamilyHandle(std::make_shared<Harmonic2DModel>(m, std::move(coefficients), min_abs_det));
}
inline FamilyHandle union_family(std::vector<FamilyHandle> parts) {
  return FamilyHandle(std::make_shared<UnionModel>(std::move(parts)));
}

}  // namespace vclab
