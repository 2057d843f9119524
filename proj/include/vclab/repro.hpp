#pragma once

// Experiment presets, one per acceptance criterion. Each preset computes its
// tables from a single seed, checks its criterion and returns the CSV text;
// writing files is left to the caller. CSV content never includes timings,
// so two runs with the same options are byte-identical.

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vclab/descriptor.hpp"
#include "vclab/dsl.hpp"
#include "vclab/dual_interval.hpp"
#include "vclab/entropy.hpp"
#include "vclab/families.hpp"
#include "vclab/oracles.hpp"
#include "vclab/shatter.hpp"
#include "vclab/ulln.hpp"

namespace vclab::repro {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct PresetOptions {
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 1;
  /// Smaller budgets for smoke runs; criteria are still evaluated.
  bool quick = false;
  std::string formula_dir =
#ifdef VCLAB_FORMULA_DIR
      VCLAB_FORMULA_DIR;
#else
      "formulas";
#endif
};

/// Small CSV builder with locale-independent shortest round-trip numbers.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { line(header); }

  template <class... T>
  void row(const T&... v) {
    static_assert(sizeof...(T) > 0);
    std::vector<std::string> cells{cell(v)...};
    require(cells.size() == cols_, "csv: row width does not match the header");
    line(cells);
  }
  const std::string& str() const { return text_; }

  static std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }
  static std::string cell(const BigInt& v) { return v.str(); }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }
  std::size_t cols_;
  std::string text_;
};

struct Check {
  bool ok = true;
  std::string what;
};

struct PresetResult {
  std::string id;
  std::string title;
  std::vector<Check> checks;
  std::map<std::string, std::string> csv;  // file name -> content
  nlohmann::json summary = nlohmann::json::object();
  double seconds = 0.0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
  }
  void check(bool ok, std::string what) { checks.push_back({ok, std::move(what)}); }
  std::string report() const {
    std::string s;
    for (const auto& c : checks) s += std::string(c.ok ? "  ok   " : "  FAIL ") + c.what + "\n";
    return s;
  }
};

namespace detail {

inline std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

/// Box-Cox subgraph points with a share of the boundary cases of the case
/// table (x = 1, t = 0, t = ln x) mixed in.
inline PointSet lemma1_points(std::size_t n, Rng& rng) {
  PointSet pts(2);
  for (std::size_t i = 0; i < n; ++i) {
    double x = rng.log_uniform(0.1, 10.0);
    double t = rng.uniform(-3.0, 3.0);
    const double u = rng.uniform();
    if (u < 0.03) x = 1.0;
    else if (u < 0.06) t = 0.0;
    else if (u < 0.10) t = std::log(x);
    pts.push_back({x, t});
  }
  return pts;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline PresetResult lemma1(const PresetOptions& opt) {
  PresetResult r{"lemma1", "T_lambda subgraphs pick out at most n+1 subsets of n points"};
  const std::vector<std::size_t> ns{2, 5, 10, 50, 100, 200};
  const std::size_t sets = opt.quick ? 100 : 1000;
  const std::size_t oracle_grid = 2000;
  Csv table({"n", "sets", "max_count", "bound", "violations", "oracle_checked", "oracle_mismatches"});
  Csv cases({"n", "case", "points"});
  std::size_t violations = 0, mismatches = 0, checked = 0;
  for (auto n : ns) {
    struct Out {
      std::size_t count = 0, oracle = 0;
      bool ok = true;
      std::array<std::size_t, kAllDualCases.size()> cases{};
    };
    auto outs = parallel_map(sets, opt.jobs, [&](std::size_t s) {
      Rng rng(derive_seed(opt.seed, {0x11, n, s}));
      const auto pts = detail::lemma1_points(n, rng);
      const auto rep = lemma1_check(pts);
      Out o{rep.count, 0, rep.bound_ok, rep.cases};
      if (n <= 12) o.oracle = oracle::lambda_grid_traces(pts, oracle_grid).size();
      return o;
    });
    std::size_t max_count = 0, v = 0, mm = 0;
    std::array<std::size_t, kAllDualCases.size()> hist{};
    for (const auto& o : outs) {
      max_count = std::max(max_count, o.count);
      v += !o.ok;
      if (n <= 12) mm += o.oracle != o.count;
      for (std::size_t c = 0; c < hist.size(); ++c) hist[c] += o.cases[c];
    }
    violations += v;
    mismatches += mm;
    if (n <= 12) checked += sets;
    table.row(n, sets, max_count, n + 1, v, n <= 12 ? sets : 0, mm);
    for (std::size_t c = 0; c < hist.size(); ++c) cases.row(n, to_string(kAllDualCases[c]), hist[c]);
  }
  r.csv["lemma1.csv"] = table.str();
  r.csv["lemma1_cases.csv"] = cases.str();
  r.check(violations == 0, "trace count <= n+1 on every point set (" + std::to_string(violations) + " violations)");
  r.check(mismatches == 0, "sweep count equals the dense-grid oracle for n <= 12 (" + std::to_string(mismatches) + " of " +
                               std::to_string(checked) + " differ)");
  return r;
}

inline PresetResult case_table(const PresetOptions& opt) {
  PresetResult r{"case_table", "dual-set case table against direct subgraph membership"};
  const std::size_t triples = opt.quick ? 10000 : 100000;
  const auto family = t_lambda_family();
  struct Out {
    DualCase c = DualCase::degenerate;
    bool mismatch = false;
    double residual = 0.0;  // relative root residual
  };
  auto outs = parallel_map(triples, opt.jobs, [&](std::size_t i) {
    Rng rng(derive_seed(opt.seed, {0x12, i}));
    double x = rng.log_uniform(0.02, 50.0);
    double t = rng.uniform(-4.0, 4.0);
    const double u = rng.uniform();
    if (u < 0.03) x = 1.0;
    else if (u < 0.06) t = 0.0;
    else if (u < 0.10) t = std::log(x);
    const auto d = tdual(x, t);
    double lambda = 0.0;
    const double w = rng.uniform();
    if (d.root && *d.root != 0.0 && w < 0.1) lambda = *d.root;
    else if (d.root && *d.root != 0.0 && w < 0.15)
      lambda = *d.root + (rng.below(2) ? 1e-9 : -1e-9) * std::max(1.0, std::abs(*d.root));
    while (lambda == 0.0) lambda = rng.uniform(-4.0, 4.0);
    Out o;
    o.c = d.case_id;
    o.mismatch = d.set.contains(lambda) != family.contains(Params{lambda}, std::vector<double>{x, t});
    if (d.root) o.residual = std::abs(box_cox_in_lambda(x, *d.root) - t) / std::max(1.0, std::abs(t));
    return o;
  });
  std::map<DualCase, std::array<double, 3>> agg;  // count, mismatches, max residual
  for (auto c : kAllDualCases) agg[c] = {0, 0, 0};
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (const auto& o : outs) {
    auto& a = agg[o.c];
    a[0] += 1;
    a[1] += o.mismatch;
    a[2] = std::max(a[2], o.residual);
    mismatches += o.mismatch;
    worst = std::max(worst, o.residual);
  }
  Csv table({"case", "triples", "mismatches", "max_root_residual"});
  for (auto c : kAllDualCases)
    table.row(to_string(c), static_cast<std::size_t>(agg[c][0]), static_cast<std::size_t>(agg[c][1]), agg[c][2]);
  r.csv["case_table.csv"] = table.str();
  r.check(mismatches == 0, "tdual membership equals direct membership on " + std::to_string(triples) + " triples (" +
                               std::to_string(mismatches) + " mismatches)");
  r.check(worst <= 1e-10, "root residual |h(root)-t| <= 1e-10 max(1,|t|) (worst " + detail::fmt(worst) + ")");
  return r;
}

inline PresetResult halfplanes(const PresetOptions& opt) {
  PresetResult r{"halfplanes", "half-planes: VC dimensions 2, 2, 3 and the quadratic trace bound"};
  const auto upper = halfplane_family(HalfPlaneVariant::upper);
  const auto lower = halfplane_family(HalfPlaneVariant::lower);
  const auto both = union_family({upper, lower});
  const auto all = halfplane_family(HalfPlaneVariant::all);

  VcDimOptions vo;
  vo.seed = derive_seed(opt.seed, {0x13});
  vo.random_sets = opt.quick ? 8 : 32;
  vo.jobs = opt.jobs;
  Csv dims({"family", "vc_dim", "method"});
  const std::vector<std::pair<std::string, const FamilyHandle*>> fams{
      {"upper", &upper}, {"lower", &lower}, {"union", &both}, {"all", &all}};
  const std::map<std::string, std::size_t> expected{{"upper", 2}, {"lower", 2}, {"union", 3}, {"all", 3}};
  for (const auto& [label, f] : fams) {
    const auto res = vc_dim(*f, 6, vo);
    dims.row(label, res.dim, to_string(res.method));
    r.check(res.dim == expected.at(label) && res.method == Method::exact && !res.reached_budget,
            label + " vc_dim = " + std::to_string(res.dim) + " (expected " + std::to_string(expected.at(label)) + ")");
  }
  r.csv["halfplane_vcdim.csv"] = dims.str();

  const std::size_t n_max = opt.quick ? 12 : 30;
  std::vector<std::size_t> grid;
  for (std::size_t n = 1; n <= n_max; ++n) grid.push_back(n);
  ShatterOptions so;
  so.seed = derive_seed(opt.seed, {0x14});
  so.point_sets = opt.quick ? 3 : 8;
  so.jobs = opt.jobs;
  const auto pu = shatter_profile(upper, grid, so);
  const auto pl = shatter_profile(lower, grid, so);
  const auto pb = shatter_profile(both, grid, so);
  const auto pa = shatter_profile(all, grid, so);
  Csv prof({"n", "upper", "lower", "union", "all", "bound"});
  std::size_t over = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t n = grid[i];
    const std::uint64_t bound = n * n + n + 2;
    for (const auto* p : {&pu, &pl, &pb, &pa}) over += p->entries[i].delta_hat > bound;
    prof.row(n, pu.entries[i].delta_hat, pl.entries[i].delta_hat, pb.entries[i].delta_hat, pa.entries[i].delta_hat, bound);
  }
  r.csv["halfplane_profile.csv"] = prof.str();
  r.check(over == 0, "exact Delta-hat(n) <= n^2+n+2 for n <= " + std::to_string(n_max));
  r.check(union_bound_check({pu, pl}, pb), "union Delta-hat <= upper + lower at every n");
  return r;
}

inline PresetResult shifted_union(const PresetOptions& opt) {
  PresetResult r{"shifted_union", "shifted unions: VC dimension >= N with VC-density one"};
  const std::size_t n_top = opt.quick ? 6 : 10;
  const std::vector<std::size_t> grid{8, 16, 32, 64, 128, 256};
  Csv summary({"N", "anchor_traces", "shattered", "density_exponent", "r2"});
  // Every point set has at most 2nE+1 traces (E intervals in J, one new
  // state per interval end), which bounds Delta(n) linearly.
  Csv prof({"N", "n", "delta_hat", "ceiling"});
  for (std::size_t big_n = 2; big_n <= n_top; ++big_n) {
    const auto family = shifted_union_family(big_n);
    const auto& model = *family.model_as<ShiftedUnionModel>();
    const auto anchors = PointSet::on_line(model.anchors());
    const auto traces = *exact_traces(family, anchors);
    ShatterOptions so;
    so.seed = derive_seed(opt.seed, {0x15, big_n});
    so.point_sets = opt.quick ? 4 : 12;
    so.jobs = opt.jobs;
    const auto p = shatter_profile(family, grid, so);
    summary.row(big_n, traces.size(), traces.shattered(), p.fitted_density.exponent, p.fitted_density.r2);
    const std::uint64_t intervals = model.shifted_union().interval_count();
    bool under = true;
    for (const auto& e : p.entries) {
      prof.row(big_n, e.n, e.delta_hat, 2 * e.n * intervals + 1);
      under = under && e.delta_hat <= 2 * e.n * intervals + 1;
    }
    r.check(under, "N=" + std::to_string(big_n) + ": Delta-hat(n) <= 2nE+1 (E = " + std::to_string(intervals) + " intervals)");
    r.check(traces.shattered(), "N=" + std::to_string(big_n) + ": anchors shattered (" + std::to_string(traces.size()) + " traces)");
    r.check(p.fitted_density.exponent <= 1.2,
            "N=" + std::to_string(big_n) + ": fitted density exponent " + detail::fmt(p.fitted_density.exponent) + " <= 1.2");
  }
  r.csv["shifted_union.csv"] = summary.str();
  r.csv["shifted_union_profile.csv"] = prof.str();
  return r;
}

inline PresetResult powerset(const PresetOptions& opt) {
  PresetResult r{"powerset", "finite powersets: VC dimension k, VC-density 0"};
  Csv summary({"k", "vc_dim", "density_exponent"});
  Csv prof({"k", "n", "delta_hat"});
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto family = finite_powerset_family(default_anchors(k));
    VcDimOptions vo;
    vo.seed = derive_seed(opt.seed, {0x16, k});
    vo.random_sets = 8;
    const auto dim = vc_dim(family, k + 2, vo);
    std::vector<std::size_t> grid{k, 8, 16, 32, 64, 128, 256};
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    ShatterOptions so;
    so.seed = derive_seed(opt.seed, {0x17, k});
    so.point_sets = 4;
    so.jobs = opt.jobs;
    const auto p = shatter_profile(family, grid, so);
    bool flat = true;
    for (const auto& e : p.entries) {
      prof.row(k, e.n, e.delta_hat);
      flat = flat && e.delta_hat == (std::uint64_t{1} << k);
    }
    summary.row(k, dim.dim, p.fitted_density.exponent);
    const auto ks = std::to_string(k);
    r.check(dim.dim == k && !dim.reached_budget, "k=" + ks + ": vc_dim = " + std::to_string(dim.dim));
    r.check(flat, "k=" + ks + ": Delta-hat(n) = 2^k for every n >= k");
    r.check(p.fitted_density.exponent <= 0.05, "k=" + ks + ": fitted exponent " + detail::fmt(p.fitted_density.exponent) + " <= 0.05");
  }
  r.csv["powerset.csv"] = summary.str();
  r.csv["powerset_profile.csv"] = prof.str();
  return r;
}

inline PresetResult sauer(const PresetOptions& opt) {
  PresetResult r{"sauer", "measured shatter functions stay below the Sauer-Shelah bound"};
  std::vector<std::pair<std::string, FamilyHandle>> fams{
      {"t_lambda", t_lambda_family()},
      {"halfplane_upper", halfplane_family(HalfPlaneVariant::upper)},
      {"halfplane_lower", halfplane_family(HalfPlaneVariant::lower)},
      {"halfplane_all", halfplane_family(HalfPlaneVariant::all)},
      {"halfplane_union", union_family({halfplane_family(HalfPlaneVariant::upper), halfplane_family(HalfPlaneVariant::lower)})},
  };
  for (std::size_t k = 1; k <= 4; ++k) fams.emplace_back("powerset_k" + std::to_string(k), finite_powerset_family(default_anchors(k)));
  for (std::size_t n = 2; n <= 4; ++n) fams.emplace_back("shifted_union_N" + std::to_string(n), shifted_union_family(n));

  Csv dims({"family", "vc_dim"});
  Csv table({"family", "v", "n", "delta_hat", "sauer_bound", "ok"});
  std::size_t violations = 0, measured = 0;
  const std::vector<std::size_t> grid{1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 32};
  for (const auto& [label, family] : fams) {
    VcDimOptions vo;
    vo.seed = derive_seed(opt.seed, {0x18});
    vo.random_sets = opt.quick ? 8 : 32;
    vo.jobs = opt.jobs;
    const auto dim = vc_dim(family, 12, vo);
    dims.row(label, dim.dim);
    if (dim.reached_budget || dim.method != Method::exact) continue;
    ShatterOptions so;
    so.seed = derive_seed(opt.seed, {0x19});
    so.point_sets = opt.quick ? 2 : 6;
    so.jobs = opt.jobs;
    const auto p = shatter_profile(family, grid, so);
    for (const auto& e : p.entries) {
      const BigInt bound = e.n >= dim.dim ? sauer_bound(e.n, dim.dim) : BigInt(1) << e.n;
      const bool ok = BigInt(e.delta_hat) <= bound;
      violations += !ok;
      ++measured;
      table.row(label, dim.dim, e.n, e.delta_hat, bound, ok);
    }
  }
  r.csv["sauer_vcdim.csv"] = dims.str();
  r.csv["sauer.csv"] = table.str();
  r.check(measured > 0 && violations == 0, "Delta-hat(n) <= sum_{j<=v} C(n,j) at " + std::to_string(measured) +
                                               " measured (family, n) pairs (" + std::to_string(violations) + " violations)");
  return r;
}

// ---------------------------------------------------------------------------

struct CoveringCase {
  std::string label;
  FamilyHandle family;
  int d;  // certified exponent
  std::size_t extra_radii = 0;  // grid steps added above the default range
};

inline std::vector<CoveringCase> covering_cases() {
  return {{"t_lambda", t_lambda_family(), 1},
          {"piecewise_link_k2", piecewise_link_family(2, 2), 8},
          {"piecewise_link_k3", piecewise_link_family(3, 2), 10},
          {"piecewise_link_k4", piecewise_link_family(4, 2), 12},
          // Nearly all sampled members stay eps-apart up to eps ~ 0.15.
          {"harmonic2d_m1", harmonic2d_family(1), 6, 2},
          {"gaussian_link", gaussian_link_family(2), 4}};
}

inline PresetResult covering(const PresetOptions& opt) {
  PresetResult r{"covering", "L1 covering numbers against the parameter-count exponent"};
  EntropyOptions eo;
  eo.seed = derive_seed(opt.seed, {0x1a});
  eo.members = opt.quick ? 1500 : 6000;
  eo.support = 100;
  eo.p = 1;
  eo.jobs = opt.jobs;
  Csv curves({"family", "epsilon", "n_cover", "n_pack", "n_pack_2eps"});
  Csv fits({"family", "d", "b_hat", "a_hat", "r2", "rss_power", "rss_exp", "exp_v", "exp_form_better", "cert_a", "violation"});
  std::map<std::string, CoverFit> fitted;
  auto record = [&](const std::string& label, const EntropyCurve& c, int d) {
    for (const auto& e : c.entries) curves.row(label, e.epsilon, e.n_cover, e.n_pack_lower, e.n_pack_double);
    const auto f = fit_cover_exponent(c);
    fitted[label] = f;
    if (d > 0) {
      const auto cert = certificate_compare(c, d, 0.5);
      fits.row(label, d, f.b_hat, f.a_hat, f.r2, f.rss_power, f.rss_exp, f.v, f.exp_form_better, cert.a, cert.violation);
      r.check(!cert.violation, label + ": curve below A (1/eps)^{" + std::to_string(d) + "+0.5}, B_hat = " + detail::fmt(f.b_hat));
    } else {
      fits.row(label, "", f.b_hat, f.a_hat, f.r2, f.rss_power, f.rss_exp, f.v, f.exp_form_better, "", "");
    }
  };
  for (const auto& c : covering_cases()) {
    auto o = eo;
    const double ratio = o.epsilons[1] / o.epsilons[0];
    for (std::size_t i = 0; i < c.extra_radii; ++i) o.epsilons.push_back(o.epsilons.back() * ratio);
    record(c.label, entropy_curve(c.family, o), c.d);
  }

  const auto mono = monotone_class_values(eo.members, eo.support, 20, eo.seed);
  record("monotone", entropy_curve(mono, eo.epsilons, 1, opt.jobs), 0);
  r.csv["covering_curves.csv"] = curves.str();
  r.csv["covering_fits.csv"] = fits.str();

  const double bt = fitted["t_lambda"].b_hat;
  r.check(bt <= 1.5, "t_lambda B_hat = " + detail::fmt(bt) + " <= 1.5");
  const double b2 = fitted["piecewise_link_k2"].b_hat, b3 = fitted["piecewise_link_k3"].b_hat,
               b4 = fitted["piecewise_link_k4"].b_hat;
  r.check(b2 < b3 && b3 < b4, "link B_hat increases with k (" + detail::fmt(b2) + ", " + detail::fmt(b3) + ", " + detail::fmt(b4) + ")");
  r.check(fitted["monotone"].exp_form_better, "monotone class: exponential form fits better than the power law");
  r.check(!fitted["t_lambda"].exp_form_better, "t_lambda: power law fits better than the exponential form");
  return r;
}

// ---------------------------------------------------------------------------

inline PresetResult ulln(const PresetOptions& opt) {
  PresetResult r{"ulln", "uniform deviations decay like log n / sqrt n"};
  UllnConfig cfg;
  cfg.seed = derive_seed(opt.seed, {0x1b});
  cfg.jobs = opt.jobs;
  if (opt.quick) {
    cfg.n_grid = {100, 1000, 10000};
    cfg.reps = 20;
  }
  const std::size_t link_members = refine_grid(
      [&](std::size_t g) { return piecewise_link_ulln_problem(2, 2, g, derive_seed(opt.seed, {0x1c})); }, 8,
      opt.quick ? 32 : 128, 1000, 20, derive_seed(opt.seed, {0x1d}));
  std::vector<UllnProblem> problems{t_lambda_ulln_problem(), piecewise_link_ulln_problem(2, 2, link_members, derive_seed(opt.seed, {0x1c}))};
  Csv runs({"problem", "n", "median_sup_dev", "ratio", "max_ratio"});
  Csv fits({"problem", "grid_size", "alpha", "c", "r2", "ratio_non_increasing"});
  for (const auto& prob : problems) {
    check_envelope(prob, 2000, cfg.seed, 2.0);
    const auto run = run_ulln(prob, cfg);
    const auto f = fit_rate(run);
    for (std::size_t i = 0; i < run.n_grid.size(); ++i) runs.row(prob.name, run.n_grid[i], f.medians[i], f.ratios[i], f.max_ratios[i]);
    fits.row(prob.name, prob.grid_size(), f.alpha, f.c, f.r2, f.ratio_non_increasing);
    r.check(!f.degenerate && f.alpha >= 0.4, prob.name + ": decay exponent alpha = " + detail::fmt(f.alpha) + " >= 0.4");
    r.check(f.ratio_non_increasing, prob.name + ": median / (log n / sqrt n) non-increasing");
  }
  r.csv["ulln_runs.csv"] = runs.str();
  r.csv["ulln_fits.csv"] = fits.str();
  return r;
}

// ---------------------------------------------------------------------------

struct DslTwin {
  std::string file;
  FamilyHandle family;
  std::size_t expected_d;
  /// Built-in parameters -> formula parameters.
  std::function<Params(const Params&)> to_formula;
};

inline std::vector<DslTwin> dsl_twins() {
  auto same = [](const Params& p) { return p; };
  return {{"semispace.fml", halfplane_family(HalfPlaneVariant::all), 3, same},
          {"x_lambda.fml", x_lambda_family(), 1, same},
          {"t_lambda_subgraph.fml", t_lambda_family(), 1, same},
          {"eta3_subgraph.fml", piecewise_link_family(3, 2), 12,
           [](const Params& p) {
             const std::span<const double> a(p.data(), 3), b(p.data() + 3, 3);
             const auto tails = link_tails(a, b);
             Params q(p.begin(), p.begin() + 6);
             q.insert(q.end(), {tails.c1, tails.ck, tails.B1, tails.Bk, p[6], p[7]});
             return q;
           }},
          {"gaussian_link.fml", gaussian_link_family(2), 4, same}};
}

inline PresetResult dsl_certificates(const PresetOptions& opt) {
  PresetResult r{"dsl", "formula certificates and agreement with the built-in families"};
  const std::size_t cases = opt.quick ? 200 : 1000;
  Csv table({"formula", "level", "d", "family_bound", "cases", "mismatches"});
  for (const auto& twin : dsl_twins()) {
    const auto pf = dsl::load_formula_file(opt.formula_dir + "/" + twin.file);
    const auto cert = dsl::certify(pf);
    auto mism = parallel_map(cases, opt.jobs, [&](std::size_t i) -> char {
      Rng rng(derive_seed(opt.seed, {0x1e, i}));
      const auto p = twin.family.sample_params(rng);
      const auto pts = twin.family.sample_points(1, rng);
      const auto q = twin.to_formula(p);
      const bool built_in = twin.family.contains(p, pts[0]);
      return built_in != dsl::eval_formula(pf, pts[0], q) ? 1 : 0;
    });
    const auto m = static_cast<std::size_t>(std::count(mism.begin(), mism.end(), 1));
    table.row(pf.id, dsl::to_string(cert.level), cert.d, twin.family.certified_bound(), cases, m);
    r.check(cert.d == twin.expected_d && cert.density_bound == cert.d,
            pf.id + ": d = " + std::to_string(cert.d) + " (expected " + std::to_string(twin.expected_d) + ")");
    r.check(m == 0, pf.id + ": eval_formula agrees with " + twin.family.name() + " on " + std::to_string(cases) +
                        " random cases (" + std::to_string(m) + " mismatches)");
  }
  r.csv["dsl.csv"] = table.str();

  dsl::Declarations decls;
  decls.params = {"lam"};
  decls.data = {"x", "z"};
  decls.level = dsl::Level::R_alg;
  const std::string src = "exists y . (exp(lam*y) - 1 = z) and (exp(y) = x)";
  bool rejected = false;
  try {
    dsl::parse(src, decls);
  } catch (const dsl::ParseError& e) {
    rejected = std::string(e.what()).find("exp requires R_exp") != std::string::npos;
  }
  decls.level = dsl::Level::R_exp;
  const bool accepted = dsl::certify(dsl::parse(src, decls)).d == 1;
  r.check(rejected && accepted, "exp is rejected at R_alg (\"exp requires R_exp\") and accepted at R_exp with d = 1");
  return r;
}

// ---------------------------------------------------------------------------

struct Preset {
  std::string id;
  std::string description;
  std::function<PresetResult(const PresetOptions&)> run;
};

inline PresetResult determinism(const PresetOptions& opt);

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all{
      {"lemma1", "trace bound n+1 for the Box-Cox subgraphs, with the dense-grid oracle", lemma1},
      {"case_table", "dual-set case table vs direct membership, root residuals", case_table},
      {"halfplanes", "half-plane VC dimensions and the n^2+n+2 bound", halfplanes},
      {"shifted_union", "shifted unions: shattered anchors, density exponent", shifted_union},
      {"powerset", "finite powersets: VC dimension k, density 0", powerset},
      {"sauer", "Sauer-Shelah consistency of measured shatter functions", sauer},
      {"covering", "covering-number exponents against certificates", covering},
      {"ulln", "uniform law of large numbers rates", ulln},
      {"dsl", "formula certificates and agreement with built-in families", dsl_certificates},
      {"determinism", "every preset twice with the same seed, CSVs compared byte for byte", determinism},
  };
  return all;
}

inline const Preset& find_preset(const std::string& id) {
  for (const auto& p : presets())
    if (p.id == id) return p;
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.id;
  throw ConfigError("unknown preset '" + id + "' (known: " + known + ")");
}

inline PresetResult run_preset(const std::string& id, const PresetOptions& opt) {
  const auto& p = find_preset(id);
  const auto start = std::chrono::steady_clock::now();
  auto r = p.run(opt);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.summary["id"] = r.id;
  r.summary["title"] = r.title;
  r.summary["passed"] = r.passed();
  r.summary["seed"] = opt.seed;
  r.summary["quick"] = opt.quick;
  r.summary["seconds"] = r.seconds;
  auto& checks = r.summary["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"ok", c.ok}, {"what", c.what}});
  return r;
}

/// Ids of the CSV files that differ between two results of the same preset.
inline std::vector<std::string> csv_differences(const PresetResult& a, const PresetResult& b) {
  std::vector<std::string> out;
  for (const auto& [name, text] : a.csv) {
    auto it = b.csv.find(name);
    if (it == b.csv.end() || it->second != text) out.push_back(name);
  }
  for (const auto& [name, text] : b.csv)
    if (!a.csv.count(name)) out.push_back(name);
  return out;
}

inline PresetResult determinism(const PresetOptions& opt) {
  PresetResult r{"determinism", "byte-identical CSVs across repeated runs"};
  Csv table({"preset", "files", "identical"});
  for (const auto& p : presets()) {
    if (p.id == "determinism") continue;
    const auto first = p.run(opt);
    const auto second = p.run(opt);
    const auto diff = csv_differences(first, second);
    table.row(p.id, first.csv.size(), diff.empty());
    std::string what = p.id + ": " + std::to_string(first.csv.size()) + " CSV file(s) identical across two runs";
    if (!diff.empty()) what += " (differs: " + diff.front() + ")";
    r.check(diff.empty() && !first.csv.empty(), what);
  }
  r.csv["determinism.csv"] = table.str();
  return r;
}

}  // namespace vclab::repro
