// vclab command-line front end.
//
//   vclab shatter --family finite_powerset --k 3 --n 64
//   vclab certify formulas/semispace.fml
//   vclab repro lemma1 --out runs
//
// Exit codes: 0 success, 1 criterion violated (repro), 2 configuration error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vclab/repro.hpp"
#include "vclab/vclab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vclab;

namespace {

struct Common {
  std::string family;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> n;
  unsigned jobs = 1;
  std::string out = "runs";
  std::string format = "csv";
  std::string run_id;
  // fixed family data
  std::optional<long long> k, big_n, d, m;
  std::string variant;
  std::vector<double> anchors;
  json cfg = json::object();  // --config contents
};

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (c.cfg.contains("seed")) return c.cfg["seed"].get<std::uint64_t>();
  if (const char* env = std::getenv("VC_LAB_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("VC_LAB_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return repro::kDefaultSeed;
}

template <class T>
T cfg_or(const Common& c, const char* key, T fallback) {
  if (!c.cfg.contains(key)) return fallback;
  try {
    return c.cfg[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

json family_descriptor(const Common& c) {
  json desc;
  if (c.cfg.contains("family")) {
    const auto& f = c.cfg["family"];
    if (f.is_object()) desc = f;
    else if (f.is_string() && c.cfg.contains("fixed")) desc = {{"family", f}, {"fixed", c.cfg["fixed"]}};
    else if (f.is_string()) desc = {{"family", f}};
  }
  if (c.cfg.contains("family_file")) desc = read_json_file(c.cfg["family_file"].get<std::string>());
  if (!c.family.empty()) desc = {{"family", c.family}};
  if (desc.is_null()) throw ConfigError("no family given (use --family or --config)");
  auto& fixed = desc["fixed"];
  if (fixed.is_null()) fixed = json::object();
  if (c.k) fixed["k"] = *c.k;
  if (c.big_n) fixed["N"] = *c.big_n;
  if (c.d) fixed["d"] = *c.d;
  if (c.m) fixed["m"] = *c.m;
  if (!c.variant.empty()) fixed["variant"] = c.variant;
  if (!c.anchors.empty()) fixed["anchors"] = c.anchors;
  return desc;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

fs::path run_dir(const Common& c, const std::string& sub) {
  const fs::path dir = fs::path(c.out) / sub / (c.run_id.empty() ? timestamp() : c.run_id);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

/// Writes the table as CSV or, with --format json, as an array of objects.
void write_table(const Common& c, const fs::path& dir, const std::string& stem, const std::string& csv) {
  if (c.format == "csv") {
    write_file(dir / (stem + ".csv"), csv);
    return;
  }
  std::istringstream is(csv);
  std::string line;
  std::vector<std::string> header;
  json rows = json::array();
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(is, line)) {
    if (header.empty()) {
      header = split(line);
      continue;
    }
    const auto cells = split(line);
    json row = json::object();
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(row);
  }
  write_file(dir / (stem + ".json"), rows.dump(2) + "\n");
}

void write_summary(const fs::path& dir, json summary) {
  summary["written_at"] = timestamp();
  write_file(dir / "summary.json", summary.dump(2) + "\n");
}

void add_common(CLI::App* sub, Common& c, bool with_family = true) {
  if (with_family) {
    sub->add_option("--family", c.family, "built-in family name");
    sub->add_option("--k", c.k, "knots (piecewise_link) or anchors (finite_powerset)");
    sub->add_option("--N", c.big_n, "anchor count (shifted_union)");
    sub->add_option("--d", c.d, "input dimension of link families");
    sub->add_option("--m", c.m, "harmonic degree (harmonic2d)");
    sub->add_option("--variant", c.variant, "halfplane variant: upper, lower, all");
    sub->add_option("--anchors", c.anchors, "anchor reals")->delimiter(',');
  }
  sub->add_option("--config", c.config, "experiment config (JSON)");
  sub->add_option("--seed", c.seed, "root seed (falls back to VC_LAB_SEED)");
  sub->add_option("--n", c.n, "sample sizes")->delimiter(',');
  sub->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
  sub->add_option("--out", c.out, "output root directory");
  sub->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--run-id", c.run_id, "name of the run directory (default: UTC timestamp)");
}

void load_config(Common& c) {
  if (c.config.empty()) return;
  c.cfg = read_json_file(c.config);
  if (!c.cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (c.n.empty() && c.cfg.contains("n")) {
    const auto& n = c.cfg["n"];
    c.n = n.is_array() ? n.get<std::vector<std::size_t>>() : std::vector<std::size_t>{n.get<std::size_t>()};
  }
  if (c.cfg.contains("jobs") && c.jobs == 1) c.jobs = c.cfg["jobs"].get<unsigned>();
  if (c.cfg.contains("out") && c.out == "runs") c.out = c.cfg["out"].get<std::string>();
}

json base_summary(const std::string& sub, const Common& c, std::uint64_t seed) {
  return {{"subcommand", sub}, {"seed", seed}, {"jobs", c.jobs}};
}

// ---------------------------------------------------------------------------

int cmd_shatter(Common& c, std::size_t point_sets, std::size_t budget) {
  load_config(c);
  const auto desc = family_descriptor(c);
  const auto family = make_family(desc);
  const auto seed = resolve_seed(c);
  std::vector<std::size_t> grid = c.n.empty() ? std::vector<std::size_t>{4, 8, 16, 32, 64, 128} : c.n;
  ShatterOptions so;
  so.seed = seed;
  so.point_sets = cfg_or(c, "point_sets", point_sets);
  so.param_budget = cfg_or(c, "param_budget", budget);
  so.jobs = c.jobs;
  const auto prof = shatter_profile(family, grid, so);
  repro::Csv csv({"n", "delta_hat", "method", "point_sets", "params_tried"});
  for (const auto& e : prof.entries) {
    csv.row(e.n, e.delta_hat, to_string(e.method), e.point_sets_tried, e.params_tried);
    std::cout << family.name() << " n=" << e.n << " delta_hat=" << e.delta_hat << " (" << to_string(e.method)
              << (e.method == Method::sampled ? ", lower bound" : "") << ")\n";
  }
  const bool fitted = prof.entries.size() >= 4 && prof.entries.back().n >= 10 * prof.entries.front().n;
  if (fitted) std::cout << "fitted density exponent " << prof.fitted_density.exponent << "\n";
  const auto dir = run_dir(c, "shatter");
  write_table(c, dir, "shatter", csv.str());
  auto s = base_summary("shatter", c, seed);
  s["family"] = desc;
  s["certified_bound"] = family.certified_bound();
  if (fitted) s["density_exponent"] = prof.fitted_density.exponent;
  write_summary(dir, s);
  return 0;
}

int cmd_vcdim(Common& c, std::size_t budget_dim, std::size_t random_sets) {
  load_config(c);
  const auto desc = family_descriptor(c);
  const auto family = make_family(desc);
  const auto seed = resolve_seed(c);
  VcDimOptions vo;
  vo.seed = seed;
  vo.random_sets = random_sets;
  vo.jobs = c.jobs;
  const auto res = vc_dim(family, budget_dim, vo);
  std::cout << family.name() << " vc_dim " << (res.reached_budget ? ">= " : "") << res.dim << " (" << to_string(res.method)
            << ")\n";
  const auto dir = run_dir(c, "vcdim");
  repro::Csv csv({"family", "vc_dim", "reached_budget", "method"});
  csv.row(family.name(), res.dim, res.reached_budget, to_string(res.method));
  write_table(c, dir, "vcdim", csv.str());
  if (!res.witness.empty()) {
    std::ostringstream os;
    write_csv(os, res.witness);
    write_file(dir / "witness.csv", os.str());
  }
  auto s = base_summary("vcdim", c, seed);
  s["family"] = desc;
  s["vc_dim"] = res.dim;
  s["reached_budget"] = res.reached_budget;
  write_summary(dir, s);
  return 0;
}

int cmd_dual(Common& c, std::size_t probes) {
  load_config(c);
  const auto desc = family_descriptor(c);
  const auto family = make_family(desc);
  const auto seed = resolve_seed(c);
  const auto grid = c.n.empty() ? std::vector<std::size_t>{1, 2, 4, 8, 16} : c.n;
  DualShatterOptions opt;
  opt.seed = seed;
  opt.probe_budget = probes;
  repro::Csv csv({"m", "atoms", "probes"});
  for (auto m : grid) {
    const auto atoms = dual_shatter(family, m, opt);
    csv.row(m, atoms, probes);
    std::cout << family.name() << " m=" << m << " atoms>=" << atoms << "\n";
  }
  const auto dir = run_dir(c, "dual");
  write_table(c, dir, "dual", csv.str());
  auto s = base_summary("dual", c, seed);
  s["family"] = desc;
  write_summary(dir, s);
  return 0;
}

int cmd_lemma1(Common& c, std::size_t sets, const std::string& points_file) {
  load_config(c);
  const auto seed = resolve_seed(c);
  repro::Csv csv({"n", "set", "count", "bound", "bound_ok"});
  std::size_t violations = 0;
  json reports = json::array();
  if (!points_file.empty()) {
    std::ifstream in(points_file);
    if (!in) throw ConfigError("cannot open '" + points_file + "'");
    const auto rep = lemma1_check(read_point_csv(in));
    csv.row(rep.n, 0, rep.count, rep.bound, rep.bound_ok);
    violations += !rep.bound_ok;
    reports.push_back(rep.to_json());
    std::cout << "n=" << rep.n << " traces=" << rep.count << " bound=" << rep.bound << "\n";
  } else {
    const auto grid = c.n.empty() ? std::vector<std::size_t>{2, 5, 10, 50, 100, 200} : c.n;
    for (auto n : grid) {
      std::size_t worst = 0;
      for (std::size_t s = 0; s < sets; ++s) {
        Rng rng(derive_seed(seed, {0x11, n, s}));
        const auto rep = lemma1_check(repro::detail::lemma1_points(n, rng));
        csv.row(n, s, rep.count, rep.bound, rep.bound_ok);
        violations += !rep.bound_ok;
        worst = std::max(worst, rep.count);
      }
      std::cout << "n=" << n << " max traces=" << worst << " bound=" << n + 1 << "\n";
    }
  }
  const auto dir = run_dir(c, "lemma1");
  write_table(c, dir, "lemma1", csv.str());
  auto s = base_summary("lemma1", c, seed);
  s["violations"] = violations;
  if (!reports.empty()) s["reports"] = reports;
  write_summary(dir, s);
  std::cout << (violations == 0 ? "bound holds on every set\n" : "bound VIOLATED\n");
  return violations == 0 ? 0 : 1;
}

int cmd_cover(Common& c, std::size_t members, std::size_t support, int p, std::vector<double> eps) {
  load_config(c);
  const auto desc = family_descriptor(c);
  const auto family = make_family(desc);
  const auto seed = resolve_seed(c);
  EntropyOptions eo;
  eo.seed = seed;
  eo.members = cfg_or(c, "members", members);
  eo.support = cfg_or(c, "support", support);
  eo.p = p;
  eo.epsilons = eps.empty() ? cfg_or(c, "epsilons", default_epsilons()) : eps;
  eo.jobs = c.jobs;
  const auto curve = entropy_curve(family, eo);
  repro::Csv csv({"epsilon", "n_cover", "n_pack", "n_pack_2eps"});
  for (const auto& e : curve.entries) csv.row(e.epsilon, e.n_cover, e.n_pack_lower, e.n_pack_double);
  const auto dir = run_dir(c, "cover");
  write_table(c, dir, "cover", csv.str());
  auto s = base_summary("cover", c, seed);
  s["family"] = desc;
  s["members"] = eo.members;
  s["support"] = eo.support;
  s["envelope_norm"] = curve.envelope_norm;
  const auto fit = fit_cover_exponent(curve);
  const auto cert = certificate_compare(curve, family.certified_bound());
  s["b_hat"] = fit.b_hat;
  s["certified_exponent"] = std::to_string(family.certified_bound()) + "+0.5";
  s["certificate_violation"] = cert.violation;
  s["note"] = cert.note;
  write_summary(dir, s);
  std::cout << family.name() << " B_hat=" << fit.b_hat << " (certified " << family.certified_bound() << "+eta), "
            << (cert.violation ? "curve exceeds the certificate\n" : "curve within the certificate\n");
  return 0;
}

int cmd_ulln(Common& c, std::size_t reps, std::size_t members) {
  load_config(c);
  const auto seed = resolve_seed(c);
  const std::string name = c.family.empty() ? cfg_or<std::string>(c, "family", "t_lambda") : c.family;
  UllnProblem prob;
  if (name == "t_lambda") prob = t_lambda_ulln_problem();
  else if (name == "piecewise_link")
    prob = piecewise_link_ulln_problem(static_cast<std::size_t>(c.k.value_or(2)), static_cast<std::size_t>(c.d.value_or(2)),
                                       members, derive_seed(seed, {0x1c}));
  else throw ConfigError("ulln: supported families are t_lambda and piecewise_link");
  check_envelope(prob, 2000, seed, 2.0);
  UllnConfig cfg;
  cfg.seed = seed;
  cfg.reps = reps;
  cfg.jobs = c.jobs;
  if (!c.n.empty()) {
    cfg.n_grid = c.n;
    std::sort(cfg.n_grid.begin(), cfg.n_grid.end());
  }
  const auto run = run_ulln(prob, cfg);
  const auto f = fit_rate(run);
  repro::Csv csv({"n", "rep", "sup_dev"});
  for (std::size_t i = 0; i < run.n_grid.size(); ++i)
    for (std::size_t r = 0; r < run.reps; ++r) csv.row(run.n_grid[i], r, run.sup_dev[i][r]);
  const auto dir = run_dir(c, "ulln");
  write_table(c, dir, "ulln", csv.str());
  auto s = base_summary("ulln", c, seed);
  s["problem"] = prob.name;
  s["grid_size"] = prob.grid_size();
  s["alpha"] = f.alpha;
  s["ratios"] = f.ratios;
  s["ratio_non_increasing"] = f.ratio_non_increasing;
  write_summary(dir, s);
  std::cout << prob.name << " alpha=" << f.alpha << " ratio non-increasing: " << (f.ratio_non_increasing ? "yes" : "no")
            << "\n";
  return 0;
}

int cmd_certify(Common& c, const std::string& file, bool write) {
  const auto pf = dsl::load_formula_file(file);
  const auto cert = dsl::certify(pf);
  for (const auto& w : pf.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << cert.to_json().dump(2) << "\n";
  if (write) {
    const auto dir = run_dir(c, "certify");
    write_file(dir / (pf.id + ".json"), cert.to_json().dump(2) + "\n");
  }
  return 0;
}

int cmd_repro(Common& c, const std::string& id, bool quick) {
  load_config(c);
  repro::PresetOptions opt;
  opt.seed = resolve_seed(c);
  opt.jobs = c.jobs;
  opt.quick = quick;
  const auto r = repro::run_preset(id, opt);
  const auto dir = run_dir(c, "repro/" + id);
  for (const auto& [name, text] : r.csv) write_table(c, dir, name.substr(0, name.size() - 4), text);
  write_summary(dir, r.summary);
  std::cout << id << ": " << r.title << "\n" << r.report();
  std::cout << (r.passed() ? "PASS" : "FAIL") << " " << id << " (" << repro::detail::fmt(r.seconds, 3) << " s) -> "
            << dir.string() << "\n";
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vclab: shatter functions, VC dimension, covering numbers and certificates"};
  app.require_subcommand(1);
  Common c;

  std::size_t point_sets = 8, budget = 2000, budget_dim = 8, random_sets = 32, probes = 20000, sets = 1000;
  std::size_t members = 4000, support = 100, reps = 50, link_members = 64;
  int p = 1;
  std::vector<double> eps;
  std::string file, id, points_file;
  bool quick = false, write = false;

  auto* shatter = app.add_subcommand("shatter", "estimate the shatter function");
  add_common(shatter, c);
  shatter->add_option("--point-sets", point_sets, "point sets tried per n");
  shatter->add_option("--budget", budget, "random parameters per point set (sampled families)");

  auto* vcdim = app.add_subcommand("vcdim", "search for the largest shattered set");
  add_common(vcdim, c);
  vcdim->add_option("--max-dim", budget_dim, "largest dimension tried (<= 20)");
  vcdim->add_option("--random-sets", random_sets, "random point sets per size");

  auto* dual = app.add_subcommand("dual", "atom counts of random subfamilies (--n gives m)");
  add_common(dual, c);
  dual->add_option("--probes", probes, "probe points");

  auto* lem = app.add_subcommand("lemma1", "trace counts of the Box-Cox subgraphs");
  add_common(lem, c, false);
  lem->add_option("--sets", sets, "random point sets per n");
  lem->add_option("--points", points_file, "CSV of (x,t) points instead of random sets");

  auto* cover = app.add_subcommand("cover", "L^p covering numbers and exponent fit");
  add_common(cover, c);
  cover->add_option("--members", members, "sampled class members M");
  cover->add_option("--support", support, "support points of the empirical measure");
  cover->add_option("--p", p, "1 or 2")->check(CLI::IsMember({1, 2}));
  cover->add_option("--eps", eps, "relative radii")->delimiter(',');

  auto* ul = app.add_subcommand("ulln", "uniform deviation study (t_lambda or piecewise_link)");
  add_common(ul, c);
  ul->add_option("--reps", reps, "replications per n");
  ul->add_option("--members", link_members, "grid size for piecewise_link");

  auto* cert = app.add_subcommand("certify", "certificate for a formula file");
  add_common(cert, c, false);
  cert->add_option("file", file, "formula file")->required();
  cert->add_flag("--write", write, "also write the certificate under --out");

  auto* rep = app.add_subcommand("repro", "run an acceptance preset");
  add_common(rep, c, false);
  rep->add_option("id", id, "preset id")->required();
  rep->add_flag("--quick", quick, "reduced budgets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*shatter) return cmd_shatter(c, point_sets, budget);
    if (*vcdim) return cmd_vcdim(c, budget_dim, random_sets);
    if (*dual) return cmd_dual(c, probes);
    if (*lem) return cmd_lemma1(c, sets, points_file);
    if (*cover) return cmd_cover(c, members, support, p, eps);
    if (*ul) return cmd_ulln(c, reps, link_members);
    if (*cert) return cmd_certify(c, file, write);
    if (*rep) return cmd_repro(c, id, quick);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
