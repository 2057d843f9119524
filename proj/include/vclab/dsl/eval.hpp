#pragma once

// Approximate evaluation of a parsed formula at a data point and parameter
// vector. Quantifiers range over a bounded box per variable and are decided
// on a finite candidate set:
//   - witnesses: atoms `v = e` (either side) anywhere in the body, e not
//     mentioning v or any still-unbound variable; a top-level conjunct of
//     this form pins v to e alone;
//   - roots of the body's equality residuals along the box, located by sign
//     changes on the grid and refined by bisection;
//   - the grid itself (resolution + 1 evenly spaced values).
// Variables of one block are bound left to right, so later witnesses may
// use earlier ones. This is exact for quantifier-free formulas and for
// existential formulas whose witnesses are explicit or isolated roots; in
// general it is a heuristic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vclab/dsl/ast.hpp"
#include "vclab/families.hpp"
#include "vclab/parallel.hpp"

namespace vclab::dsl {

struct EvalOptions {
  /// Quantifier boxes by variable name; entries override the file's ranges.
  std::map<std::string, std::pair<double, double>> boxes;
  std::size_t resolution = 64;
  /// Workers for the outermost quantifier's candidate scan.
  unsigned jobs = 1;
};

namespace detail {

inline double restricted(double v, double (*f)(double)) { return (v >= -1.0 && v <= 1.0) ? f(v) : 0.0; }

inline double eval_expr(const Expr& e, const std::vector<double>& env) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::number: return e.value;
    case K::variable: return env[static_cast<std::size_t>(e.slot)];
    case K::neg: return -eval_expr(*e.args[0], env);
    case K::add: return eval_expr(*e.args[0], env) + eval_expr(*e.args[1], env);
    case K::sub: return eval_expr(*e.args[0], env) - eval_expr(*e.args[1], env);
    case K::mul: return eval_expr(*e.args[0], env) * eval_expr(*e.args[1], env);
    case K::div: return eval_expr(*e.args[0], env) / eval_expr(*e.args[1], env);
    case K::pow: return std::pow(eval_expr(*e.args[0], env), eval_expr(*e.args[1], env));
    case K::call: {
      const double v = eval_expr(*e.args[0], env);
      if (e.name == "sqrt") return std::sqrt(v);
      if (e.name == "abs") return std::abs(v);
      if (e.name == "exp") return std::exp(v);
      if (e.name == "ln") return v > 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN();
      if (e.name == "sin_r") return restricted(v, [](double u) { return std::sin(u); });
      if (e.name == "cos_r") return restricted(v, [](double u) { return std::cos(u); });
      if (e.name == "atan_r") return restricted(v, [](double u) { return std::atan(u); });
      if (e.name == "Phi") return normal_cdf(v);
      if (e.name == "erf") return std::erf(v);
      throw ContractError("eval: unknown function " + e.name);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline bool approx_equal(double l, double r) {
  return std::abs(l - r) <= 1e-9 * std::max({1.0, std::abs(l), std::abs(r)});
}

inline bool compare(RelOp op, double l, double r) {
  switch (op) {
    case RelOp::lt: return l < r;
    case RelOp::le: return l <= r;
    case RelOp::eq: return approx_equal(l, r);
    case RelOp::ge: return l >= r;
    case RelOp::gt: return l > r;
    case RelOp::ne: return !approx_equal(l, r);
  }
  return false;
}

inline bool mentions(const Expr& e, int slot) {
  if (e.kind == Expr::Kind::variable) return e.slot == slot;
  for (const auto& a : e.args)
    if (mentions(*a, slot)) return true;
  return false;
}

inline bool is_var(const Expr& e, int slot) { return e.kind == Expr::Kind::variable && e.slot == slot; }

class Evaluator {
 public:
  Evaluator(const ParsedFormula& pf, const EvalOptions& opt) : pf_(pf), opt_(opt) {
    require(opt.resolution >= 2, "eval_formula: resolution must be at least 2");
  }

  bool eval(const Formula& f, std::vector<double>& env, int depth) const {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::truth: return f.truth;
      case K::compare: return atom(f, env);
      case K::negation: return !eval(*f.children[0], env, depth);
      case K::conjunction: return eval(*f.children[0], env, depth) && eval(*f.children[1], env, depth);
      case K::disjunction: return eval(*f.children[0], env, depth) || eval(*f.children[1], env, depth);
      case K::implication: return !eval(*f.children[0], env, depth) || eval(*f.children[1], env, depth);
      case K::equivalence: return eval(*f.children[0], env, depth) == eval(*f.children[1], env, depth);
      case K::exists: return quantify(f, 0, env, depth, true);
      case K::forall: return !quantify(f, 0, env, depth, false);
    }
    return false;
  }

 private:
  bool atom(const Formula& f, const std::vector<double>& env) const {
    for (const auto& g : f.guards) {
      const double v = eval_expr(*g, env);
      if (std::isnan(v) || v == 0.0) return false;
    }
    double l = eval_expr(*f.operands[0], env);
    if (std::isnan(l)) return false;
    for (std::size_t i = 0; i < f.ops.size(); ++i) {
      const double r = eval_expr(*f.operands[i + 1], env);
      if (std::isnan(r) || !compare(f.ops[i], l, r)) return false;
      l = r;
    }
    return true;
  }

  std::pair<double, double> box(const std::string& name) const {
    if (auto it = opt_.boxes.find(name); it != opt_.boxes.end()) return it->second;
    if (auto it = pf_.decls.ranges.find(name); it != pf_.decls.ranges.end()) return it->second;
    throw ConfigError("eval_formula: quantified variable '" + name + "' has no bounded range");
  }

  // Looks for `v = e` / `e = v` in a chain; appends finite values of e.
  static void witnesses_in_atom(const Formula& f, int slot, const std::vector<double>& env, std::vector<double>& out) {
    for (std::size_t i = 0; i < f.ops.size(); ++i) {
      if (f.ops[i] != RelOp::eq) continue;
      const Expr& l = *f.operands[i];
      const Expr& r = *f.operands[i + 1];
      const Expr* other = is_var(l, slot) && !mentions(r, slot)   ? &r
                          : is_var(r, slot) && !mentions(l, slot) ? &l
                                                                  : nullptr;
      if (!other) continue;
      const double v = eval_expr(*other, env);
      if (std::isfinite(v)) out.push_back(v);
    }
  }

  static void collect(const Formula& f, int slot, const std::vector<double>& env, std::vector<double>& wit,
                      std::vector<const Formula*>& eq_atoms) {
    if (f.kind == Formula::Kind::compare) {
      witnesses_in_atom(f, slot, env, wit);
      for (std::size_t i = 0; i < f.ops.size(); ++i)
        if (f.ops[i] == RelOp::eq && (mentions(*f.operands[i], slot) || mentions(*f.operands[i + 1], slot))) {
          eq_atoms.push_back(&f);
          break;
        }
      return;
    }
    for (const auto& c : f.children) collect(*c, slot, env, wit, eq_atoms);
  }

  static void top_conjuncts(const Formula& f, std::vector<const Formula*>& out) {
    if (f.kind == Formula::Kind::conjunction) {
      top_conjuncts(*f.children[0], out);
      top_conjuncts(*f.children[1], out);
    } else {
      out.push_back(&f);
    }
  }

  std::vector<double> candidates(const Formula& body, int slot, std::pair<double, double> b,
                                 std::vector<double>& env) const {
    const auto [lo, hi] = b;
    auto in_box = [&](double v) { return v >= lo && v <= hi; };

    std::vector<const Formula*> conj;
    top_conjuncts(body, conj);
    for (const auto* c : conj) {
      if (c->kind != Formula::Kind::compare) continue;
      std::vector<double> pinned;
      witnesses_in_atom(*c, slot, env, pinned);
      if (!pinned.empty()) {
        std::vector<double> out;
        for (double v : pinned)
          if (in_box(v)) out.push_back(v);
        return out;
      }
    }

    std::vector<double> out;
    std::vector<const Formula*> eq_atoms;
    collect(body, slot, env, out, eq_atoms);
    std::erase_if(out, [&](double v) { return !in_box(v); });

    const std::size_t g = opt_.resolution;
    std::vector<double> grid(g + 1);
    for (std::size_t i = 0; i <= g; ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g);
    out.insert(out.end(), grid.begin(), grid.end());

    const double saved = env[static_cast<std::size_t>(slot)];
    for (const auto* a : eq_atoms) {
      for (std::size_t k = 0; k < a->ops.size(); ++k) {
        if (a->ops[k] != RelOp::eq) continue;
        auto residual = [&](double v) {
          env[static_cast<std::size_t>(slot)] = v;
          return eval_expr(*a->operands[k], env) - eval_expr(*a->operands[k + 1], env);
        };
        double prev = residual(grid[0]);
        for (std::size_t i = 1; i <= g; ++i) {
          const double cur = residual(grid[i]);
          if (std::isfinite(prev) && std::isfinite(cur) && ((prev < 0.0) != (cur < 0.0)) && prev != 0.0 && cur != 0.0) {
            double a0 = grid[i - 1], b0 = grid[i], fa = prev;
            for (int it = 0; it < 200; ++it) {
              const double mid = 0.5 * (a0 + b0);
              if (mid <= a0 || mid >= b0) break;
              const double fm = residual(mid);
              if (!std::isfinite(fm)) break;
              if ((fm < 0.0) == (fa < 0.0)) {
                a0 = mid;
                fa = fm;
              } else {
                b0 = mid;
              }
            }
            out.push_back(a0);
            out.push_back(b0);
          }
          prev = cur;
        }
      }
    }
    env[static_cast<std::size_t>(slot)] = saved;
    return out;
  }

  // Existential search over f.vars[idx..]; `want` is the body value sought
  // (true for exists, false for the counterexample search of forall).
  bool quantify(const Formula& f, std::size_t idx, std::vector<double>& env, int depth, bool want) const {
    const Formula& body = *f.children[0];
    if (idx == f.vars.size()) return eval(body, env, depth + 1) == want;
    const int slot = f.slots[idx];
    const auto cand = candidates(body, slot, box(f.vars[idx]), env);
    if (depth == 0 && idx == 0 && opt_.jobs > 1 && cand.size() > 1) {
      auto hits = parallel_map(cand.size(), opt_.jobs, [&](std::size_t i) -> char {
        auto local = env;
        local[static_cast<std::size_t>(slot)] = cand[i];
        return quantify(f, idx + 1, local, depth, want) ? 1 : 0;
      });
      return std::any_of(hits.begin(), hits.end(), [](char h) { return h != 0; });
    }
    const double saved = env[static_cast<std::size_t>(slot)];
    bool found = false;
    for (double v : cand) {
      env[static_cast<std::size_t>(slot)] = v;
      if (quantify(f, idx + 1, env, depth, want)) {
        found = true;
        break;
      }
    }
    env[static_cast<std::size_t>(slot)] = saved;
    return found;
  }

  const ParsedFormula& pf_;
  const EvalOptions& opt_;
};

}  // namespace detail

/// Truth value of pf at (data, params). Approximate when pf has quantifiers.
inline bool eval_formula(const ParsedFormula& pf, std::span<const double> data, std::span<const double> params,
                         const EvalOptions& opt = {}) {
  const std::size_t np = pf.decls.params.size(), nd = pf.decls.data.size();
  if (params.size() != np)
    throw ContractError("eval_formula: expected " + std::to_string(np) + " parameters, got " + std::to_string(params.size()));
  if (data.size() != nd)
    throw ContractError("eval_formula: expected " + std::to_string(nd) + " data values, got " + std::to_string(data.size()));
  std::vector<double> env(pf.slot_count, std::numeric_limits<double>::quiet_NaN());
  std::copy(params.begin(), params.end(), env.begin());
  std::copy(data.begin(), data.end(), env.begin() + static_cast<std::ptrdiff_t>(np));
  return detail::Evaluator(pf, opt).eval(*pf.root, env, 0);
}

}  // namespace vclab::dsl
