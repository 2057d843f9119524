#pragma once

// Syntax tree of the formula language and the signature levels.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vclab/error.hpp"

namespace vclab::dsl {

enum class Level { R_alg = 0, R_exp = 1, R_an_exp = 2, R_an_Pfaff = 3 };

inline std::string to_string(Level l) {
  switch (l) {
    case Level::R_alg: return "R_alg";
    case Level::R_exp: return "R_exp";
    case Level::R_an_exp: return "R_an_exp";
    case Level::R_an_Pfaff: return "R_an_Pfaff";
  }
  return "?";
}

inline std::optional<Level> parse_level(std::string_view s) {
  if (s == "R_alg") return Level::R_alg;
  if (s == "R_exp") return Level::R_exp;
  if (s == "R_an_exp") return Level::R_an_exp;
  if (s == "R_an_Pfaff") return Level::R_an_Pfaff;
  return std::nullopt;
}

struct FunctionSymbol {
  std::string_view name;
  std::size_t arity;
  Level level;
};

/// The whitelist. Each level contains the ones below it. sqrt and abs are
/// definable over the ordered field; the *_r symbols are the restricted
/// analytic functions (equal to the usual function on [-1,1], 0 outside).
inline constexpr FunctionSymbol kFunctions[] = {
    {"sqrt", 1, Level::R_alg},       {"abs", 1, Level::R_alg},
    {"exp", 1, Level::R_exp},        {"ln", 1, Level::R_exp},
    {"sin_r", 1, Level::R_an_exp},   {"cos_r", 1, Level::R_an_exp},
    {"atan_r", 1, Level::R_an_exp},  {"Phi", 1, Level::R_an_Pfaff},
    {"erf", 1, Level::R_an_Pfaff},
};

inline const FunctionSymbol* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

struct Expr;
struct Formula;
using ExprPtr = std::shared_ptr<const Expr>;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Expr {
  enum class Kind { number, variable, neg, add, sub, mul, div, pow, call };
  Kind kind = Kind::number;
  double value = 0.0;  // number
  std::string name;    // variable or function
  int slot = -1;       // variable: index into the evaluation environment
  std::vector<ExprPtr> args;
  std::size_t pos = 0;  // source offset, not part of the structure

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.value != b.value || a.name != b.name || a.slot != b.slot || a.args.size() != b.args.size())
      return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!(*a.args[i] == *b.args[i])) return false;
    return true;
  }
};

enum class RelOp { lt, le, eq, ge, gt, ne };

inline std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::lt: return "<";
    case RelOp::le: return "<=";
    case RelOp::eq: return "=";
    case RelOp::ge: return ">=";
    case RelOp::gt: return ">";
    case RelOp::ne: return "!=";
  }
  return "?";
}

struct Formula {
  enum class Kind { truth, compare, negation, conjunction, disjunction, implication, equivalence, exists, forall };
  Kind kind = Kind::truth;
  bool truth = true;
  // compare: operands[0] ops[0] operands[1] ops[1] ...
  std::vector<ExprPtr> operands;
  std::vector<RelOp> ops;
  // Denominators occurring in the atom; the atom is false where one vanishes.
  std::vector<ExprPtr> guards;
  std::vector<FormulaPtr> children;
  // quantifiers
  std::vector<std::string> vars;
  std::vector<int> slots;
  std::size_t pos = 0;

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.kind != b.kind || a.truth != b.truth || a.ops != b.ops || a.vars != b.vars || a.slots != b.slots) return false;
    auto same = [](const auto& x, const auto& y) {
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!(*x[i] == *y[i])) return false;
      return true;
    };
    return same(a.operands, b.operands) && same(a.guards, b.guards) && same(a.children, b.children);
  }
};

inline bool is_binary_connective(Formula::Kind k) {
  return k == Formula::Kind::conjunction || k == Formula::Kind::disjunction || k == Formula::Kind::implication ||
         k == Formula::Kind::equivalence;
}

struct Declarations {
  std::vector<std::string> params;
  std::vector<std::string> data;
  Level level = Level::R_alg;
  std::map<std::string, std::pair<double, double>> ranges;  // quantifier boxes
};

/// A resolved formula. Environment slots: params first, then data, then one
/// slot per quantified variable occurrence.
struct ParsedFormula {
  std::string id;
  Declarations decls;
  FormulaPtr root;
  std::size_t slot_count = 0;
  std::vector<std::string> slot_names;
  std::vector<std::string> warnings;
  /// Lowest level whose signature admits every symbol used.
  Level required_level = Level::R_alg;
};

}  // namespace vclab::dsl
