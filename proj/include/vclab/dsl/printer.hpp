#pragma once

// Pretty printer. Output re-parses to the same tree: parentheses are added
// exactly where precedence or associativity would otherwise regroup, and
// quantifiers are parenthesized unless they stand at the root or directly
// under another quantifier (their body extends as far right as possible).

#include <charconv>
#include <string>

#include "vclab/dsl/ast.hpp"

namespace vclab::dsl {

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::neg: return 3;
    case Expr::Kind::pow: return 4;
    default: return 5;
  }
}

inline int precedence(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::equivalence: return 1;
    case Formula::Kind::implication: return 2;
    case Formula::Kind::disjunction: return 3;
    case Formula::Kind::conjunction: return 4;
    case Formula::Kind::negation: return 5;
    case Formula::Kind::exists:
    case Formula::Kind::forall: return 0;
    default: return 6;
  }
}

}  // namespace detail

inline std::string print(const Expr& e);

inline std::string print_wrapped(const Expr& e, bool wrap) { return wrap ? "(" + print(e) + ")" : print(e); }

inline std::string print(const Expr& e) {
  using K = Expr::Kind;
  const int p = detail::precedence(e);
  switch (e.kind) {
    case K::number: return format_number(e.value);
    case K::variable: return e.name;
    case K::neg: return "-" + print_wrapped(*e.args[0], detail::precedence(*e.args[0]) < 3);
    case K::add:
    case K::sub:
    case K::mul:
    case K::div: {
      const char* op = e.kind == K::add ? " + " : e.kind == K::sub ? " - " : e.kind == K::mul ? "*" : "/";
      return print_wrapped(*e.args[0], detail::precedence(*e.args[0]) < p) + op +
             print_wrapped(*e.args[1], detail::precedence(*e.args[1]) <= p);
    }
    case K::pow:
      return print_wrapped(*e.args[0], detail::precedence(*e.args[0]) < 5) + "^" +
             print_wrapped(*e.args[1], detail::precedence(*e.args[1]) < 3);
    case K::call: {
      std::string s = e.name + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + print(*e.args[i]);
      return s + ")";
    }
  }
  return "?";
}

inline std::string print(const Formula& f, bool quantifier_ok = true);

inline std::string print_child(const Formula& f, bool wrap) { return wrap ? "(" + print(f, true) + ")" : print(f, false); }

inline std::string print(const Formula& f, bool quantifier_ok) {
  using K = Formula::Kind;
  const int p = detail::precedence(f);
  switch (f.kind) {
    case K::truth: return f.truth ? "true" : "false";
    case K::compare: {
      std::string s = print(*f.operands[0]);
      for (std::size_t i = 0; i < f.ops.size(); ++i) s += " " + std::string(to_string(f.ops[i])) + " " + print(*f.operands[i + 1]);
      return s;
    }
    case K::negation: {
      const auto& c = *f.children[0];
      return "not " + print_child(c, detail::precedence(c) < 5);
    }
    case K::conjunction:
    case K::disjunction:
    case K::implication:
    case K::equivalence: {
      const char* op = f.kind == K::conjunction   ? " and "
                       : f.kind == K::disjunction ? " or "
                       : f.kind == K::implication ? " implies "
                                                  : " iff ";
      const auto& l = *f.children[0];
      const auto& r = *f.children[1];
      const bool right_assoc = f.kind == K::implication;
      const bool wrap_l = right_assoc ? detail::precedence(l) <= p : detail::precedence(l) < p;
      const bool wrap_r = right_assoc ? detail::precedence(r) < p : detail::precedence(r) <= p;
      return print_child(l, wrap_l) + op + print_child(r, wrap_r);
    }
    case K::exists:
    case K::forall: {
      std::string s = f.kind == K::exists ? "exists " : "forall ";
      for (std::size_t i = 0; i < f.vars.size(); ++i) s += (i ? ", " : "") + f.vars[i];
      s += " . " + print(*f.children[0], true);
      return quantifier_ok ? s : "(" + s + ")";
    }
  }
  return "?";
}

inline std::string print_declarations(const Declarations& d) {
  std::string s;
  auto list = [&](const char* kw, const std::vector<std::string>& names) {
    if (names.empty()) return;
    s += kw;
    for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : " ") + names[i];
    s += ";\n";
  };
  list("param", d.params);
  list("data", d.data);
  s += "level " + to_string(d.level) + ";\n";
  for (const auto& [name, box] : d.ranges)
    s += "range " + name + " in [" + format_number(box.first) + ", " + format_number(box.second) + "];\n";
  return s;
}

inline std::string print(const ParsedFormula& pf) { return print_declarations(pf.decls) + print(*pf.root) + "\n"; }

}  // namespace vclab::dsl
