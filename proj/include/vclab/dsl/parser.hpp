#pragma once

// Lexer and recursive-descent parser.
//
//   file        = { declaration } formula [ ";" ] ;
//   declaration = ( "param" | "data" ) ident { "," ident } ";"
//               | "level" ( "R_alg" | "R_exp" | "R_an_exp" | "R_an_Pfaff" ) ";"
//               | "range" ident "in" "[" signed "," signed "]" ";" ;
//   formula     = implication { "iff" implication } ;
//   implication = disjunction [ "implies" implication ] ;
//   disjunction = conjunction { "or" conjunction } ;
//   conjunction = unary { "and" unary } ;
//   unary       = "not" unary
//               | ( "exists" | "forall" ) ident { "," ident } "." formula
//               | "true" | "false" | comparison | "(" formula ")" ;
//   comparison  = expr relop expr { relop expr } ;
//   relop       = "<" | "<=" | "=" | ">=" | ">" | "!=" ;
//   expr        = term { ( "+" | "-" ) term } ;
//   term        = factor { ( "*" | "/" ) factor } ;
//   factor      = "-" factor | power ;
//   power       = primary [ "^" factor ] ;
//   primary     = number | ident | ident "(" expr { "," expr } ")" | "(" expr ")" ;
//
// '#' starts a comment running to the end of the line.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vclab/dsl/ast.hpp"
#include "vclab/dsl/printer.hpp"

namespace vclab::dsl {

class ParseError : public ConfigError {
 public:
  enum class Kind { syntax, undeclared_variable, quantified_parameter, signature, declaration };

  ParseError(Kind kind, std::size_t offset, std::size_t line, std::size_t column, const std::string& message)
      : ConfigError(message), kind_(kind), offset_(offset), line_(line), column_(column) {}

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  Kind kind_;
  std::size_t offset_, line_, column_;
};

namespace detail {

struct Token {
  enum class Type { ident, number, symbol, end };
  Type type = Type::end;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

inline bool is_keyword(std::string_view s) {
  static constexpr std::string_view kw[] = {"and",  "or",   "not",   "implies", "iff",  "exists", "forall",
                                            "true", "false", "param", "data",    "level", "range",  "in"};
  return std::find(std::begin(kw), std::end(kw), s) != std::end(kw);
}

class Parser {
 public:
  Parser(std::string_view src, Declarations decls, bool with_declarations)
      : src_(src), decls_(std::move(decls)), with_decls_(with_declarations) {
    tokenize();
  }

  ParsedFormula run() {
    if (with_decls_) declarations();
    check_declarations();
    for (const auto& p : decls_.params) names_.push_back(p);
    for (const auto& d : decls_.data) names_.push_back(d);
    ParsedFormula out;
    out.root = formula();
    if (peek_sym(";")) ++i_;
    if (tok().type != Token::Type::end) fail_expected("end of input");
    out.decls = decls_;
    out.slot_count = names_.size();
    out.slot_names = names_;
    out.warnings = warnings_;
    out.required_level = required_;
    return out;
  }

 private:
  // -------------------------------------------------------------------- lexer
  void tokenize() {
    std::size_t p = 0;
    while (true) {
      while (p < src_.size()) {
        if (std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
        else if (src_[p] == '#') {
          while (p < src_.size() && src_[p] != '\n') ++p;
        } else break;
      }
      Token t;
      t.pos = p;
      if (p >= src_.size()) {
        tokens_.push_back(t);
        return;
      }
      const char c = src_[p];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t q = p;
        while (q < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[q])) || src_[q] == '_')) ++q;
        t.type = Token::Type::ident;
        t.text = std::string(src_.substr(p, q - p));
        p = q;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t q = p;
        while (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
        if (q + 1 < src_.size() && src_[q] == '.' && std::isdigit(static_cast<unsigned char>(src_[q + 1]))) {
          ++q;
          while (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
        }
        if (q < src_.size() && (src_[q] == 'e' || src_[q] == 'E')) {
          std::size_t r = q + 1;
          if (r < src_.size() && (src_[r] == '+' || src_[r] == '-')) ++r;
          if (r < src_.size() && std::isdigit(static_cast<unsigned char>(src_[r]))) {
            while (r < src_.size() && std::isdigit(static_cast<unsigned char>(src_[r]))) ++r;
            q = r;
          }
        }
        t.type = Token::Type::number;
        t.text = std::string(src_.substr(p, q - p));
        std::from_chars(src_.data() + p, src_.data() + q, t.number);
        p = q;
      } else {
        static constexpr std::string_view two[] = {"<=", ">=", "!="};
        static constexpr std::string_view one = "+-*/^(),.;<=>[]";
        t.type = Token::Type::symbol;
        for (auto s : two)
          if (src_.substr(p, 2) == s) t.text = std::string(s);
        if (t.text.empty()) {
          if (one.find(c) == std::string_view::npos) syntax_error(p, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, c);
        }
        p += t.text.size();
      }
      tokens_.push_back(std::move(t));
    }
  }

  // ------------------------------------------------------------------ helpers
  const Token& tok() const { return tokens_[i_]; }
  bool peek_sym(std::string_view s) const { return tok().type == Token::Type::symbol && tok().text == s; }
  bool peek_word(std::string_view s) const { return tok().type == Token::Type::ident && tok().text == s; }

  std::pair<std::size_t, std::size_t> line_col(std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < offset && k < src_.size(); ++k) {
      if (src_[k] == '\n') ++line, col = 1;
      else ++col;
    }
    return {line, col};
  }

  [[noreturn]] void error(ParseError::Kind kind, std::size_t offset, const std::string& what) const {
    const auto [line, col] = line_col(offset);
    const char* prefix = kind == ParseError::Kind::syntax ? "syntax error" : "error";
    throw ParseError(kind, offset, line, col,
                     std::string(prefix) + " at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  }
  [[noreturn]] void syntax_error(std::size_t offset, const std::string& what) const {
    error(ParseError::Kind::syntax, offset, what);
  }
  [[noreturn]] void fail_expected(const std::string& what) const {
    const std::string found = tok().type == Token::Type::end ? "end of input" : "'" + tok().text + "'";
    syntax_error(tok().pos, "expected " + what + ", found " + found);
  }

  void expect_sym(std::string_view s) {
    if (!peek_sym(s)) fail_expected("'" + std::string(s) + "'");
    ++i_;
  }
  std::string expect_ident() {
    if (tok().type != Token::Type::ident || is_keyword(tok().text)) fail_expected("an identifier");
    return tokens_[i_++].text;
  }

  // ------------------------------------------------------------- declarations
  void declarations() {
    while (tok().type == Token::Type::ident) {
      const auto& word = tok().text;
      const std::size_t at = tok().pos;
      if (word == "param" || word == "data") {
        auto& list = word == "param" ? decls_.params : decls_.data;
        ++i_;
        list.push_back(expect_ident());
        while (peek_sym(",")) {
          ++i_;
          list.push_back(expect_ident());
        }
        expect_sym(";");
      } else if (word == "level") {
        ++i_;
        const std::size_t lp = tok().pos;
        const auto name = expect_ident();
        const auto level = parse_level(name);
        if (!level) error(ParseError::Kind::declaration, lp, "unknown level '" + name + "'");
        decls_.level = *level;
        expect_sym(";");
      } else if (word == "range") {
        ++i_;
        const auto name = expect_ident();
        if (!peek_word("in")) fail_expected("'in'");
        ++i_;
        expect_sym("[");
        const double lo = signed_number();
        expect_sym(",");
        const double hi = signed_number();
        expect_sym("]");
        expect_sym(";");
        if (!(lo < hi)) error(ParseError::Kind::declaration, at, "empty range for '" + name + "'");
        decls_.ranges[name] = {lo, hi};
      } else {
        break;
      }
    }
  }

  double signed_number() {
    bool neg = false;
    if (peek_sym("-")) neg = true, ++i_;
    if (tok().type != Token::Type::number) fail_expected("a number");
    const double v = tokens_[i_++].number;
    return neg ? -v : v;
  }

  void check_declarations() const {
    std::set<std::string> seen;
    for (const auto* list : {&decls_.params, &decls_.data})
      for (const auto& n : *list) {
        if (is_keyword(n) || find_function(n))
          error(ParseError::Kind::declaration, 0, "'" + n + "' is reserved and cannot name a variable");
        if (!seen.insert(n).second) error(ParseError::Kind::declaration, 0, "variable '" + n + "' declared twice");
      }
  }

  // ----------------------------------------------------------------- formulas
  struct State {
    std::size_t i, scope, names, warnings;
    Level required;
  };
  State save() const { return {i_, scope_.size(), names_.size(), warnings_.size(), required_}; }
  void restore(const State& s) {
    i_ = s.i;
    scope_.resize(s.scope);
    names_.resize(s.names);
    warnings_.resize(s.warnings);
    required_ = s.required;
  }

  static FormulaPtr binary(Formula::Kind k, FormulaPtr l, FormulaPtr r, std::size_t pos) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->children = {std::move(l), std::move(r)};
    f->pos = pos;
    return f;
  }

  FormulaPtr formula() {
    auto f = implication();
    while (peek_word("iff")) {
      const std::size_t at = tok().pos;
      ++i_;
      f = binary(Formula::Kind::equivalence, f, implication(), at);
    }
    return f;
  }
  FormulaPtr implication() {
    auto f = disjunction();
    if (peek_word("implies")) {
      const std::size_t at = tok().pos;
      ++i_;
      return binary(Formula::Kind::implication, f, implication(), at);
    }
    return f;
  }
  FormulaPtr disjunction() {
    auto f = conjunction();
    while (peek_word("or")) {
      const std::size_t at = tok().pos;
      ++i_;
      f = binary(Formula::Kind::disjunction, f, conjunction(), at);
    }
    return f;
  }
  FormulaPtr conjunction() {
    auto f = unary();
    while (peek_word("and")) {
      const std::size_t at = tok().pos;
      ++i_;
      f = binary(Formula::Kind::conjunction, f, unary(), at);
    }
    return f;
  }

  FormulaPtr unary() {
    const std::size_t at = tok().pos;
    if (peek_word("not")) {
      ++i_;
      auto f = std::make_shared<Formula>();
      f->kind = Formula::Kind::negation;
      f->children = {unary()};
      f->pos = at;
      return f;
    }
    if (peek_word("exists") || peek_word("forall")) return quantifier();
    if (peek_word("true") || peek_word("false")) {
      auto f = std::make_shared<Formula>();
      f->kind = Formula::Kind::truth;
      f->truth = tok().text == "true";
      f->pos = at;
      ++i_;
      return f;
    }
    if (peek_sym("(")) {
      // Either a parenthesized formula or a comparison starting with a
      // parenthesized term; try the comparison first.
      const auto state = save();
      try {
        return comparison();
      } catch (const ParseError& first) {
        if (first.kind() != ParseError::Kind::syntax) throw;
        restore(state);
        try {
          ++i_;
          auto f = formula();
          expect_sym(")");
          return f;
        } catch (const ParseError& second) {
          if (second.kind() != ParseError::Kind::syntax || second.offset() >= first.offset()) throw;
          throw first;
        }
      }
    }
    return comparison();
  }

  FormulaPtr quantifier() {
    auto f = std::make_shared<Formula>();
    f->kind = peek_word("exists") ? Formula::Kind::exists : Formula::Kind::forall;
    f->pos = tok().pos;
    ++i_;
    const std::size_t depth = scope_.size();
    do {
      if (!f->vars.empty()) ++i_;
      const std::size_t at = tok().pos;
      const auto name = expect_ident();
      if (std::find(decls_.params.begin(), decls_.params.end(), name) != decls_.params.end())
        error(ParseError::Kind::quantified_parameter, at,
              "quantified parameter '" + name + "': parameters index the family and must stay free");
      if (find_function(name)) error(ParseError::Kind::declaration, at, "'" + name + "' is reserved");
      f->vars.push_back(name);
      f->slots.push_back(static_cast<int>(names_.size()));
      names_.push_back(name);
    } while (peek_sym(","));
    expect_sym(".");
    for (std::size_t k = 0; k < f->vars.size(); ++k) scope_.emplace_back(f->vars[k], f->slots[k]);
    f->children = {formula()};
    scope_.resize(depth);
    return f;
  }

  static std::optional<RelOp> relop(const Token& t) {
    if (t.type != Token::Type::symbol) return std::nullopt;
    if (t.text == "<") return RelOp::lt;
    if (t.text == "<=") return RelOp::le;
    if (t.text == "=") return RelOp::eq;
    if (t.text == ">=") return RelOp::ge;
    if (t.text == ">") return RelOp::gt;
    if (t.text == "!=") return RelOp::ne;
    return std::nullopt;
  }

  static void collect_denominators(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (e->kind == Expr::Kind::div) {
      const auto& d = e->args[1];
      if (std::none_of(out.begin(), out.end(), [&](const ExprPtr& g) { return *g == *d; })) out.push_back(d);
    }
    for (const auto& a : e->args) collect_denominators(a, out);
  }

  FormulaPtr comparison() {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::compare;
    f->pos = tok().pos;
    f->operands.push_back(expr());
    if (!relop(tok())) fail_expected("a comparison operator");
    while (auto op = relop(tok())) {
      ++i_;
      f->ops.push_back(*op);
      f->operands.push_back(expr());
    }
    for (const auto& e : f->operands) collect_denominators(e, f->guards);
    for (const auto& g : f->guards) {
      const std::string w = "division by '" + print(*g) + "': the atom is false where it vanishes";
      if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(w);
    }
    return f;
  }

  // -------------------------------------------------------------- expressions
  static ExprPtr node(Expr::Kind k, std::vector<ExprPtr> args, std::size_t pos) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->args = std::move(args);
    e->pos = pos;
    return e;
  }

  ExprPtr expr() {
    auto e = term();
    while (peek_sym("+") || peek_sym("-")) {
      const auto k = tok().text == "+" ? Expr::Kind::add : Expr::Kind::sub;
      const std::size_t at = tok().pos;
      ++i_;
      e = node(k, {e, term()}, at);
    }
    return e;
  }
  ExprPtr term() {
    auto e = factor();
    while (peek_sym("*") || peek_sym("/")) {
      const auto k = tok().text == "*" ? Expr::Kind::mul : Expr::Kind::div;
      const std::size_t at = tok().pos;
      ++i_;
      e = node(k, {e, factor()}, at);
    }
    return e;
  }
  ExprPtr factor() {
    if (peek_sym("-")) {
      const std::size_t at = tok().pos;
      ++i_;
      return node(Expr::Kind::neg, {factor()}, at);
    }
    return power();
  }

  static bool integer_constant(const Expr& e) {
    if (e.kind == Expr::Kind::neg) return integer_constant(*e.args[0]);
    return e.kind == Expr::Kind::number && std::floor(e.value) == e.value;
  }

  void need_level(Level l, std::size_t at, const std::string& what) {
    if (static_cast<int>(l) > static_cast<int>(decls_.level))
      error(ParseError::Kind::signature, at,
            what + " requires " + to_string(l) + " (declared level is " + to_string(decls_.level) + ")");
    required_ = std::max(required_, l);
  }

  ExprPtr power() {
    auto base = primary();
    if (!peek_sym("^")) return base;
    const std::size_t at = tok().pos;
    ++i_;
    auto exponent = factor();
    if (!integer_constant(*exponent)) need_level(Level::R_exp, at, "a non-integer exponent '^'");
    return node(Expr::Kind::pow, {base, exponent}, at);
  }

  ExprPtr primary() {
    const Token& t = tok();
    if (t.type == Token::Type::number) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::number;
      e->value = t.number;
      e->pos = t.pos;
      ++i_;
      return e;
    }
    if (peek_sym("(")) {
      ++i_;
      auto e = expr();
      expect_sym(")");
      return e;
    }
    if (t.type != Token::Type::ident || is_keyword(t.text)) fail_expected("a term");
    const std::string name = t.text;
    const std::size_t at = t.pos;
    ++i_;
    if (peek_sym("(")) {
      const auto* fn = find_function(name);
      if (!fn) error(ParseError::Kind::signature, at, "unknown function '" + name + "'");
      need_level(fn->level, at, std::string(fn->name));
      ++i_;
      std::vector<ExprPtr> args{expr()};
      while (peek_sym(",")) {
        ++i_;
        args.push_back(expr());
      }
      expect_sym(")");
      if (args.size() != fn->arity)
        error(ParseError::Kind::signature, at, name + " takes " + std::to_string(fn->arity) + " argument(s)");
      auto e = node(Expr::Kind::call, std::move(args), at);
      std::const_pointer_cast<Expr>(e)->name = name;
      return e;
    }
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::variable;
    e->name = name;
    e->pos = at;
    e->slot = resolve(name, at);
    return e;
  }

  int resolve(const std::string& name, std::size_t at) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return it->second;
    for (std::size_t k = 0; k < decls_.data.size(); ++k)
      if (decls_.data[k] == name) return static_cast<int>(decls_.params.size() + k);
    for (std::size_t k = 0; k < decls_.params.size(); ++k)
      if (decls_.params[k] == name) return static_cast<int>(k);
    if (find_function(name)) error(ParseError::Kind::syntax, at, "function '" + name + "' used without arguments");
    error(ParseError::Kind::undeclared_variable, at, "undeclared variable '" + name + "'");
  }

  std::string_view src_;
  Declarations decls_;
  bool with_decls_;
  std::vector<Token> tokens_;
  std::size_t i_ = 0;
  std::vector<std::pair<std::string, int>> scope_;
  std::vector<std::string> names_;
  std::vector<std::string> warnings_;
  Level required_ = Level::R_alg;
};

}  // namespace detail

/// Parses a bare formula against given declarations.
inline ParsedFormula parse(std::string_view source, const Declarations& decls) {
  return detail::Parser(source, decls, false).run();
}

/// Parses a formula file: declarations followed by the formula.
inline ParsedFormula parse_file(std::string_view text, std::string id = {}) {
  auto pf = detail::Parser(text, {}, true).run();
  pf.id = std::move(id);
  return pf;
}

inline ParsedFormula load_formula_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open formula file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto stem = path.substr(path.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find_last_of('.'));
  return parse_file(ss.str(), stem);
}

}  // namespace vclab::dsl
