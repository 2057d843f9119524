#include <gtest/gtest.h>

#include "vclab/dsl.hpp"
#include "vclab/families.hpp"

using namespace vclab;
using namespace vclab::dsl;

namespace {

Declarations decls(std::vector<std::string> params, std::vector<std::string> data, Level level = Level::R_alg) {
  Declarations d;
  d.params = std::move(params);
  d.data = std::move(data);
  d.level = level;
  return d;
}

std::string formula_path(const std::string& file) { return std::string(VCLAB_FORMULA_DIR) + "/" + file; }

ParseError parse_error(std::string_view src, const Declarations& d) {
  try {
    parse(src, d);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for: " << src;
  return ParseError(ParseError::Kind::syntax, 0, 0, 0, "");
}

}  // namespace

TEST(Parse, Semispace) {
  const auto pf = parse("b1*x1 + b2*x2 + b3 < 0", decls({"b1", "b2", "b3"}, {"x1", "x2"}));
  EXPECT_EQ(certify(pf).d, 3u);
  const std::vector<double> x{1.0, 1.0}, b{1.0, 1.0, -3.0};
  EXPECT_TRUE(eval_formula(pf, x, b));
  const std::vector<double> b2{1.0, 1.0, -1.0};
  EXPECT_FALSE(eval_formula(pf, x, b2));
}

TEST(Parse, ExpNeedsExponentialLevel) {
  const std::string src = "exists y . (exp(lam*y) - 1 = z) and (exp(y) = x)";
  const auto e = parse_error(src, decls({"lam"}, {"x", "z"}));
  EXPECT_EQ(e.kind(), ParseError::Kind::signature);
  EXPECT_NE(std::string(e.what()).find("exp requires R_exp"), std::string::npos) << e.what();
  const auto pf = parse(src, decls({"lam"}, {"x", "z"}, Level::R_exp));
  EXPECT_EQ(certify(pf).d, 1u);
  EXPECT_EQ(pf.required_level, Level::R_exp);
}

TEST(Parse, SymbolsNeedTheirLevels) {
  EXPECT_EQ(parse_error("Phi(x) < 1", decls({"a"}, {"x"}, Level::R_an_exp)).kind(), ParseError::Kind::signature);
  EXPECT_NO_THROW(parse("Phi(x) < a", decls({"a"}, {"x"}, Level::R_an_Pfaff)));
  EXPECT_EQ(parse_error("x^a < 1", decls({"a"}, {"x"})).kind(), ParseError::Kind::signature);  // non-integer power
  EXPECT_NO_THROW(parse("x^3 < a", decls({"a"}, {"x"})));
  EXPECT_EQ(parse_error("exp(x, a) < 1", decls({"a"}, {"x"}, Level::R_exp)).kind(), ParseError::Kind::signature);
  EXPECT_EQ(parse_error("nosuch(x) < a", decls({"a"}, {"x"}, Level::R_an_Pfaff)).kind(), ParseError::Kind::signature);
}

TEST(Parse, QuantifiedParameterRejected) {
  const auto e = parse_error("exists lam . lam*x < 1", decls({"lam"}, {"x"}));
  EXPECT_EQ(e.kind(), ParseError::Kind::quantified_parameter);
}

TEST(Parse, UndeclaredVariableRejected) {
  const auto e = parse_error("a*x + w < 0", decls({"a"}, {"x"}));
  EXPECT_EQ(e.kind(), ParseError::Kind::undeclared_variable);
  EXPECT_EQ(e.offset(), 6u);
  // Bound variables go out of scope after their body.
  EXPECT_EQ(parse_error("(exists y . y < x) and y < a", decls({"a"}, {"x"})).kind(), ParseError::Kind::undeclared_variable);
}

TEST(Parse, SyntaxErrorPosition) {
  const auto e = parse_error("a*x <\n  (x + ) ", decls({"a"}, {"x"}));
  EXPECT_EQ(e.kind(), ParseError::Kind::syntax);
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 8u);
  EXPECT_NE(std::string(e.what()).find("line 2, column 8"), std::string::npos) << e.what();
  EXPECT_EQ(parse_error("a < x x", decls({"a"}, {"x"})).kind(), ParseError::Kind::syntax);
  EXPECT_EQ(parse_error("", decls({"a"}, {"x"})).kind(), ParseError::Kind::syntax);
}

TEST(Parse, DeclarationErrors) {
  EXPECT_THROW(parse_file("param a; data a; a < 1"), ParseError);
  EXPECT_THROW(parse_file("param a; level R_bogus; a < 1"), ParseError);
  EXPECT_THROW(parse_file("param a; data x; range y in [2, 1]; exists y . y < a"), ParseError);
}

TEST(Parse, DivisionAddsGuardAndWarning) {
  const auto pf = parse("t <= (x - 1)/lam", decls({"lam"}, {"x", "t"}));
  EXPECT_FALSE(pf.warnings.empty());
  EXPECT_EQ(pf.root->guards.size(), 1u);
  const std::vector<double> data{2.0, 0.5}, zero{0.0}, one{1.0};
  EXPECT_FALSE(eval_formula(pf, data, zero));  // guard fails where the denominator vanishes
  EXPECT_TRUE(eval_formula(pf, data, one));
}

TEST(Print, RoundTrip) {
  const std::vector<std::string> sources{
      "not (a < x) or x = a implies a - -x >= 2^3",
      "(a < x iff x < a) and true",
      "forall y . exists z . y*z <= a + x",
      "a < x <= 2*a",
      "-(x - a)^2 != a/(x + 1)",
  };
  Declarations d = decls({"a"}, {"x"});
  d.ranges["y"] = {-1.0, 1.0};
  d.ranges["z"] = {-2.0, 2.0};
  for (const auto& s : sources) {
    const auto pf = parse(s, d);
    const auto again = parse(print(*pf.root), d);
    EXPECT_TRUE(*pf.root == *again.root) << s << "  printed as  " << print(*pf.root);
  }
}

TEST(Print, FileRoundTrip) {
  for (const char* f : {"semispace.fml", "x_lambda.fml", "t_lambda_subgraph.fml", "eta3_subgraph.fml", "gaussian_link.fml"}) {
    const auto pf = load_formula_file(formula_path(f));
    const auto again = parse_file(print(pf));
    EXPECT_TRUE(*pf.root == *again.root) << f;
    EXPECT_EQ(again.decls.params, pf.decls.params);
    EXPECT_EQ(again.decls.level, pf.decls.level);
  }
}

TEST(Certify, ShippedFormulas) {
  const std::vector<std::pair<std::string, std::size_t>> want{
      {"semispace.fml", 3}, {"x_lambda.fml", 1}, {"t_lambda_subgraph.fml", 1}, {"eta3_subgraph.fml", 12}, {"gaussian_link.fml", 4}};
  for (const auto& [file, d] : want) {
    const auto c = certify(load_formula_file(formula_path(file)));
    EXPECT_EQ(c.d, d) << file;
    EXPECT_EQ(c.density_bound, d) << file;
    EXPECT_TRUE(c.envelope_required);
    EXPECT_EQ(c.to_json()["d"], d);
  }
  EXPECT_THROW(load_formula_file(formula_path("missing.fml")), ConfigError);
}

TEST(Certify, LevelMonotone) {
  const std::string body = "param lam; data x, t;\n(0 <= t and t <= (x^lam - 1)/lam) or (0 >= t and t >= (x^lam - 1)/lam)";
  EXPECT_THROW(parse_file("level R_alg;\n" + body), ParseError);
  for (const char* lvl : {"R_exp", "R_an_exp", "R_an_Pfaff"}) {
    const auto c = certify(parse_file(std::string("level ") + lvl + ";\n" + body));
    EXPECT_EQ(c.d, 1u);
    EXPECT_EQ(to_string(c.level), lvl);
  }
}

TEST(Levels, ParseAndOrder) {
  EXPECT_EQ(parse_level("R_an_exp"), Level::R_an_exp);
  EXPECT_FALSE(parse_level("R_bogus"));
  EXPECT_LT(Level::R_alg, Level::R_exp);
  EXPECT_LT(Level::R_an_exp, Level::R_an_Pfaff);
}

TEST(Eval, XLambdaAtTwo) {
  const auto pf = load_formula_file(formula_path("x_lambda.fml"));
  const std::vector<double> two{2.0}, half{0.5}, one{1.0}, minus{-1.5};
  EXPECT_TRUE(eval_formula(pf, two, one));
  EXPECT_FALSE(eval_formula(pf, half, one));
  EXPECT_TRUE(eval_formula(pf, two, minus));
  EXPECT_THROW(eval_formula(pf, two, std::vector<double>{}), ContractError);
}

TEST(Eval, UnboundedQuantifierNeedsBox) {
  const auto pf = parse("exists y . y*y = x + a", decls({"a"}, {"x"}));
  const std::vector<double> x{4.0}, a{0.0};
  EXPECT_THROW(eval_formula(pf, x, a), ConfigError);
  EvalOptions opt;
  opt.boxes["y"] = {-3.0, 3.0};
  EXPECT_TRUE(eval_formula(pf, x, a, opt));
  const std::vector<double> neg{-5.0};
  EXPECT_FALSE(eval_formula(pf, neg, a, opt));
}

TEST(Eval, SemispaceAgreesWithHalfPlanes) {
  const auto pf = load_formula_file(formula_path("semispace.fml"));
  const auto f = halfplane_family(HalfPlaneVariant::all);
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto p = f.sample_params(rng);
    const auto x = f.sample_points(1, rng);
    ASSERT_EQ(eval_formula(pf, x[0], p), f.contains(p, x[0]));
  }
}

TEST(Eval, TLambdaAgreesWithBuiltIn) {
  const auto pf = load_formula_file(formula_path("t_lambda_subgraph.fml"));
  const auto f = t_lambda_family();
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto p = f.sample_params(rng);
    const auto x = f.sample_points(1, rng);
    ASSERT_EQ(eval_formula(pf, x[0], p), f.contains(p, x[0])) << x[0][0] << " " << x[0][1] << " " << p[0];
  }
}
