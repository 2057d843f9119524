#include <gtest/gtest.h>

#include <cmath>

#include "vclab/descriptor.hpp"
#include "vclab/families.hpp"

using namespace vclab;

TEST(NormalCdf, KnownValues) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(normal_cdf(-1.959963984540054), 0.025, 1e-15);
  // Far left tail keeps relative accuracy.
  EXPECT_NEAR(normal_cdf(-10.0) / 7.619853024160527e-24, 1.0, 1e-12);
}

TEST(BoxCox, ValuesAndDomain) {
  EXPECT_NEAR(box_cox(1.0, 3.0), 2.0, 1e-15);
  EXPECT_NEAR(box_cox(2.0, 3.0), 4.0, 1e-15);
  EXPECT_NEAR(box_cox(-1.0, 2.0), 0.5, 1e-15);
  EXPECT_NEAR(box_cox(1e-12, std::exp(1.0)), 1.0, 1e-10);  // -> ln x as lambda -> 0
  EXPECT_DOUBLE_EQ(box_cox(0.5, 0.0), -2.0);
  EXPECT_THROW(box_cox(0.0, 2.0), ContractError);
  EXPECT_THROW(box_cox(-1.0, 0.0), ContractError);
}

TEST(TLambda, ClosedLowerConvention) {
  const auto f = t_lambda_family();
  // (x, 0) belongs to every subgraph, (x, T(x)) with T(x) < 0 too.
  EXPECT_TRUE(f.contains(Params{2.0}, std::vector<double>{0.5, 0.0}));
  EXPECT_TRUE(f.contains(Params{1.0}, std::vector<double>{0.5, -0.5}));
  EXPECT_FALSE(f.contains(Params{1.0}, std::vector<double>{0.5, -0.6}));
  EXPECT_TRUE(f.contains(Params{1.0}, std::vector<double>{3.0, 2.0}));
  EXPECT_FALSE(f.contains(Params{1.0}, std::vector<double>{3.0, 2.0000001}));
  EXPECT_THROW(f.validate_params(Params{0.0}), ContractError);
}

TEST(XLambda, IsHalfLineFromOne) {
  const auto f = x_lambda_family();
  for (double l : {-2.0, -0.3, 0.7, 3.0}) {
    EXPECT_FALSE(f.contains(Params{l}, std::vector<double>{0.0}));
    EXPECT_FALSE(f.contains(Params{l}, std::vector<double>{0.99}));
    EXPECT_TRUE(f.contains(Params{l}, std::vector<double>{1.0}));
    EXPECT_TRUE(f.contains(Params{l}, std::vector<double>{2.0}));
  }
}

TEST(HalfPlane, VariantsSplitBySign) {
  const auto up = halfplane_family(HalfPlaneVariant::upper);
  const auto lo = halfplane_family(HalfPlaneVariant::lower);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    EXPECT_LT(up.sample_params(rng)[1], 0.0);
    EXPECT_GT(lo.sample_params(rng)[1], 0.0);
  }
}

TEST(FinitePowerset, MemberIsSelectedSubset) {
  const auto f = finite_powerset_family({0.1, 0.2, 0.3});
  EXPECT_TRUE(f.contains(Params{5.0}, std::vector<double>{0.1}));
  EXPECT_FALSE(f.contains(Params{5.0}, std::vector<double>{0.2}));
  EXPECT_TRUE(f.contains(Params{5.0}, std::vector<double>{0.3}));
  EXPECT_FALSE(f.contains(Params{7.0}, std::vector<double>{0.25}));
  EXPECT_THROW(f.validate_params(Params{8.0}), ContractError);
  EXPECT_THROW(f.validate_params(Params{1.5}), ContractError);
  EXPECT_THROW(finite_powerset_family({0.1, 0.1}), ConfigError);
}

TEST(ShiftedUnion, ConstructionExamples) {
  {
    const auto f = shifted_union_family(1, {0.5});
    const auto& m = *f.model_as<ShiftedUnionModel>();
    EXPECT_EQ(m.block_count(), 2u);
    EXPECT_DOUBLE_EQ(m.radius(), 0.125);
    EXPECT_FALSE(f.contains(Params{-1.0}, std::vector<double>{0.5}));
    EXPECT_TRUE(f.contains(Params{-2.0}, std::vector<double>{0.5}));
  }
  {
    const auto f = shifted_union_family(2, {0.25, 0.75});
    const std::vector<std::string> expect{"00", "10", "01", "11"};
    for (int k = 1; k <= 4; ++k) {
      const auto t = trace(f, Params{-static_cast<double>(k)}, PointSet::on_line(std::vector<double>{0.25, 0.75}));
      EXPECT_EQ(t.to_string(), expect[k - 1]) << "shift -" << k;
    }
  }
}

TEST(ShiftedUnion, EveryShiftCutsItsSubset) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto f = shifted_union_family(n);
    const auto& m = *f.model_as<ShiftedUnionModel>();
    const auto anchors = PointSet::on_line(m.anchors());
    for (std::uint64_t i = 1; i <= m.block_count(); ++i)
      ASSERT_EQ(trace(f, Params{-static_cast<double>(i)}, anchors), Trace::from_mask(n, i - 1)) << "N=" << n << " i=" << i;
  }
}

TEST(ShiftedUnion, BlocksLiveInDisjointWindows) {
  const auto f = shifted_union_family(4);
  const auto& m = *f.model_as<ShiftedUnionModel>();
  for (const auto& iv : m.shifted_union().intervals()) {
    EXPECT_EQ(std::floor(iv.lo), std::floor(iv.hi));
    EXPECT_GE(iv.lo, 1.0);
  }
  EXPECT_EQ(m.shifted_union().interval_count(), 4u * 8u);
}

TEST(ShiftedUnion, Rejections) {
  EXPECT_THROW(shifted_union_family(21), ConfigError);
  EXPECT_THROW(shifted_union_family(2, {0.5, 0.4}), ConfigError);
  EXPECT_THROW(shifted_union_family(1, {1.0}), ConfigError);
}

TEST(PiecewiseLink, TailConstantsAndValues) {
  const std::vector<double> a{0.0, 1.0}, b{0.25, 0.75};
  const auto t = link_tails(a, b);
  EXPECT_DOUBLE_EQ(t.B1, 0.25);
  EXPECT_DOUBLE_EQ(t.c1, 2.0);
  EXPECT_DOUBLE_EQ(t.Bk, 0.25);
  EXPECT_DOUBLE_EQ(t.ck, 2.0);
  EXPECT_NEAR(eval_link(a, b, -1.0), 0.25 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(eval_link(a, b, -1.0), 0.03383, 1e-5);
  EXPECT_DOUBLE_EQ(eval_link(a, b, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(eval_link(a, b, 0.0), 0.25);
  EXPECT_NEAR(eval_link(a, b, 2.0), 1.0 - 0.25 * std::exp(-2.0), 1e-15);
}

TEST(PiecewiseLink, ValueAndSlopeContinuousAtOuterKnots) {
  Rng rng(17);
  const auto f = piecewise_link_family(4, 1);
  const auto& m = *f.model_as<PiecewiseLinkModel>();
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = f.sample_params(rng);
    const auto a = m.a(p), b = m.b(p);
    const auto tails = link_tails(a, b);
    const std::size_t k = a.size();
    const double slopes[2] = {(b[1] - b[0]) / (a[1] - a[0]), (b[k - 1] - b[k - 2]) / (a[k - 1] - a[k - 2])};
    const double rates[2] = {tails.c1, tails.ck};
    for (int side = 0; side < 2; ++side) {
      const double knot = side == 0 ? a.front() : a.back();
      const double h = 1e-7 * std::max(1.0, std::abs(knot));
      const double left = eval_link(a, b, knot - h), mid = eval_link(a, b, knot), right = eval_link(a, b, knot + h);
      EXPECT_DOUBLE_EQ(mid, side == 0 ? b.front() : b.back());
      // One-sided difference quotients match the linear piece's slope up to
      // the O(h) curvature of the exponential tail.
      const double tol = slopes[side] * rates[side] * h + 1e-7;
      EXPECT_NEAR((mid - left) / h, slopes[side], tol);
      EXPECT_NEAR((right - mid) / h, slopes[side], tol);
    }
  }
}

TEST(PiecewiseLink, RejectsUnorderedKnots) {
  const auto f = piecewise_link_family(2, 1);
  EXPECT_THROW(f.validate_params(Params{1.0, 0.0, 0.2, 0.8, 1.0}), ContractError);
  EXPECT_THROW(f.validate_params(Params{0.0, 1.0, 0.8, 0.2, 1.0}), ContractError);
  EXPECT_THROW(f.validate_params(Params{0.0, 1.0, 0.0, 0.8, 1.0}), ContractError);
  EXPECT_NO_THROW(f.validate_params(Params{0.0, 1.0, 0.2, 0.8, 1.0}));
}

TEST(GaussianLink, MonotoneAlongBeta) {
  const auto f = gaussian_link_family(2);
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = f.sample_params(rng);
    const double norm2 = p[2] * p[2] + p[3] * p[3];
    if (norm2 < 1e-6) continue;
    double prev = -1.0;
    for (int s = -20; s <= 20; ++s) {
      const double u = 0.05 * s;
      const std::vector<double> x{u * p[2] / std::sqrt(norm2), u * p[3] / std::sqrt(norm2)};
      const double v = f.evaluate(p, x);
      EXPECT_GE(v, prev);  // strict until the cdf saturates in double precision
      prev = v;
    }
    EXPECT_GT(prev, f.evaluate(p, std::vector<double>{-p[2] / std::sqrt(norm2), -p[3] / std::sqrt(norm2)}));
  }
}

TEST(Harmonic2D, EnvelopeBounded) {
  const auto f = harmonic2d_family(2);
  const auto& m = *f.model_as<Harmonic2DModel>();
  Rng rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = f.sample_params(rng);
    const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    EXPECT_LE(std::abs(f.evaluate(p, x)), std::max(m.floor_value(), m.sup_bound()));
    EXPECT_DOUBLE_EQ(f.evaluate(p, std::vector<double>{p[4], p[5]}), -m.floor_value());
  }
  EXPECT_THROW(harmonic2d_family(1, {}, 0.0), ConfigError);
  EXPECT_THROW(harmonic2d_family(1, {1.0, 2.0}), ConfigError);
  EXPECT_THROW(f.validate_params(Params{1, 2, 2, 4, 0, 0}), ContractError);
}

// Subgraph membership through the family agrees with the inequality written out.
TEST(Subgraphs, MembershipMatchesDirectInequality) {
  const std::vector<FamilyHandle> fams{t_lambda_family(), piecewise_link_family(3, 2), gaussian_link_family(2),
                                       harmonic2d_family(1)};
  for (const auto& f : fams) {
    Rng rng(derive_seed(21, {tag_hash(f.name())}));
    const auto pts = f.sample_points(10000, rng);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto p = f.sample_params(rng);
      const auto pt = pts[i];
      const double v = f.evaluate(p, pt.first(pt.size() - 1));
      const double t = pt.back();
      const bool direct = f.convention() == SubgraphConvention::open_lower ? (0 <= t && t <= v) || (0 > t && t > v)
                                                                            : (0 <= t && t <= v) || (0 >= t && t >= v);
      ASSERT_EQ(f.contains(p, pt), direct) << f.name();
    }
  }
}

TEST(Union, EncodesComponents) {
  const auto u = union_family({halfplane_family(HalfPlaneVariant::upper), halfplane_family(HalfPlaneVariant::lower)});
  const auto& m = *u.model_as<UnionModel>();
  EXPECT_EQ(u.param_dim(), 4u);
  EXPECT_EQ(u.certified_bound(), 3);
  const auto p = m.encode(1, Params{0.0, 1.0, 0.0});
  EXPECT_TRUE(u.contains(p, std::vector<double>{0.0, -1.0}));
  EXPECT_THROW(u.validate_params(m.encode(0, Params{0.0, 1.0, 0.0})), ContractError);
}

TEST(Descriptor, BuildsFamilies) {
  EXPECT_EQ(make_family(json{{"family", "t_lambda"}}).name(), "t_lambda");
  const auto link = make_family(json::parse(R"({"family":"piecewise_link","fixed":{"k":3,"d":2}})"));
  EXPECT_EQ(link.param_dim(), 8u);
  EXPECT_EQ(link.certified_bound(), 10);
  const auto h = make_family(json::parse(R"({"family":"harmonic2d","fixed":{"m":1}})"));
  EXPECT_EQ(h.param_dim(), 6u);
  EXPECT_EQ(h.certified_bound(), 6);
  EXPECT_EQ(make_family(json::parse(R"({"family":"halfplane","fixed":{"variant":"upper"}})")).name(), "halfplane_upper");
  const auto u = make_family(json::parse(
      R"({"family":"union","fixed":{"parts":[{"family":"halfplane","fixed":{"variant":"upper"}},{"family":"halfplane","fixed":{"variant":"lower"}}]}})"));
  EXPECT_EQ(u.certified_bound(), 3);
}

TEST(Descriptor, Errors) {
  EXPECT_THROW(make_family(json{{"family", "nope"}}), ConfigError);
  EXPECT_THROW(make_family(json::parse(R"({"fixed":{}})")), ConfigError);
  EXPECT_THROW(make_family(json::parse(R"({"family":"shifted_union"})")), ConfigError);
  EXPECT_THROW(make_family(json::parse(R"({"family":"shifted_union","fixed":{"N":0}})")), ConfigError);
  EXPECT_THROW(make_family(json::parse(R"({"family":"piecewise_link","fixed":{"k":"two","d":1}})")), ConfigError);
  EXPECT_THROW(make_family(json::parse(R"({"family":"halfplane","fixed":{"variant":"left"}})")), ConfigError);
  EXPECT_THROW(load_family("/nonexistent/family.json"), ConfigError);
}
