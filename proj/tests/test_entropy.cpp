#include <gtest/gtest.h>

#include <cmath>

#include "vclab/entropy.hpp"
#include "vclab/oracles.hpp"

using namespace vclab;

namespace {

DistMatrix line_distances(const std::vector<double>& xs) {
  DistMatrix d(xs.size(), std::vector<double>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) d[i][j] = std::abs(xs[i] - xs[j]);
  return d;
}

ValueMatrix rows_of(const std::vector<std::vector<double>>& r) {
  ValueMatrix v(r.size(), r.front().size());
  for (std::size_t i = 0; i < r.size(); ++i) std::copy(r[i].begin(), r[i].end(), v.row(i));
  return v;
}

// Box-Cox values on a fixed support for lambdas spread over [-3, 3].
ValueMatrix t_lambda_values(std::size_t members, std::size_t support, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs;
  for (std::size_t k = 0; k < support; ++k) xs.push_back(rng.uniform(0.5, 2.0));
  ValueMatrix v(members, support);
  for (std::size_t i = 0; i < members; ++i) {
    double l = rng.uniform(-3.0, 3.0);
    if (l == 0.0) l = 1e-3;
    for (std::size_t k = 0; k < support; ++k) v.row(i)[k] = box_cox(l, xs[k]);
  }
  return v;
}

}  // namespace

TEST(Distance, HandArithmetic) {
  const auto f = t_lambda_family();
  EmpiricalMeasure q{PointSet::on_line(std::vector<double>{1.0, 2.0})};
  const auto d = pairwise_dist(f, {Params{1.0}, Params{2.0}, Params{1.0}}, q, 1);
  EXPECT_DOUBLE_EQ(d[0][1], 0.25);
  EXPECT_DOUBLE_EQ(d[0][2], 0.0);
  const auto d2 = pairwise_dist(f, {Params{1.0}, Params{2.0}}, q, 2);
  EXPECT_DOUBLE_EQ(d2[0][1], std::sqrt(0.125));
}

TEST(Distance, TriangleInequality) {
  const auto v = t_lambda_values(40, 25, 3);
  for (int p : {1, 2}) {
    const auto d = pairwise_dist(v, p);
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = 0; j < 40; ++j) {
        ASSERT_EQ(d[i][j], d[j][i]);
        for (std::size_t k = 0; k < 40; ++k) ASSERT_LE(d[i][k], d[i][j] + d[j][k] + 1e-12);
      }
  }
}

TEST(Distance, NeedsEvaluatorAndMatchingDimension) {
  EmpiricalMeasure q{PointSet::on_line(std::vector<double>{0.5})};
  EXPECT_THROW(evaluate_class(halfplane_family(HalfPlaneVariant::all), {Params{1, -1, 0}}, q), ContractError);
  EmpiricalMeasure q2{PointSet(2, {1.0, 1.0})};
  EXPECT_THROW(evaluate_class(t_lambda_family(), {Params{1.0}}, q2), ContractError);
}

TEST(GreedyCover, LineOfTen) {
  std::vector<double> xs;
  for (int i = 0; i < 10; ++i) xs.push_back(i);
  const auto d = line_distances(xs);
  // Balls of radius 1.5 hold 3 consecutive points, so 4 are needed.
  EXPECT_EQ(oracle::min_cover(d, 1.5), 4u);
  EXPECT_EQ(greedy_cover(d, 1.5), 4u);
  EXPECT_EQ(greedy_cover(d, 9.0), 1u);
  EXPECT_EQ(greedy_cover(d, 0.5), 10u);
}

TEST(GreedyCover, WithinLogFactorOfOptimum) {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 6 + rng.below(10);
    std::vector<double> xs;
    for (std::size_t i = 0; i < m; ++i) xs.push_back(rng.uniform(0.0, 10.0));
    const auto d = line_distances(xs);
    for (double eps : {0.3, 1.0, 2.5}) {
      const auto opt = oracle::min_cover(d, eps);
      const auto g = greedy_cover(d, eps);
      ASSERT_GE(g, opt);
      ASSERT_LE(static_cast<double>(g), static_cast<double>(opt) * (1.0 + std::log(static_cast<double>(m))));
      // A maximal separated set is a cover and every cover has a center per separated member.
      const auto pack = greedy_packing(d, eps);
      ASSERT_GE(pack, opt);
    }
  }
}

TEST(EntropyCurve, SandwichAndMonotone) {
  const auto v = t_lambda_values(600, 40, 5);
  const auto c = entropy_curve(v, default_epsilons(), 1);
  ASSERT_EQ(c.entries.size(), 12u);
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    const auto& e = c.entries[i];
    EXPECT_LE(e.n_pack_double, e.n_cover) << e.epsilon;
    EXPECT_LE(e.n_cover, e.n_pack_lower) << e.epsilon;
    if (i > 0) EXPECT_LE(e.n_cover, c.entries[i - 1].n_cover);
  }
}

TEST(EntropyCurve, IndependentOfJobs) {
  const auto v = t_lambda_values(300, 30, 6);
  const auto a = entropy_curve(v, default_epsilons(), 2, 1), b = entropy_curve(v, default_epsilons(), 2, 3);
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].n_cover, b.entries[i].n_cover);
}

TEST(EntropyCurve, EnvelopeNormalizationIsScaleFree) {
  auto v = t_lambda_values(300, 30, 8);
  const auto a = entropy_curve(v, default_epsilons(), 1);
  for (double& x : v.data) x *= 7.5;
  const auto b = entropy_curve(v, default_epsilons(), 1);
  EXPECT_NEAR(b.envelope_norm, 7.5 * a.envelope_norm, 1e-9 * b.envelope_norm);
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].n_cover, b.entries[i].n_cover);
}

TEST(EntropyCurve, EnvelopeNorm) {
  const auto v = rows_of({{1.0, -2.0}, {0.5, 3.0}});
  EXPECT_DOUBLE_EQ(envelope_norm(v, 1), 2.0);
  EXPECT_DOUBLE_EQ(envelope_norm(v, 2), std::sqrt(5.0));
}

TEST(EntropyCurve, ConstantFamily) {
  const auto v = rows_of({{0.4, 0.4, 0.4}, {0.4, 0.4, 0.4}, {0.4, 0.4, 0.4}});
  const auto c = entropy_curve(v, default_epsilons(), 1);
  for (const auto& e : c.entries) EXPECT_EQ(e.n_cover, 1u);
  const auto fit = fit_cover_exponent(c);
  EXPECT_EQ(fit.b_hat, 0.0);
}

TEST(FitCoverExponent, RecoversPowerLaw) {
  EntropyCurve c;
  c.sample_size = 100000;
  for (double e : default_epsilons()) c.entries.push_back({e, static_cast<std::size_t>(std::llround(3.0 * std::pow(1.0 / e, 1.5)))});
  const auto f = fit_cover_exponent(c);
  EXPECT_NEAR(f.b_hat, 1.5, 0.01);
  EXPECT_NEAR(f.a_hat, 3.0, 0.1);
  EXPECT_FALSE(f.exp_form_better);
}

TEST(FitCoverExponent, TooFewPointsThrows) {
  EntropyCurve c;
  c.sample_size = 100;
  for (double e : default_epsilons()) c.entries.push_back({e, 50});
  EXPECT_THROW(fit_cover_exponent(c), ContractError);
}

TEST(FitCoverExponent, TLambdaBelowCertificate) {
  const auto c = entropy_curve(t_lambda_values(3000, 60, 11), default_epsilons(), 1);
  const auto f = fit_cover_exponent(c);
  EXPECT_LE(f.b_hat, 1.5);
  const auto check = certificate_compare(c, 1);
  EXPECT_FALSE(check.violation);
  EXPECT_GE(check.a, f.a_hat);
}

TEST(FitCoverExponent, MonotoneClassFavoursExponentialForm) {
  const auto mono = monotone_class_values(3000, 200, 30, 2);
  const auto c = entropy_curve(mono, geometric_grid(0.02, 0.3, 12), 1);
  const auto f = fit_cover_exponent(c);
  EXPECT_TRUE(f.exp_form_better);
  const auto tl = entropy_curve(t_lambda_values(3000, 60, 11), geometric_grid(0.02, 0.3, 12), 1);
  // Compare at the smallest radius where both curves are below saturation.
  EXPECT_GT(c.entries[4].n_cover, tl.entries[4].n_cover);
}

TEST(MonotoneClass, RowsAreMonotoneInUnitInterval) {
  const auto v = monotone_class_values(50, 40, 5, 3);
  for (std::size_t i = 0; i < v.rows; ++i)
    for (std::size_t k = 0; k < v.cols; ++k) {
      ASSERT_GE(v.row(i)[k], 0.0);
      ASSERT_LE(v.row(i)[k], 1.0);
      if (k > 0) ASSERT_GE(v.row(i)[k], v.row(i)[k - 1]);
    }
}

TEST(Grid, Geometric) {
  const auto g = geometric_grid(0.02, 0.3, 12);
  EXPECT_DOUBLE_EQ(g.front(), 0.02);
  EXPECT_NEAR(g.back(), 0.3, 1e-15);
  for (std::size_t i = 2; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
  EXPECT_THROW(geometric_grid(0.3, 0.02, 5), ContractError);
}
