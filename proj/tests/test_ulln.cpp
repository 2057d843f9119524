#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vclab/ulln.hpp"

using namespace vclab;

TEST(TLambdaMean, ClosedFormMatchesQuadrature) {
  for (double l : {-2.5, -2.0, -1.0, -0.37, 0.01, 0.5, 1.0, 2.0}) {
    const double exact = t_lambda_uniform_mean(l, 0.5, 2.0);
    EXPECT_NEAR(exact, t_lambda_uniform_mean_quadrature(l, 0.5, 2.0), 1e-12 * std::max(1.0, std::abs(exact))) << l;
  }
  // lambda = 1: mean of x - 1 on (0.5, 2) is 0.25.
  EXPECT_NEAR(t_lambda_uniform_mean(1.0, 0.5, 2.0), 0.25, 1e-15);
  EXPECT_THROW(t_lambda_uniform_mean(0.0, 0.5, 2.0), ContractError);
}

TEST(TLambdaProblem, AccumulateMatchesDirectEvaluation) {
  const auto p = t_lambda_ulln_problem();
  ASSERT_EQ(p.grid_size(), 400u);
  EXPECT_EQ(p.subgrid, 200u);
  std::vector<double> lambdas;
  for (int j = 0; j <= 400; ++j)
    if (j != 200) lambdas.push_back((j - 200) / 100.0);
  // Even positions first, then odd ones.
  std::vector<double> ordered;
  for (std::size_t i = 0; i < lambdas.size(); i += 2) ordered.push_back(lambdas[i]);
  for (std::size_t i = 1; i < lambdas.size(); i += 2) ordered.push_back(lambdas[i]);
  for (double x : {0.5, 0.73, 1.0, 1.9, 2.0}) {
    std::vector<double> sums(p.grid_size(), 0.0);
    p.accumulate(&x, sums.data());
    for (std::size_t j = 0; j < ordered.size(); ++j) {
      const double want = box_cox(ordered[j], x);
      ASSERT_NEAR(sums[j], want, 1e-12 * std::max(1.0, std::abs(want))) << "x=" << x << " lambda=" << ordered[j];
      ASSERT_NEAR(p.reference[j], t_lambda_uniform_mean(ordered[j], 0.5, 2.0), 1e-12);
    }
  }
  EXPECT_THROW(t_lambda_ulln_problem(0.0, 2.0), ConfigError);
}

TEST(LinkProblem, MeansMatchNestedQuadrature) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const auto fam = piecewise_link_family(3, 2);
  const auto& model = *fam.model_as<PiecewiseLinkModel>();
  Rng rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const auto params = fam.sample_params(rng);
    const LinkMember f(model.a(params), model.b(params), model.beta(params));
    const auto inner = [&](double x0) {
      return GK::integrate([&](double x1) { return fam.evaluate(params, std::vector<double>{x0, x1}); }, -1.0, 1.0, 8, 1e-9);
    };
    const double want = GK::integrate(inner, -1.0, 1.0, 8, 1e-9) / 4.0;
    EXPECT_NEAR(link_uniform_mean(f), want, 1e-6);
  }
}

TEST(LinkProblem, OneDimensionalMean) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const auto fam = piecewise_link_family(4, 1);
  const auto& model = *fam.model_as<PiecewiseLinkModel>();
  Rng rng(32);
  for (int trial = 0; trial < 6; ++trial) {
    const auto params = fam.sample_params(rng);
    const LinkMember f(model.a(params), model.b(params), model.beta(params));
    const double want = GK::integrate([&](double x) { return fam.evaluate(params, std::vector<double>{x}); }, -1.0, 1.0, 15, 1e-12) / 2.0;
    EXPECT_NEAR(link_uniform_mean(f), want, 1e-8);
  }
}

TEST(RunUlln, ConstantHasNoDeviation) {
  UllnConfig cfg;
  cfg.n_grid = {10, 100};
  cfg.reps = 5;
  const auto run = run_ulln(constant_ulln_problem(0.3), cfg);
  for (const auto& row : run.sup_dev)
    for (double d : row) EXPECT_NEAR(d, 0.0, 1e-15);
  EXPECT_TRUE(fit_rate(run).degenerate || fit_rate(run).medians.front() < 1e-15);
}

TEST(RunUlln, IdentityFollowsClassicalRate) {
  UllnConfig cfg;
  cfg.n_grid = {100, 1000, 10000};
  cfg.reps = 300;
  cfg.seed = 4;
  const auto run = run_ulln(single_function_ulln_problem(), cfg);
  const auto fit = fit_rate(run);
  EXPECT_NEAR(fit.alpha, 0.5, 0.1);
  // Median of |N(0, 1/12)| is 0.6745 / sqrt(12).
  EXPECT_NEAR(fit.medians.back() * 100.0, 0.6745 / std::sqrt(12.0), 0.03);
}

TEST(RunUlln, IndependentOfJobsAndSubgridBelowFull) {
  UllnConfig a;
  a.n_grid = {50, 500};
  a.reps = 6;
  auto b = a;
  b.jobs = 3;
  const auto prob = t_lambda_ulln_problem();
  const auto ra = run_ulln(prob, a), rb = run_ulln(prob, b);
  EXPECT_EQ(ra.sup_dev, rb.sup_dev);
  for (std::size_t i = 0; i < ra.n_grid.size(); ++i)
    for (std::size_t r = 0; r < ra.reps; ++r) EXPECT_LE(ra.sub_sup_dev[i][r], ra.sup_dev[i][r]);
}

TEST(RunUlln, RejectsBadDesigns) {
  UllnConfig cfg;
  cfg.n_grid = {100, 10};
  EXPECT_THROW(run_ulln(single_function_ulln_problem(), cfg), ContractError);
  cfg.n_grid = {0, 10};
  EXPECT_THROW(run_ulln(single_function_ulln_problem(), cfg), ContractError);
  cfg.n_grid = {10};
  cfg.reps = 0;
  EXPECT_THROW(run_ulln(single_function_ulln_problem(), cfg), ContractError);
}

TEST(CheckEnvelope, AcceptsBoundedAndRejectsUnbounded) {
  EXPECT_NO_THROW(check_envelope(t_lambda_ulln_problem(), 2000, 1, 10.0));
  UllnProblem bad;
  bad.name = "log";
  bad.draw = [](Rng& rng, double* x) { x[0] = rng.uniform(-1.0, 1.0); };
  bad.accumulate = [](const double* x, double* sums) { sums[0] += std::log(x[0]); };
  bad.reference = {0.0};
  EXPECT_THROW(check_envelope(bad, 1000, 1, 1e6), ConfigError);
  UllnProblem throws = bad;
  throws.accumulate = [](const double*, double*) { require(false, "outside domain"); };
  EXPECT_THROW(check_envelope(throws, 10, 1, 1e6), ConfigError);
}

TEST(FitRate, SyntheticPowerLaw) {
  UllnRun run;
  run.n_grid = {100, 1000, 10000};
  run.reps = 3;
  for (auto n : run.n_grid) {
    const double m = 2.0 / std::sqrt(static_cast<double>(n));
    run.sup_dev.push_back({0.9 * m, m, 1.1 * m});
  }
  const auto f = fit_rate(run);
  EXPECT_NEAR(f.alpha, 0.5, 1e-12);
  EXPECT_NEAR(f.c, 2.0, 1e-9);
  // m / (log n / sqrt n) = 2 / log n decreases.
  EXPECT_TRUE(f.ratio_non_increasing);
  EXPECT_NEAR(f.ratios[0], 2.0 / std::log(100.0), 1e-12);
}

TEST(RefineGrid, StopsWithinBudget) {
  auto make = [](std::size_t g) { return piecewise_link_ulln_problem(2, 1, g, 3); };
  // Growing grids share their leading members.
  const auto small = make(8), big = make(16);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(small.reference[j], big.reference[j]);
  const auto g = refine_grid(make, 8, 256, 200, 10, 5);
  EXPECT_GE(g, 16u);
  EXPECT_LE(g, 256u);
  EXPECT_EQ(g & (g - 1), 0u);
}
