#include <gtest/gtest.h>

#include <sstream>

#include "vclab/core.hpp"
#include "vclab/families.hpp"
#include "vclab/fit.hpp"

using namespace vclab;

TEST(Trace, StringRoundTrip) {
  const auto t = Trace::from_string("10110");
  EXPECT_EQ(t.size(), 5u);
  EXPECT_TRUE(t.test(0));
  EXPECT_FALSE(t.test(1));
  EXPECT_EQ(t.count(), 3u);
  EXPECT_EQ(t.to_string(), "10110");
  EXPECT_THROW(Trace::from_string("10x"), ContractError);
}

TEST(Trace, LongTracesSpillPastOneWord) {
  Trace t(130);
  t.set(0);
  t.set(64);
  t.set(129);
  EXPECT_EQ(t.count(), 3u);
  EXPECT_TRUE(t.test(129));
  t.flip(64);
  EXPECT_FALSE(t.test(64));
  Trace u(130);
  u.set(0);
  u.set(129);
  EXPECT_EQ(t, u);
  EXPECT_EQ(t.hash(), u.hash());
}

TEST(Trace, FromMaskUsesLowBits) {
  EXPECT_EQ(Trace::from_mask(4, 0b0101).to_string(), "1010");
  EXPECT_EQ(Trace::from_mask(2, 0xff).to_string(), "11");
}

TEST(Trace, OrderFollowsStringForm) {
  std::vector<std::string> s{"011", "100", "000", "110", "001"};
  std::vector<Trace> t;
  for (auto& x : s) t.push_back(Trace::from_string(x));
  std::sort(t.begin(), t.end());
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(t[i].to_string(), s[i]);
}

TEST(TraceSet, DeduplicatesAndDetectsShattering) {
  TraceSet ts(2);
  for (const char* b : {"00", "01", "10", "01"}) ts.insert(Trace::from_string(b));
  EXPECT_EQ(ts.size(), 3u);
  EXPECT_FALSE(ts.shattered());
  ts.insert(Trace::from_string("11"));
  EXPECT_TRUE(ts.shattered());
  EXPECT_EQ(ts.strings(), (std::vector<std::string>{"00", "01", "10", "11"}));
  EXPECT_THROW(ts.insert(Trace::from_string("1")), ContractError);
}

TEST(PointSet, DimensionChecks) {
  PointSet p(2);
  p.push_back({1.0, 2.0});
  EXPECT_THROW(p.push_back({1.0}), ContractError);
  EXPECT_EQ(p.size(), 1u);
  EXPECT_THROW(PointSet(2, {1.0, 2.0, 3.0}), ContractError);
  EXPECT_EQ(p.prefix(5).size(), 1u);
}

TEST(PointSet, CsvRoundTrip) {
  PointSet p(2);
  p.push_back({0.1, -3.25});
  p.push_back({1e-300, 7.0});
  std::stringstream ss;
  write_csv(ss, p);
  EXPECT_EQ(read_point_csv(ss), p);
}

TEST(PointSet, CsvErrors) {
  std::istringstream bad_header("a,b\n1,2\n");
  EXPECT_THROW(read_point_csv(bad_header), ConfigError);
  std::istringstream bad_row("x0,x1\n1,2\n3\n");
  EXPECT_THROW(read_point_csv(bad_row), ConfigError);
  std::istringstream bad_number("x0\nfoo\n");
  EXPECT_THROW(read_point_csv(bad_number), ConfigError);
}

TEST(FamilyHandle, TraceValidatesInputs) {
  const auto f = halfplane_family(HalfPlaneVariant::upper);
  PointSet pts(2);
  pts.push_back({0.0, 1.0});
  pts.push_back({0.0, -1.0});
  // y > 0 is {0*x - 1*y + 0 < 0}.
  EXPECT_EQ(trace(f, Params{0.0, -1.0, 0.0}, pts).to_string(), "10");
  EXPECT_THROW(trace(f, Params{0.0, 1.0, 0.0}, pts), ContractError);  // b > 0 is not an upper half-plane
  EXPECT_THROW(trace(f, Params{0.0, -1.0}, pts), ContractError);
  PointSet wrong(1);
  wrong.push_back({0.0});
  EXPECT_THROW(trace(f, Params{0.0, -1.0, 0.0}, wrong), ContractError);
}

TEST(FamilyHandle, CollectTracesIndependentOfJobs) {
  const auto f = halfplane_family(HalfPlaneVariant::all);
  Rng rng(5);
  const auto pts = f.sample_points(7, rng);
  std::vector<Params> params;
  for (int i = 0; i < 500; ++i) params.push_back(f.sample_params(rng));
  EXPECT_EQ(collect_traces(f, params, pts, 1).strings(), collect_traces(f, params, pts, 4).strings());
}

TEST(Seeds, DeriveSeedSeparatesTags) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
  EXPECT_NE(derive_seed(1, {}), derive_seed(1, {0}));
}

TEST(Seeds, RngBelowIsInRangeAndUniformish) {
  Rng rng(9);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(Parallel, MapKeepsIndexOrderAndRethrows) {
  const auto v = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_for(50, 3, [](std::size_t i) { if (i == 17) throw ConfigError("boom"); }), ConfigError);
}

TEST(Fit, LineAndPower) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  const std::vector<double> n{10, 100, 1000}, m{30, 300 * std::sqrt(10.0), 3000 * 10.0};
  const auto p = fit_power(n, m);
  EXPECT_NEAR(p.exponent, 1.5, 1e-12);
  EXPECT_NEAR(p.constant, 30.0 / std::pow(10.0, 1.5), 1e-9);
}

TEST(Fit, MedianAndQuantile) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(quantile({0, 10}, 0.25), 2.5);
}
