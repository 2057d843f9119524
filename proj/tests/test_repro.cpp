#include <gtest/gtest.h>

#include "vclab/repro.hpp"

using namespace vclab;
using namespace vclab::repro;

TEST(Csv, FormatsCells) {
  Csv c({"name", "x", "n", "flag", "big"});
  c.row("a", 0.1, 42, true, BigInt(1) << 70);
  c.row(std::string("b"), std::nan(""), -3, false, BigInt(0));
  EXPECT_EQ(c.str(), "name,x,n,flag,big\na,0.1,42,1,1180591620717411303424\nb,nan,-3,0,0\n");
  EXPECT_THROW(c.row("too", "few"), ContractError);
  EXPECT_EQ(Csv::cell(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(Csv::cell(-INFINITY), "-inf");
}

TEST(Presets, LookupAndIds) {
  std::vector<std::string> ids;
  for (const auto& p : presets()) ids.push_back(p.id);
  EXPECT_EQ(ids.size(), 10u);
  EXPECT_EQ(find_preset("sauer").id, "sauer");
  try {
    find_preset("nope");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("known: lemma1"), std::string::npos);
  }
}

TEST(Presets, QuickRunsAreReproducible) {
  PresetOptions opt;
  opt.quick = true;
  for (const char* id : {"lemma1", "powerset", "sauer", "dsl"}) {
    const auto a = run_preset(id, opt), b = run_preset(id, opt);
    EXPECT_TRUE(a.passed()) << id << "\n" << a.report();
    EXPECT_FALSE(a.csv.empty()) << id;
    EXPECT_TRUE(csv_differences(a, b).empty()) << id;
    EXPECT_EQ(a.summary["id"], id);
  }
}

TEST(Presets, JobsDoNotChangeOutputs) {
  PresetOptions one, three;
  one.quick = three.quick = true;
  three.jobs = 3;
  const auto a = run_preset("case_table", one), b = run_preset("case_table", three);
  EXPECT_TRUE(csv_differences(a, b).empty());
}

TEST(Presets, SeedChangesSampledOutputs) {
  PresetOptions a, b;
  a.quick = b.quick = true;
  b.seed = 7;
  EXPECT_FALSE(csv_differences(run_preset("lemma1", a), run_preset("lemma1", b)).empty());
}

TEST(CsvDifferences, ReportsChangedAndMissingFiles) {
  PresetResult a, b;
  a.csv = {{"x.csv", "1\n"}, {"y.csv", "2\n"}};
  b.csv = {{"x.csv", "1\n"}, {"y.csv", "3\n"}, {"z.csv", ""}};
  EXPECT_EQ(csv_differences(a, b), (std::vector<std::string>{"y.csv", "z.csv"}));
  EXPECT_TRUE(csv_differences(a, a).empty());
}
