// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
//
//   acceptance [--quick] [--jobs N] [--seed S] [--only K]

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "vclab/repro.hpp"

using namespace vclab;

namespace {

struct Criterion {
  int number;
  std::string preset;
  std::string label;
  double time_limit;  // seconds, 0 = none
};

const std::vector<Criterion> kCriteria{
    {1, "lemma1", "Box-Cox subgraph trace bound n+1", 120},
    {2, "case_table", "dual-set case table correctness", 0},
    {3, "halfplanes", "half-plane VC dimensions and n^2+n+2", 300},
    {4, "shifted_union", "shifted-union dimension/density dichotomy", 300},
    {5, "powerset", "finite powerset dimension k, density 0", 0},
    {6, "sauer", "Sauer-Shelah consistency", 0},
    {7, "covering", "covering exponents vs certificates", 600},
    {8, "ulln", "uniform LLN rate", 900},
    {9, "dsl", "formula certificates and twins", 0},
};

}  // namespace

int main(int argc, char** argv) {
  repro::PresetOptions opt;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") opt.quick = true;
    else if (a == "--jobs" && i + 1 < argc) opt.jobs = static_cast<unsigned>(std::stoul(argv[++i]));
    else if (a == "--seed" && i + 1 < argc) opt.seed = std::stoull(argv[++i]);
    else if (a == "--only" && i + 1 < argc) only = std::stoi(argv[++i]);
    else {
      std::cerr << "usage: acceptance [--quick] [--jobs N] [--seed S] [--only K]\n";
      return 2;
    }
  }

  std::vector<repro::PresetResult> first;
  std::vector<std::string> lines;
  bool all_ok = true;
  auto emit = [&](bool ok, int number, const std::string& text) {
    const std::string line = std::string(ok ? "PASS" : "FAIL") + " criterion " + std::to_string(number) + ": " + text;
    std::cout << line << std::endl;
    lines.push_back(line);
    all_ok = all_ok && ok;
  };

  for (const auto& c : kCriteria) {
    if (only && only != c.number) continue;
    repro::PresetResult r;
    try {
      r = repro::run_preset(c.preset, opt);
    } catch (const std::exception& e) {
      std::cout << "  error: " << e.what() << "\n";
      emit(false, c.number, c.label + " (threw)");
      continue;
    }
    std::cout << r.report();
    const bool in_time = c.time_limit == 0 || r.seconds < c.time_limit;
    std::string text = c.label + " [" + repro::detail::fmt(r.seconds, 3) + " s";
    if (c.time_limit > 0) text += ", limit " + repro::detail::fmt(c.time_limit, 4) + " s";
    text += "]";
    emit(r.passed() && in_time, c.number, text);
    first.push_back(std::move(r));
  }

  if (!only || only == 10) {
    // Determinism: a second run of every preset must reproduce the CSVs.
    bool ok = true;
    std::size_t files = 0;
    for (const auto& c : kCriteria) {
      if (only) continue;
      const auto it = std::find_if(first.begin(), first.end(), [&](const auto& r) { return r.id == c.preset; });
      if (it == first.end()) {
        ok = false;
        continue;
      }
      const auto again = repro::run_preset(c.preset, opt);
      const auto diff = repro::csv_differences(*it, again);
      files += it->csv.size();
      std::cout << "  " << (diff.empty() ? "ok   " : "FAIL ") << c.preset << ": " << it->csv.size() << " CSV file(s)"
                << (diff.empty() ? " identical" : " differ (" + diff.front() + ")") << "\n";
      ok = ok && diff.empty();
    }
    if (only == 10) {
      const auto r = repro::run_preset("determinism", opt);
      std::cout << r.report();
      ok = r.passed();
    }
    emit(ok, 10, "determinism, byte-identical CSVs on a second run" + (files ? " (" + std::to_string(files) + " files)" : std::string()));
  }

  std::cout << "\nsummary\n";
  for (const auto& l : lines) std::cout << l << "\n";
  return all_ok ? 0 : 1;
}
