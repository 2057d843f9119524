#pragma once

// Parameter-count certificates. Purely syntactic: the formula's symbols are
// already checked against the declared signature level, and the bound is the
// number of declared parameters.

#include <string>
#include <vector>

#include "json.hpp"
#include "vclab/dsl/ast.hpp"

namespace vclab::dsl {

struct Certificate {
  std::string formula_id;
  Level level = Level::R_alg;
  std::size_t d = 0;
  std::size_t density_bound = 0;
  std::string covering_exponent;
  bool envelope_required = true;
  std::vector<std::string> assumptions;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    return {{"formula_id", formula_id},
            {"level", to_string(level)},
            {"d", d},
            {"density_bound", density_bound},
            {"covering_exponent", covering_exponent},
            {"envelope_required", envelope_required},
            {"assumptions", assumptions},
            {"warnings", warnings}};
  }
};

inline Certificate certify(const ParsedFormula& f) {
  Certificate c;
  c.formula_id = f.id;
  c.level = f.decls.level;
  c.d = f.decls.params.size();
  c.density_bound = c.d;
  c.covering_exponent = std::to_string(c.d) + "+eta, any eta>0";
  c.envelope_required = true;
  c.assumptions = {"signature " + to_string(c.level) + " is o-minimal (whitelisted symbols only)",
                   "graph_is_function (unchecked)",
                   "bounded envelope for the covering exponent"};
  c.warnings = f.warnings;
  return c;
}

}  // namespace vclab::dsl
