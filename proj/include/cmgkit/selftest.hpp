#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace cmg {

// One row of the selftest matrix: a mathematical statement exercised
// numerically, the worst observed value, and the tolerance it was judged
// against.
struct StatementResult {
  std::string key;
  bool pass = false;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SelftestReport {
  std::vector<StatementResult> statements;

  bool pass() const;
  nlohmann::json to_json() const;
};

// Runs the full invariant suite: curvature-tensor symmetries, the covariant
// derivative commutation identity, the model-germ Hessian identities, the
// conformal Morse germ verdicts, the index parity table, direction
// attainment, both curvature-from-germ formulas, the two-dimensional
// gradient identities, pointwise constancy of sectional curvature at germ
// bases, the constant-curvature region scan, and the quasiconformal sweep
// endpoint. Deterministic: repeated runs produce identical reports.
SelftestReport run_selftest(int threads = 1);

}  // namespace cmg
