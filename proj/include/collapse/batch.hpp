#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collapse/parallel.hpp"

namespace collapse {

// sufficiency  C1 or C2 models (discrete and continuous) are A-collapsible
// necessity    binary-W tables: A-collapsible implies C1 or C2
// lattice      C_W within C_H and C_A, and C_H with C_A inside C_W
// chain        uniformly collapsible => collapsible => homogeneous
// cox          Cox identity residual below 1e-5 at random interior points
enum class Suite { sufficiency, necessity, lattice, chain, cox };

const char* to_string(Suite s);
Suite parse_suite(const std::string& name);  // throws InputError

struct BatchOptions {
  std::uint64_t seed = 1;
  std::size_t count = 100;
  Execution exec = Execution::parallel;
  double tolerance = 1e-6;  // continuous checks
};

struct BatchReport {
  Suite suite = Suite::sufficiency;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  // Cases whose premise was not met (they pass vacuously).
  std::size_t vacuous = 0;
  std::map<std::string, std::size_t> coverage;
  std::optional<std::string> first_counterexample;
  std::vector<std::string> notes;
};

// Deterministic per (suite, seed, count); cases are generated serially and
// evaluated per model in parallel.
BatchReport run_batch(Suite suite, const BatchOptions& opts);

}  // namespace collapse
