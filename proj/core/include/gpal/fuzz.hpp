#ifndef GPAL_FUZZ_HPP
#define GPAL_FUZZ_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gpal/formula.hpp"
#include "gpal/search.hpp"

namespace gpal {

struct FuzzOptions {
  int count = 500;
  std::uint64_t seed = 1;
  int max_depth = 4;
  int num_agents = 2;
  int num_atoms = 2;
  int oracle_worlds = 3;  // brute-force bound for the semantic checks
  SearchBudget budget{};
  SearchOptions search{};
};

struct FuzzViolation {
  int case_index;
  Formula formula;
  std::string kind;  // soundness | translation-verdict | translation-eval | budget
  std::string detail;
};

// Differential report: prover vs brute-force oracle, original vs translation.
// `text` is deterministic for fixed options (no timing, no addresses).
struct FuzzReport {
  int cases = 0;
  int proved = 0;
  int refuted = 0;
  int budget_exhausted = 0;
  std::vector<FuzzViolation> violations;
  std::string text;

  bool clean() const { return violations.empty(); }
};

// Draws a connective while depth remains, an atom at the leaves.
// pre: agents and atoms nonempty
Formula random_formula(std::mt19937_64& rng, int max_depth,
                       const std::vector<Agent>& agents,
                       const std::vector<Atom>& atoms);

// For each generated formula: (a) a Proved verdict must survive the
// brute-force oracle, (b) the verdict must agree with the verdict of its
// translation, (c) eval must agree with eval of the translation on every
// model within the oracle bound.  Budget exhaustion counts as a violation.
// pre: counts positive, oracle_worlds >= 1
FuzzReport run_fuzz(const FuzzOptions& options = {});

}  // namespace gpal

#endif  // GPAL_FUZZ_HPP
