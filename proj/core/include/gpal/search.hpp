#ifndef GPAL_SEARCH_HPP
#define GPAL_SEARCH_HPP

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "gpal/calculus.hpp"
#include "gpal/derivation.hpp"
#include "gpal/search_context.hpp"
#include "gpal/semantics.hpp"

namespace gpal {

// Safety net on top of the calculus' own termination guarantees; the default
// is far above anything desk-scale inputs need.
struct SearchBudget {
  int max_branch_depth = 2000;
  int max_labels = 64;
  std::chrono::milliseconds time_limit{10'000};
};

// Loop-control switches.  Both default on; turning one off is only useful for
// demonstrating that search then diverges (the fuzz harness' self-test).
struct SearchOptions {
  bool kl_once_per_pair = true;
  bool kr_chain_cap = true;
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t kl_steps = 0;
  std::uint64_t kr_steps = 0;
  int max_depth = 0;
  int peak_labels = 0;
};

enum class Verdict { Proved, Refuted, BudgetExhausted };

std::string to_string(Verdict v);

// Proved   -> derivation is set and passes check_derivation.
// Refuted  -> saturated_branch is set; countermodel/world_of_label are set
//             when extraction produced a model that eval confirms falsifies
//             the root (they stay empty when the heuristic fails).
// BudgetExhausted -> reason says which limit tripped.
struct ProofResult {
  Verdict verdict;
  std::optional<Derivation> derivation;
  std::optional<Sequent> saturated_branch;
  std::optional<KripkeModel> countermodel;
  std::map<Label, int> world_of_label;
  std::string reason;
  SearchStats stats;
};

struct ExtractedModel {
  KripkeModel model;
  std::map<Label, int> world_of_label;
};

// Root-first search.  Deterministic: rule choice is by priority class
// (initial check, non-branching, branching, relational closure, KL, KR) and
// by enumeration order within a class; branches are explored left to right
// and the first saturated branch wins.
// pre: none
ProofResult prove(const Sequent& s, const SearchBudget& budget = {},
                  const SearchOptions& options = {});

// prove applied to (=> x0 : f).
ProofResult prove_formula(const Formula& f, const SearchBudget& budget = {},
                          const SearchOptions& options = {});

// Reads a candidate model off a saturated branch: worlds are the branch's
// labels, each ~a is the equivalence closure of the branch's relational
// atoms, p holds at x iff x:p sits in the antecedent.  The candidate is
// returned only if it falsifies `root` under the induced assignment; the
// heuristic is not guaranteed to work once announcements are involved.
// pre: no rule applies to `branch` (saturation is the caller's business)
std::optional<ExtractedModel> extract_countermodel(const Sequent& branch,
                                                   const Sequent& root);

}  // namespace gpal

#endif  // GPAL_SEARCH_HPP
