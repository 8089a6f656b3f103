#ifndef GPAL_SEARCH_CONTEXT_HPP
#define GPAL_SEARCH_CONTEXT_HPP

// Branch-local loop controls for root-first search.  Relational closure
// (Ref/Sym/Trans) terminates on its own: those rules refuse to introduce an
// atom the antecedent already has.  What the calculus cannot bound by itself
// is memoized here:
//
//   * KL re-instantiating a K-formula against the same relational atom
//     (its premise keeps the principal, so nothing else stops it);
//   * KR expanding a K-formula along an ever-growing chain of fresh labels.
//
// KR is capped per chain: expanding x:K_a psi spawns an eigenvariable that
// inherits x's chain origin for that formula, and each chain allows at most
// cap(a) expansions, where cap(a) is the number of K_a occurrences in the
// root antecedent (at least 1).  State only grows along a branch; sibling
// branches get independent copies.

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "gpal/sequent.hpp"

namespace gpal {

struct RuleApplication;
enum class RuleName;

struct SearchContext {
  std::set<std::pair<LabelledFormula, RelationalAtom>> kl_done;
  std::set<LabelledFormula> kr_done;

  // Chain bookkeeping: which chain a label belongs to for a given K-formula,
  // and how many expansions each chain has used.
  std::map<std::pair<Label, Formula>, Label> kr_chain_origin;
  std::map<std::pair<Label, Formula>, int> kr_chain_used;
  std::map<Agent, int> kr_caps;

  // Test hooks; disabling one re-creates the corresponding divergence.
  bool enforce_kl_once = true;
  bool enforce_kr_cap = true;

  static SearchContext for_root(const Sequent& root);

  int kr_cap(const Agent& a) const;
  // Chain origin of label x for K-formula kf (x itself if not yet chained).
  Label chain_origin(const Label& x, const Formula& kf) const;

  bool permits(const RuleName rule, const std::vector<SequentExpr>& principal) const;
  bool permits(const RuleApplication& app) const;

  // Only KL/KR applications leave a mark; everything else is a no-op.
  // unnote_applied exactly reverses the matching note_applied, letting a
  // depth-first searcher keep one mutable context instead of copying per
  // node (KR eigenvariables are fresh, so reversal is unambiguous).
  void note_applied(RuleName rule, const std::vector<SequentExpr>& principal,
                    const std::optional<Label>& eigenvariable);
  void unnote_applied(RuleName rule, const std::vector<SequentExpr>& principal,
                      const std::optional<Label>& eigenvariable);
  void note_applied(const RuleApplication& app);
};

}  // namespace gpal

#endif
