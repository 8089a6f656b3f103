#ifndef GPAL_CALCULUS_HPP
#define GPAL_CALCULUS_HPP

// The rule schemas of the labelled calculus, reified as data.  Initial
// sequents share an atomic expression across the arrow; six propositional
// rules, the two knowledge rules (KL keeps its principal, KR consumes the
// succedent formula under an eigenvariable condition), three relational rules
// making each ~a an equivalence relation, and twelve reduction rules pairing
// off the announcement forms:
//
//   R1  x:[phi]p            R2  x:[phi]~psi       R3  x:[phi](psi1 & psi2)
//   R4  x:[phi](psi1->psi2) R5  x:[phi]K_a psi    R6  x:[phi][psi]chi
//
// schema_premises is the single source of truth: the prover enumerates rule
// applications through it and the proof checker replays single steps against
// it, so the two cannot drift apart.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gpal/search_context.hpp"
#include "gpal/sequent.hpp"

namespace gpal {

enum class RuleName {
  InitProp,
  InitRel,
  NegL,
  NegR,
  AndL,
  AndR,
  ImpL,
  ImpR,
  KL,
  KR,
  Ref,
  Trans,
  Sym,
  R1L,
  R1R,
  R2L,
  R2R,
  R3L,
  R3R,
  R4L,
  R4R,
  R5L,
  R5R,
  R6L,
  R6R,
};

std::string to_string(RuleName rule);
std::optional<RuleName> rule_from_string(const std::string& name);

bool is_reduction_rule(RuleName rule);
// ImpL, AndR, R1L, R2L, R3R, R4L, R5L have two premises; initial sequents
// none; the rest one.
int rule_arity(RuleName rule);

struct RuleApplication {
  RuleName rule;
  Sequent conclusion;
  // The expressions the rule acts on.  Conventions: L-rules list the
  // antecedent principal, R-rules the succedent one; KL lists the K-formula
  // then the relational atom; Trans lists the two chained atoms; Ref lists
  // the reflexive atom it introduces; initial sequents list the shared
  // expression once.
  std::vector<SequentExpr> principal;
  std::vector<Sequent> premises;
  std::optional<Label> eigenvariable;  // KR only

  auto operator<=>(const RuleApplication&) const = default;
};

// Premises of `rule` applied root-first to `conclusion` at `principal`, or
// nullopt if that triple is not a schema instance (wrong shape, principal
// missing from the sequent, eigenvariable violation...).  Binary premises
// come in display order: the premise carrying the succedent part first.
std::optional<std::vector<Sequent>> schema_premises(
    RuleName rule, const Sequent& conclusion, const std::vector<SequentExpr>& principal,
    const std::optional<Label>& eigenvariable);

// InitProp/InitRel application if an atomic labelled formula or relational
// atom occurs on both sides; compound shared formulas do not count.
std::optional<RuleApplication> is_initial(const Sequent& s);

// Every schema-correct root-first application with conclusion s, filtered by
// the loop controls in ctx; a default context filters nothing.  KR instances
// use fresh_label(s); Ref ranges over the labels and agents occurring in s.
// Deterministic order.
std::vector<RuleApplication> applicable(const Sequent& s,
                                        const SearchContext& ctx = {});

// Enumeration backbone behind applicable(), exposed so the prover can pick a
// rule without materializing every premise list.  Calls fn with each
// candidate (rule, principal, eigenvariable) triple in the same fixed order
// applicable() uses; shape prefilters only — callers still validate with
// schema_premises.  fn returns true to stop; returns true iff stopped.
// `want` vetoes rules before any candidate data is built, so a caller
// scanning for one rule class pays nothing for the rest.
using CandidateFn = std::function<bool(RuleName, std::vector<SequentExpr>,
                                       std::optional<Label>)>;
using RuleFilter = std::function<bool(RuleName)>;
bool for_each_candidate(const Sequent& s, const CandidateFn& fn,
                        const RuleFilter& want = {});

// True iff app is a literal schema instance: its premises are exactly
// schema_premises of its conclusion and principal.
bool check_step(const RuleApplication& app);

}  // namespace gpal

#endif
