#include "gpal/search.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace gpal {

namespace {

void count_know(const Formula& f, std::map<Agent, int>* counts) {
  switch (f.kind()) {
    case FormulaKind::Prop:
      return;
    case FormulaKind::Not:
      count_know(f.child(), counts);
      return;
    case FormulaKind::Know:
      ++(*counts)[f.agent()];
      count_know(f.child(), counts);
      return;
    case FormulaKind::And:
    case FormulaKind::Implies:
    case FormulaKind::Announce:
      count_know(f.left(), counts);
      count_know(f.right(), counts);
      return;
  }
}

}  // namespace

SearchContext SearchContext::for_root(const Sequent& root) {
  SearchContext ctx;
  for (const auto& e : root.antecedent.items()) {
    if (const auto* lf = std::get_if<LabelledFormula>(&e)) {
      count_know(lf->formula, &ctx.kr_caps);
    }
  }
  return ctx;
}

int SearchContext::kr_cap(const Agent& a) const {
  auto it = kr_caps.find(a);
  if (it == kr_caps.end()) return 1;
  return std::max(1, it->second);
}

Label SearchContext::chain_origin(const Label& x, const Formula& kf) const {
  auto it = kr_chain_origin.find({x, kf});
  return it == kr_chain_origin.end() ? x : it->second;
}

bool SearchContext::permits(const RuleName rule,
                            const std::vector<SequentExpr>& principal) const {
  switch (rule) {
    case RuleName::KL: {
      if (!enforce_kl_once) return true;
      const auto& lf = std::get<LabelledFormula>(principal[0]);
      const auto& r = std::get<RelationalAtom>(principal[1]);
      return !kl_done.contains({lf, r});
    }
    case RuleName::KR: {
      const auto& lf = std::get<LabelledFormula>(principal[0]);
      if (kr_done.contains(lf)) return false;
      if (!enforce_kr_cap) return true;
      const Label origin = chain_origin(lf.label, lf.formula);
      auto it = kr_chain_used.find({origin, lf.formula});
      const int used = it == kr_chain_used.end() ? 0 : it->second;
      return used < kr_cap(lf.formula.agent());
    }
    default:
      return true;
  }
}

bool SearchContext::permits(const RuleApplication& app) const {
  return permits(app.rule, app.principal);
}

void SearchContext::note_applied(RuleName rule,
                                 const std::vector<SequentExpr>& principal,
                                 const std::optional<Label>& eigenvariable) {
  switch (rule) {
    case RuleName::KL: {
      kl_done.insert({std::get<LabelledFormula>(principal[0]),
                      std::get<RelationalAtom>(principal[1])});
      return;
    }
    case RuleName::KR: {
      const auto& lf = std::get<LabelledFormula>(principal[0]);
      const Label origin = chain_origin(lf.label, lf.formula);
      ++kr_chain_used[{origin, lf.formula}];
      kr_done.insert(lf);
      // The eigenvariable continues the chain that produced it.
      kr_chain_origin[{*eigenvariable, lf.formula}] = origin;
      return;
    }
    default:
      return;
  }
}

void SearchContext::unnote_applied(RuleName rule,
                                   const std::vector<SequentExpr>& principal,
                                   const std::optional<Label>& eigenvariable) {
  switch (rule) {
    case RuleName::KL: {
      kl_done.erase({std::get<LabelledFormula>(principal[0]),
                     std::get<RelationalAtom>(principal[1])});
      return;
    }
    case RuleName::KR: {
      const auto& lf = std::get<LabelledFormula>(principal[0]);
      kr_chain_origin.erase({*eigenvariable, lf.formula});
      const Label origin = chain_origin(lf.label, lf.formula);
      auto it = kr_chain_used.find({origin, lf.formula});
      if (it != kr_chain_used.end() && --it->second == 0) {
        kr_chain_used.erase(it);
      }
      kr_done.erase(lf);
      return;
    }
    default:
      return;
  }
}

void SearchContext::note_applied(const RuleApplication& app) {
  note_applied(app.rule, app.principal, app.eigenvariable);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Proved:
      return "proved";
    case Verdict::Refuted:
      return "refuted";
    case Verdict::BudgetExhausted:
      return "budget-exhausted";
  }
  return "unknown";
}

namespace {

// Lower value = tried first.  Everything in one class is invertible, so the
// order only affects proof size, not the verdict; cheap, non-branching steps
// go first and label-introducing KR goes last.
int priority(RuleName r) {
  switch (r) {
    case RuleName::InitProp:
    case RuleName::InitRel:
      return 0;
    case RuleName::NegL:
    case RuleName::NegR:
    case RuleName::AndL:
    case RuleName::ImpR:
    case RuleName::R1R:
    case RuleName::R2R:
    case RuleName::R3L:
    case RuleName::R4R:
    case RuleName::R5R:
    case RuleName::R6L:
    case RuleName::R6R:
      return 1;
    case RuleName::AndR:
    case RuleName::ImpL:
    case RuleName::R1L:
    case RuleName::R2L:
    case RuleName::R3R:
    case RuleName::R4L:
    case RuleName::R5L:
      return 2;
    case RuleName::Ref:
    case RuleName::Trans:
    case RuleName::Sym:
      return 3;
    case RuleName::KL:
      return 4;
    case RuleName::KR:
      return 5;
  }
  return 6;
}

struct BudgetStop {
  std::string reason;
};

// One pending application of a relational closure rule.
struct ClosureStep {
  RuleName rule;
  std::vector<SequentExpr> principal;
  SequentExpr introduced;
};

// The relational rules saturate the antecedent toward the equivalence
// closure of its atoms over the sequent's labels, and the instances their
// side conditions admit are exactly the missing atoms.  Those are computed
// outright here, ordered so that every step's principals are present by the
// time it runs: mirrors of present atoms, then diagonals, then transitive
// pairs by breadth-first distance (the witnesses for a distance-d pair are
// a distance-(d-1) pair and an edge, both earlier in the order).
std::vector<ClosureStep> closure_steps(const Sequent& s) {
  std::vector<ClosureStep> out;
  const std::set<Agent> agents = agents_of(s);
  if (agents.empty()) return out;
  const std::set<Label> labels = labels_of(s);

  for (const Agent& a : agents) {
    std::set<std::pair<Label, Label>> present;
    for (const auto& e : s.antecedent.items()) {
      const auto* r = std::get_if<RelationalAtom>(&e);
      if (r && r->agent == a) present.insert({r->from, r->to});
    }

    const std::vector<std::pair<Label, Label>> originals(present.begin(),
                                                         present.end());
    for (const auto& [u, v] : originals) {
      if (u == v || present.contains({v, u})) continue;
      out.push_back({RuleName::Sym, {rel(u, a, v)}, rel(v, a, u)});
      present.insert({v, u});
    }

    for (const Label& x : labels) {
      if (present.contains({x, x})) continue;
      out.push_back({RuleName::Ref, {rel(x, a, x)}, rel(x, a, x)});
      present.insert({x, x});
    }

    std::map<Label, std::vector<Label>> adj;
    for (const auto& [u, v] : present) {
      if (u != v) adj[u].push_back(v);
    }

    for (const Label& x : labels) {
      if (!adj.contains(x)) continue;
      std::set<Label> seen{x};
      std::vector<Label> frontier{x};
      while (!frontier.empty()) {
        std::vector<Label> next;
        for (const Label& m : frontier) {
          const auto it = adj.find(m);
          if (it == adj.end()) continue;
          for (const Label& z : it->second) {
            if (!seen.insert(z).second) continue;
            next.push_back(z);
            if (m == x || present.contains({x, z})) continue;
            out.push_back(
                {RuleName::Trans, {rel(x, a, m), rel(m, a, z)}, rel(x, a, z)});
            present.insert({x, z});
          }
        }
        frontier = std::move(next);
      }
    }
  }
  return out;
}

// First expression on both sides, preferring ones that are initial sequents
// on their own (relational atoms sort first; atoms sort first per label).
const SequentExpr* first_shared(const Sequent& s) {
  const auto& a = s.antecedent.items();
  const auto& b = s.succedent.items();
  const SequentExpr* compound = nullptr;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const auto c = a[i] <=> b[j];
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      const auto* lf = std::get_if<LabelledFormula>(&a[i]);
      if (!lf || lf->formula.kind() == FormulaKind::Prop) return &a[i];
      if (!compound) compound = &a[i];
      ++i;
      ++j;
    }
  }
  return compound;
}

class Searcher {
 public:
  Searcher(const SearchBudget& budget, std::chrono::steady_clock::time_point deadline)
      : budget_(budget), deadline_(deadline) {}

  // First applicable formula-rule instance: the two logical classes share
  // one scan; the first non-branching hit wins outright, the first branching
  // hit is kept as fallback.  Ties break by enumeration order, so this picks
  // the same instance as minimizing priority() over applicable(s, ctx)
  // restricted to these classes, without materializing losing candidates.
  std::optional<RuleApplication> pick_formula(const Sequent& s,
                                              const SearchContext& ctx) const {
    std::optional<RuleApplication> found;
    std::optional<RuleApplication> branching;
    for_each_candidate(
        s,
        [&](RuleName rule, std::vector<SequentExpr> principal,
            std::optional<Label> eigen) {
          const bool wins = priority(rule) == 1;
          if (!wins && branching) return false;
          if (!ctx.permits(rule, principal)) return false;
          auto premises = schema_premises(rule, s, principal, eigen);
          if (!premises) return false;
          auto& slot = wins ? found : branching;
          slot = RuleApplication{rule, s, std::move(principal),
                                 std::move(*premises), std::move(eigen)};
          return wins;
        },
        [](RuleName rule) {
          const int p = priority(rule);
          return p == 1 || p == 2;
        });
    if (found) return found;
    return branching;
  }

  // First applicable KL instance, then first applicable KR instance.  Only
  // called once the relational closure is saturated.
  //
  // A KL instance whose premise formula is already in the antecedent is
  // passed over without being counted as applied: it cannot make progress
  // (matching is by value and contraction is admissible), and should the
  // duplicate later be consumed by another rule, applying KL then is still
  // covered by the once-per-pair bound.
  std::optional<RuleApplication> pick_modal(const Sequent& s,
                                            const SearchContext& ctx) const {
    std::optional<RuleApplication> found;
    auto take = [&](RuleName rule, std::vector<SequentExpr>& principal,
                    std::optional<Label>& eigen) {
      if (rule == RuleName::KL) {
        const auto& lf = std::get<LabelledFormula>(principal[0]);
        const auto& r = std::get<RelationalAtom>(principal[1]);
        if (s.antecedent.contains(lab(r.to, lf.formula.child()))) return false;
      }
      if (!ctx.permits(rule, principal)) return false;
      auto premises = schema_premises(rule, s, principal, eigen);
      if (!premises) return false;
      found = RuleApplication{rule, s, std::move(principal),
                              std::move(*premises), std::move(eigen)};
      return true;
    };

    for (int klass = 4; klass <= 5 && !found; ++klass) {
      for_each_candidate(
          s,
          [&](RuleName rule, std::vector<SequentExpr> principal,
              std::optional<Label> eigen) {
            return take(rule, principal, eigen);
          },
          [klass](RuleName rule) { return priority(rule) == klass; });
    }
    return found;
  }

  // Derivation when the branch closes, saturated sequent when it cannot.
  // The context is mutated in place and restored before returning; sibling
  // premises therefore see exactly the root-to-here marks.  (On BudgetStop
  // the context is abandoned wholesale, so no cleanup is needed.)
  // `num_labels` is threaded down instead of recomputed: premises mention
  // exactly the labels of their conclusion, plus the eigenvariable for KR.
  // `rel_closed` records that an ancestor scan already saturated the
  // relational closure and no rel atom has been added since.
  std::variant<Derivation, Sequent> run(const Sequent& s, SearchContext& ctx,
                                        int depth, int num_labels,
                                        bool rel_closed) {
    ++stats_.nodes;
    stats_.max_depth = std::max(stats_.max_depth, depth);
    stats_.peak_labels = std::max(stats_.peak_labels, num_labels);

    if (std::chrono::steady_clock::now() > deadline_) {
      throw BudgetStop{"time limit exceeded"};
    }
    if (depth > budget_.max_branch_depth) {
      throw BudgetStop{"branch depth limit exceeded"};
    }
    if (num_labels > budget_.max_labels) {
      throw BudgetStop{"label limit exceeded"};
    }

    // One merge pass over the sorted sides finds everything that closes the
    // branch outright: a shared atom is an initial sequent, and a shared
    // compound formula closes by identity expansion instead of by search.
    if (const SequentExpr* shared = first_shared(s)) {
      if (const auto* lf = std::get_if<LabelledFormula>(shared);
          lf && lf->formula.kind() != FormulaKind::Prop) {
        return identity_derivation(s, lf->label, lf->formula);
      }
      const RuleName rule = std::holds_alternative<RelationalAtom>(*shared)
                                ? RuleName::InitRel
                                : RuleName::InitProp;
      return Derivation{RuleApplication{rule, s, {*shared}, {}, std::nullopt},
                        {}};
    }

    std::optional<RuleApplication> chosen = pick_formula(s, ctx);
    if (!chosen) {
      // Formula rules exhausted: saturate the relational closure (as one
      // batched chain) before trying the modal rules, which feed on it.
      if (!rel_closed) {
        const std::vector<ClosureStep> steps = closure_steps(s);
        if (!steps.empty()) return run_closure(s, steps, ctx, depth, num_labels);
        rel_closed = true;
      }
      chosen = pick_modal(s, ctx);
    }

    if (!chosen) return s;  // saturated

    if (chosen->rule == RuleName::KL) ++stats_.kl_steps;
    if (chosen->rule == RuleName::KR) ++stats_.kr_steps;
    ctx.note_applied(chosen->rule, chosen->principal, chosen->eigenvariable);
    auto unnote = [&] {
      ctx.unnote_applied(chosen->rule, chosen->principal, chosen->eigenvariable);
    };

    // Of the rules pick can choose, only KR extends the antecedent's
    // relational part (or its label pool), so only it can re-enable a
    // closure rule below this node.
    const bool adds_rel = chosen->rule == RuleName::KR;
    const int child_labels = num_labels + (chosen->rule == RuleName::KR ? 1 : 0);

    std::vector<Derivation> children;
    children.reserve(chosen->premises.size());
    for (const auto& premise : chosen->premises) {
      auto sub = run(premise, ctx, depth + 1, child_labels,
                     rel_closed && !adds_rel);
      if (auto* failed = std::get_if<Sequent>(&sub)) {
        unnote();
        return std::move(*failed);
      }
      children.push_back(std::move(std::get<Derivation>(sub)));
    }
    unnote();
    return Derivation{std::move(*chosen), std::move(children)};
  }

  // Applies a whole closure batch as a chain of single-premise nodes and
  // continues the search at its end.  No candidate scan runs in between —
  // closure steps are forced (each instance's side condition stays satisfied
  // until it is the one applied) — and the chain's derivation spine is
  // rebuilt only if the branch actually closes, so refuted branches pay
  // nothing for it.
  std::variant<Derivation, Sequent> run_closure(
      const Sequent& s, const std::vector<ClosureStep>& steps,
      SearchContext& ctx, int depth, int num_labels) {
    bool succ_rel = false;
    for (const auto& e : s.succedent.items()) {
      if (std::holds_alternative<RelationalAtom>(e)) {
        succ_rel = true;
        break;
      }
    }

    Sequent cur = s;
    int applied = 0;
    for (const ClosureStep& st : steps) {
      if (std::chrono::steady_clock::now() > deadline_) {
        throw BudgetStop{"time limit exceeded"};
      }
      if (depth + applied + 1 > budget_.max_branch_depth) {
        throw BudgetStop{"branch depth limit exceeded"};
      }
      auto premises = schema_premises(st.rule, cur, st.principal, std::nullopt);
      if (!premises || premises->size() != 1) {
        throw std::logic_error("closure step rejected by its own schema");
      }
      cur = std::move(premises->front());
      ++applied;
      // An introduced atom matching a succedent atom closes the branch; the
      // recursion below finds it, making the rest of the batch moot.
      if (succ_rel && cur.succedent.contains(st.introduced)) break;
    }
    // The recursion's entry counts `cur`; count the other chain sequents.
    stats_.nodes += applied - 1;

    auto sub = run(cur, ctx, depth + applied, num_labels,
                   /*rel_closed=*/applied == static_cast<int>(steps.size()));
    if (auto* failed = std::get_if<Sequent>(&sub)) return std::move(*failed);

    Derivation d = std::move(std::get<Derivation>(sub));
    for (int i = applied; i-- > 0;) {
      const ClosureStep& st = steps[static_cast<std::size_t>(i)];
      std::vector<Sequent> premises{d.root()};
      Sequent conclusion{premises.front().antecedent.without(st.introduced),
                         premises.front().succedent};
      std::vector<Derivation> children;
      children.push_back(std::move(d));
      d = Derivation{RuleApplication{st.rule, std::move(conclusion),
                                     st.principal, std::move(premises),
                                     std::nullopt},
                     std::move(children)};
    }
    return d;
  }

  const SearchStats& stats() const { return stats_; }

 private:
  SearchBudget budget_;
  std::chrono::steady_clock::time_point deadline_;
  SearchStats stats_;
};

}  // namespace

std::optional<ExtractedModel> extract_countermodel(const Sequent& branch,
                                                   const Sequent& root) {
  const std::set<Label> branch_labels = labels_of(branch);
  std::vector<Label> labels(branch_labels.begin(), branch_labels.end());

  std::map<Label, int> world_of;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    world_of[labels[i]] = static_cast<int>(i);
  }
  // A label-free branch still refutes via the one-world model it induces.
  const int n = labels.empty() ? 1 : static_cast<int>(labels.size());
  std::vector<int> worlds(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) worlds[static_cast<std::size_t>(i)] = i;

  std::set<Agent> agents = agents_of(branch);
  for (const auto& a : agents_of(root)) agents.insert(a);

  std::map<Agent, std::set<WorldPair>> base;
  for (const auto& a : agents) base[a];
  for (const auto& e : branch.antecedent.items()) {
    if (const auto* r = std::get_if<RelationalAtom>(&e)) {
      base[r->agent].insert({world_of.at(r->from), world_of.at(r->to)});
    }
  }
  std::map<Agent, std::set<WorldPair>> relations;
  for (const auto& [a, pairs] : base) {
    relations[a] = equivalence_closure(worlds, pairs);
  }

  std::map<Atom, std::set<int>> valuation;
  for (const auto& e : branch.antecedent.items()) {
    if (const auto* lf = std::get_if<LabelledFormula>(&e)) {
      if (lf->formula.kind() == FormulaKind::Prop) {
        valuation[lf->formula.atom()].insert(world_of.at(lf->label));
      }
    }
  }

  KripkeModel model{std::move(worlds), std::move(relations),
                    std::move(valuation)};
  if (sequent_holds(model, world_of, root)) return std::nullopt;
  return ExtractedModel{std::move(model), std::move(world_of)};
}

ProofResult prove(const Sequent& s, const SearchBudget& budget,
                  const SearchOptions& options) {
  if (budget.max_branch_depth <= 0 || budget.max_labels <= 0 ||
      budget.time_limit <= std::chrono::milliseconds::zero()) {
    throw std::invalid_argument("prove: budget limits must be positive");
  }

  SearchContext ctx = SearchContext::for_root(s);
  ctx.enforce_kl_once = options.kl_once_per_pair;
  ctx.enforce_kr_cap = options.kr_chain_cap;

  Searcher searcher(budget, std::chrono::steady_clock::now() + budget.time_limit);
  ProofResult result;
  try {
    auto out = searcher.run(s, ctx, 0, static_cast<int>(labels_of(s).size()),
                            /*rel_closed=*/false);
    if (auto* proof = std::get_if<Derivation>(&out)) {
      result.verdict = Verdict::Proved;
      result.derivation = std::move(*proof);
    } else {
      result.verdict = Verdict::Refuted;
      Sequent branch = std::move(std::get<Sequent>(out));
      if (auto extracted = extract_countermodel(branch, s)) {
        result.countermodel = std::move(extracted->model);
        result.world_of_label = std::move(extracted->world_of_label);
      }
      result.saturated_branch = std::move(branch);
    }
  } catch (const BudgetStop& stop) {
    result.verdict = Verdict::BudgetExhausted;
    result.reason = stop.reason;
  }
  result.stats = searcher.stats();
  return result;
}

ProofResult prove_formula(const Formula& f, const SearchBudget& budget,
                          const SearchOptions& options) {
  return prove(Sequent{Multiset{}, Multiset{lab(Label{"x0"}, f)}}, budget,
               options);
}

}  // namespace gpal
