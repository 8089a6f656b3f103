#include "gpal/search.hpp"

#include <chrono>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "gpal/derivation.hpp"
#include "gpal/fuzz.hpp"
#include "gpal/semantics.hpp"
#include "gpal/syntax.hpp"

using namespace gpal;

namespace {

Formula F(const char* text) { return parse_formula(text); }
Sequent S(const char* text) { return parse_sequent(text); }

const std::vector<std::string> kValid{
    "K_a p -> p",
    "K_a p -> K_a K_a p",
    "~K_a p -> K_a ~K_a p",
    "K_a (p -> q) -> (K_a p -> K_a q)",
    "[p]q <-> (p -> q)",
    "[p]~q <-> (p -> ~[p]q)",
    "[p](q & r) <-> ([p]q & [p]r)",
    "[p](q -> r) <-> ([p]q -> [p]r)",
    "[p]K_a q <-> (p -> K_a [p]q)",
    "[p][q]r <-> [p & [p]q]r",
};

// Proved results must carry a derivation of the exact input sequent that
// the checker accepts.
void require_proof(const ProofResult& r, const Sequent& root) {
  REQUIRE(r.verdict == Verdict::Proved);
  REQUIRE(r.derivation.has_value());
  CHECK(r.derivation->root() == root);
  CHECK(check_derivation(*r.derivation));
}

Sequent formula_root(const Formula& f) {
  return Sequent{Multiset{}, Multiset{{lab(Label{"x0"}, f)}}};
}

int count_knows(const Formula& f, const Agent& a) {
  switch (f.kind()) {
    case FormulaKind::Prop:
      return 0;
    case FormulaKind::Not:
      return count_knows(f.child(), a);
    case FormulaKind::Know:
      return (f.agent() == a ? 1 : 0) + count_knows(f.child(), a);
    case FormulaKind::And:
    case FormulaKind::Implies:
    case FormulaKind::Announce:
      return count_knows(f.left(), a) + count_knows(f.right(), a);
  }
  return 0;
}

// A branch carrying the same compound formula on both sides is closed by a
// synthesized identity expansion, not by search; nothing below such a node
// was ever a search step, so the control replay stops there.
bool identity_handoff(const Sequent& s) {
  for (const SequentExpr& e : s.antecedent.items()) {
    const auto* lf = std::get_if<LabelledFormula>(&e);
    if (lf && lf->formula.kind() != FormulaKind::Prop &&
        s.succedent.contains(e)) {
      return true;
    }
  }
  return false;
}

// Replays the loop-control bookkeeping along every root-to-leaf path: no KL
// instance may repeat, and no KR chain may exceed the root's cap.
void walk_controls(const Derivation& d, const std::map<Agent, int>& caps,
                   std::set<std::pair<LabelledFormula, RelationalAtom>> kl_seen,
                   std::map<std::pair<Label, Formula>, Label> origin,
                   std::map<std::pair<Label, Formula>, int> used) {
  if (identity_handoff(d.root())) return;
  const RuleApplication& app = d.justification;
  if (app.rule == RuleName::KL) {
    const auto key = std::pair{std::get<LabelledFormula>(app.principal[0]),
                               std::get<RelationalAtom>(app.principal[1])};
    CHECK(!kl_seen.contains(key));
    kl_seen.insert(key);
  } else if (app.rule == RuleName::KR) {
    const auto& lf = std::get<LabelledFormula>(app.principal[0]);
    const auto it = origin.find({lf.label, lf.formula});
    const Label chain = it == origin.end() ? lf.label : it->second;
    const int n = ++used[{chain, lf.formula}];
    CHECK(n <= caps.at(lf.formula.agent()));
    REQUIRE(app.eigenvariable.has_value());
    origin[{*app.eigenvariable, lf.formula}] = chain;
  }
  for (const Derivation& child : d.children) {
    walk_controls(child, caps, kl_seen, origin, used);
  }
}

void check_controls(const Derivation& d, const Sequent& root) {
  std::map<Agent, int> caps;
  for (const Agent& a : agents_of(root)) caps[a] = 1;
  for (const auto& e : root.antecedent.items()) {
    if (const auto* lf = std::get_if<LabelledFormula>(&e)) {
      for (const Agent& a : agents_of(root)) {
        caps[a] = std::max(caps[a], count_knows(lf->formula, a));
      }
    }
  }
  walk_controls(d, caps, {}, {}, {});
}

void collect_formulas(const Derivation& d, std::set<Formula>& out) {
  for (const auto& side :
       {d.justification.conclusion.antecedent, d.justification.conclusion.succedent}) {
    for (const auto& e : side.items()) {
      if (const auto* lf = std::get_if<LabelledFormula>(&e)) out.insert(lf->formula);
    }
  }
  for (const Derivation& child : d.children) collect_formulas(child, out);
}

}  // namespace

TEST_CASE("the S5 axioms and reduction biconditionals are proved") {
  for (const std::string& text : kValid) {
    CAPTURE(text);
    const Formula f = parse_formula(text);
    const ProofResult r = prove_formula(f);
    require_proof(r, formula_root(f));
    check_controls(*r.derivation, formula_root(f));
  }
}

TEST_CASE("proof of T has the expected shape") {
  const ProofResult r = prove_formula(F("K_a p -> p"));
  REQUIRE(r.verdict == Verdict::Proved);
  CHECK(r.stats.nodes == 4);

  const Derivation* d = &*r.derivation;
  for (RuleName expected :
       {RuleName::ImpR, RuleName::Ref, RuleName::KL, RuleName::InitProp}) {
    CHECK(d->justification.rule == expected);
    if (!d->children.empty()) d = &d->children.front();
  }
  CHECK(d->children.empty());
}

TEST_CASE("frozen node counts for the introspection axioms") {
  CHECK(prove_formula(F("K_a p -> K_a K_a p")).stats.nodes == 14);
  CHECK(prove_formula(F("~K_a p -> K_a ~K_a p")).stats.nodes == 15);
}

TEST_CASE("shared compound formulas close through the identity shortcut") {
  const Formula f = F("K_a p -> K_a p");
  const ProofResult r = prove_formula(f);
  require_proof(r, formula_root(f));
  CHECK(r.stats.nodes == 2);  // root and the ImpR premise; the rest is synthesized
}

TEST_CASE("synthesized identity expansions are not search steps") {
  // The identity tree for nested same-agent K holds a KR chain of length two,
  // which the searcher itself would never fire under the cap of one.  The
  // stats count zero firings and the control replay stops at the handoff.
  const Formula f = F("K_a K_a p -> K_a K_a p");
  const ProofResult r = prove_formula(f);
  require_proof(r, formula_root(f));
  CHECK(r.stats.kr_steps == 0);

  int tree_kr = 0;
  std::vector<const Derivation*> stack{&*r.derivation};
  while (!stack.empty()) {
    const Derivation* d = stack.back();
    stack.pop_back();
    if (d->justification.rule == RuleName::KR) ++tree_kr;
    for (const Derivation& c : d->children) stack.push_back(&c);
  }
  CHECK(tree_kr == 2);
  CHECK(identity_handoff(r.derivation->children.front().root()));
  check_controls(*r.derivation, formula_root(f));
}

TEST_CASE("the Moore sentence is refuted with a two-world countermodel") {
  const Formula moore = F("[p & ~K_a p]~K_a p");
  const ProofResult r = prove_formula(moore);
  REQUIRE(r.verdict == Verdict::Refuted);
  CHECK(r.stats.nodes == 23);
  REQUIRE(r.saturated_branch.has_value());
  REQUIRE(r.countermodel.has_value());
  CHECK(r.countermodel->worlds().size() <= 2);
  const int w = r.world_of_label.at(Label{"x0"});
  CHECK(!eval(*r.countermodel, w, moore));
}

TEST_CASE("sequents with explicit labels and relational atoms") {
  require_proof(prove(S("x: K_a p, x ~a y => y: p")),
                S("x: K_a p, x ~a y => y: p"));
  require_proof(prove(S("x ~a y, y ~a z => x ~a z")),
                S("x ~a y, y ~a z => x ~a z"));
  require_proof(prove(S("=> x ~b x")), S("=> x ~b x"));

  const ProofResult r = prove(S("x: K_a p, x ~b y => y: p"));
  CHECK(r.verdict == Verdict::Refuted);  // wrong agent
}

TEST_CASE("refuted countermodels falsify the root sequent") {
  const Sequent s = S("x: K_a ~K_a p => x: q");
  const ProofResult r = prove(s);
  REQUIRE(r.verdict == Verdict::Refuted);
  REQUIRE(r.countermodel.has_value());
  CHECK(!sequent_holds(*r.countermodel, r.world_of_label, s));
}

TEST_CASE("search is deterministic") {
  const Formula f = F("[p]K_a q <-> (p -> K_a [p]q)");
  const ProofResult r1 = prove_formula(f);
  const ProofResult r2 = prove_formula(f);
  CHECK(r1.verdict == r2.verdict);
  CHECK(r1.derivation == r2.derivation);
  CHECK(r1.stats.nodes == r2.stats.nodes);
  CHECK(r1.stats.max_depth == r2.stats.max_depth);

  const ProofResult m1 = prove_formula(F("[p & ~K_a p]~K_a p"));
  const ProofResult m2 = prove_formula(F("[p & ~K_a p]~K_a p"));
  CHECK(m1.saturated_branch == m2.saturated_branch);
}

TEST_CASE("stats record modal steps and label growth") {
  const ProofResult r = prove_formula(F("K_a p -> K_a K_a p"));
  CHECK(r.stats.kl_steps > 0);
  CHECK(r.stats.kr_steps > 0);
  CHECK(r.stats.peak_labels >= 2);
  CHECK(r.stats.max_depth > 0);
}

TEST_CASE("every derivation formula is a semi-subformula of the root") {
  for (const std::string& text : kValid) {
    const Formula f = parse_formula(text);
    const ProofResult r = prove_formula(f);
    REQUIRE(r.verdict == Verdict::Proved);
    std::set<Formula> seen;
    collect_formulas(*r.derivation, seen);
    const std::set<Formula> allowed = semi_subformulas(f);
    for (const Formula& g : seen) {
      CAPTURE(render_formula(g));
      CHECK(allowed.contains(g));
    }
  }
}

TEST_CASE("weakening preserves provability") {
  const Label y{"y"};
  const Label z{"z"};
  for (const std::string& text : kValid) {
    const Formula f = parse_formula(text);
    Sequent weakened{
        Multiset{{rel(Label{"x0"}, Agent{"b"}, y), lab(y, F("r")),
                  lab(Label{"x0"}, F("q -> q"))}},
        Multiset{{lab(Label{"x0"}, f), lab(z, F("p & ~p"))}}};
    CAPTURE(text);
    CHECK(prove(weakened).verdict == Verdict::Proved);
  }
}

TEST_CASE("contraction preserves provability") {
  const std::vector<std::pair<const char*, const char*>> pairs{
      {"x: p & q, x: p & q => x: q", "x: p & q => x: q"},
      {"x: K_a p, x: K_a p, x ~a y => y: p", "x: K_a p, x ~a y => y: p"},
      {"=> x: p -> p, x: p -> p", "=> x: p -> p"},
      {"x: [p]q, x: [p]q => x: [p]q", "x: [p]q => x: [p]q"},
      {"x ~a y, x ~a y => x ~a y", "x ~a y => x ~a y"},
      {"x: ~~p, x: ~~p => x: p", "x: ~~p => x: p"},
  };
  for (const auto& [doubled, single] : pairs) {
    CAPTURE(doubled);
    CHECK(prove(S(doubled)).verdict == Verdict::Proved);
    CHECK(prove(S(single)).verdict == Verdict::Proved);
  }
}

TEST_CASE("cut instances") {
  // prove(left) and prove(mid) feed a cut whose conclusion must be provable.
  struct Cut {
    const char* left;   // Gamma => Delta, x: f
    const char* mid;    // x: f, Gamma => Delta
    const char* conclusion;
  };
  const std::vector<Cut> cuts{
      {"=> x: K_a p -> p", "x: K_a p -> p => x: (K_a p -> p) & (K_a p -> p)",
       "=> x: (K_a p -> p) & (K_a p -> p)"},
      {"=> x: p -> p", "x: p -> p => x: [q](p -> p)", "=> x: [q](p -> p)"},
      {"x: K_a p, x ~a y => y: p", "y: p, x: K_a p, x ~a y => y: p & p",
       "x: K_a p, x ~a y => y: p & p"},
      {"x: p & q => x: q", "x: q, x: p & q => x: K_a p -> q",
       "x: p & q => x: K_a p -> q"},
  };
  for (const Cut& c : cuts) {
    CAPTURE(c.conclusion);
    REQUIRE(prove(S(c.left)).verdict == Verdict::Proved);
    REQUIRE(prove(S(c.mid)).verdict == Verdict::Proved);
    CHECK(prove(S(c.conclusion)).verdict == Verdict::Proved);
  }
}

TEST_CASE("loop controls hold along random proved formulas") {
  std::mt19937_64 rng(31);
  const std::vector<Agent> agents{Agent{"a"}, Agent{"b"}};
  const std::vector<Atom> atoms{Atom{"p"}, Atom{"q"}};
  int proved = 0;
  for (int i = 0; i < 200; ++i) {
    const Formula g = random_formula(rng, 3, agents, atoms);
    const Formula f = Formula::implication(g, g);
    const ProofResult r = prove_formula(f);
    REQUIRE(r.verdict == Verdict::Proved);
    check_controls(*r.derivation, formula_root(f));
    CHECK(check_derivation(*r.derivation));
    ++proved;
  }
  CHECK(proved == 200);
}

TEST_CASE("budget limits trip with a reason") {
  SUBCASE("depth") {
    SearchBudget b;
    b.max_branch_depth = 1;
    const ProofResult r = prove_formula(F("p -> (q -> r)"), b);
    CHECK(r.verdict == Verdict::BudgetExhausted);
    CHECK(r.reason == "branch depth limit exceeded");
    CHECK(!r.derivation.has_value());
    CHECK(!r.saturated_branch.has_value());
  }
  SUBCASE("labels") {
    SearchBudget b;
    b.max_labels = 1;
    const ProofResult r = prove_formula(F("K_a p -> K_a K_a p"), b);
    CHECK(r.verdict == Verdict::BudgetExhausted);
    CHECK(r.reason == "label limit exceeded");
  }
  SUBCASE("time") {
    SearchBudget b;
    b.max_branch_depth = 1'000'000;
    b.max_labels = 100'000;
    b.time_limit = std::chrono::milliseconds{1};
    SearchOptions o;
    o.kr_chain_cap = false;  // unbounded chain guarantees >1ms of work
    const ProofResult r = prove(S("x: K_a ~K_a p => x: q"), b, o);
    CHECK(r.verdict == Verdict::BudgetExhausted);
    CHECK(r.reason == "time limit exceeded");
  }
  SUBCASE("invalid budgets are rejected") {
    SearchBudget b;
    b.max_branch_depth = 0;
    CHECK_THROWS_AS(prove_formula(F("p"), b), std::invalid_argument);
    b = SearchBudget{};
    b.time_limit = std::chrono::milliseconds{0};
    CHECK_THROWS_AS(prove_formula(F("p"), b), std::invalid_argument);
  }
}

TEST_CASE("disabling a loop control re-creates the divergence it stops") {
  SUBCASE("KL once per pair") {
    // KL re-derives y: p & q forever once AndL has consumed it.
    const Sequent s = S("x: K_a (p & q), x ~a y => x: r");
    CHECK(prove(s).verdict == Verdict::Refuted);

    SearchBudget b;
    b.max_branch_depth = 300;
    SearchOptions o;
    o.kl_once_per_pair = false;
    const ProofResult r = prove(s, b, o);
    CHECK(r.verdict == Verdict::BudgetExhausted);
  }
  SUBCASE("KR chain cap") {
    // Every fresh label re-creates x_i: K_a p on the right.
    const Sequent s = S("x: K_a ~K_a p => x: q");
    CHECK(prove(s).verdict == Verdict::Refuted);

    SearchBudget b;
    b.max_branch_depth = 100'000;
    b.max_labels = 10;
    SearchOptions o;
    o.kr_chain_cap = false;
    const ProofResult r = prove(s, b, o);
    CHECK(r.verdict == Verdict::BudgetExhausted);
    CHECK(r.reason == "label limit exceeded");
  }
}

TEST_CASE("SearchContext bookkeeping") {
  const Label x{"x"};
  const Label y{"y"};
  const Agent a{"a"};
  const Formula kp = F("K_a p");

  SUBCASE("caps come from the root antecedent, with a floor of one") {
    const SearchContext c1 = SearchContext::for_root(S("x: K_a p, x: K_a q => "));
    CHECK(c1.kr_cap(a) == 2);
    const SearchContext c2 = SearchContext::for_root(S("=> x: K_a p"));
    CHECK(c2.kr_cap(a) == 1);
    const SearchContext c3 = SearchContext::for_root(S("x: K_a ~K_a p => "));
    CHECK(c3.kr_cap(a) == 2);  // nested occurrences count
  }

  SUBCASE("KL marks exact pairs") {
    SearchContext ctx = SearchContext::for_root(S("x: K_a p, x ~a y => "));
    const std::vector<SequentExpr> kl{lab(x, kp), rel(x, a, y)};
    CHECK(ctx.permits(RuleName::KL, kl));
    ctx.note_applied(RuleName::KL, kl, std::nullopt);
    CHECK(!ctx.permits(RuleName::KL, kl));
    // A different relational atom is a different instance.
    CHECK(ctx.permits(RuleName::KL, {lab(x, kp), rel(x, a, x)}));
    ctx.unnote_applied(RuleName::KL, kl, std::nullopt);
    CHECK(ctx.permits(RuleName::KL, kl));
  }

  SUBCASE("KR chains inherit their origin") {
    SearchContext ctx = SearchContext::for_root(S("=> x: K_a p"));
    REQUIRE(ctx.kr_cap(a) == 1);
    const std::vector<SequentExpr> at_x{lab(x, kp)};
    const std::vector<SequentExpr> at_y{lab(y, kp)};
    CHECK(ctx.permits(RuleName::KR, at_x));
    ctx.note_applied(RuleName::KR, at_x, y);
    CHECK(ctx.chain_origin(y, kp) == x);
    CHECK(!ctx.permits(RuleName::KR, at_x));  // done
    CHECK(!ctx.permits(RuleName::KR, at_y));  // chain cap reached
    ctx.unnote_applied(RuleName::KR, at_x, y);
    CHECK(ctx.permits(RuleName::KR, at_x));
    CHECK(ctx.chain_origin(y, kp) == y);
  }
}

TEST_CASE("countermodel extraction reads the branch") {
  const Sequent branch = S("x: p => x: q");
  const auto extracted = extract_countermodel(branch, branch);
  REQUIRE(extracted.has_value());
  const int w = extracted->world_of_label.at(Label{"x"});
  CHECK(eval(extracted->model, w, F("p")));
  CHECK(!eval(extracted->model, w, F("q")));

  // A provable root yields nothing: every candidate still satisfies it.
  CHECK(!extract_countermodel(S("x: p => x: p"), S("x: p => x: p")).has_value());
}

TEST_CASE("a short fuzz run is clean") {
  FuzzOptions o;
  o.count = 60;
  o.seed = 11;
  o.max_depth = 3;
  const FuzzReport report = run_fuzz(o);
  CHECK(report.cases == 60);
  CHECK(report.proved + report.refuted + report.budget_exhausted == 60);
  CHECK(report.clean());
  CHECK(!report.text.empty());

  // Same options, same report text (determinism of the harness).
  CHECK(run_fuzz(o).text == report.text);
}
