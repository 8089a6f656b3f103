#include "gpal/calculus.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "gpal/semantics.hpp"
#include "gpal/syntax.hpp"

using namespace gpal;

namespace {

const Label x{"x"};
const Label y{"y"};
const Label z{"z"};
const Agent a{"a"};

Sequent S(const char* text) { return parse_sequent(text); }
Formula F(const char* text) { return parse_formula(text); }

// Single-premise convenience: premises of `rule` at `principal`, which the
// test asserts exist.
std::vector<Sequent> prem(RuleName rule, const Sequent& s,
                          std::vector<SequentExpr> principal,
                          std::optional<Label> eigen = std::nullopt) {
  auto out = schema_premises(rule, s, principal, eigen);
  REQUIRE(out.has_value());
  return *out;
}

}  // namespace

TEST_CASE("rule names round-trip and have the right arity") {
  for (RuleName r : {RuleName::InitProp, RuleName::InitRel, RuleName::NegL,
                     RuleName::NegR, RuleName::AndL, RuleName::AndR,
                     RuleName::ImpL, RuleName::ImpR, RuleName::KL, RuleName::KR,
                     RuleName::Ref, RuleName::Trans, RuleName::Sym,
                     RuleName::R1L, RuleName::R1R, RuleName::R2L, RuleName::R2R,
                     RuleName::R3L, RuleName::R3R, RuleName::R4L, RuleName::R4R,
                     RuleName::R5L, RuleName::R5R, RuleName::R6L, RuleName::R6R}) {
    CHECK(rule_from_string(to_string(r)) == r);
  }
  CHECK(!rule_from_string("NoSuchRule").has_value());

  CHECK(rule_arity(RuleName::InitProp) == 0);
  CHECK(rule_arity(RuleName::NegL) == 1);
  CHECK(rule_arity(RuleName::ImpL) == 2);
  CHECK(rule_arity(RuleName::AndR) == 2);
  CHECK(rule_arity(RuleName::R4L) == 2);
  CHECK(rule_arity(RuleName::R6R) == 1);

  CHECK(is_reduction_rule(RuleName::R1L));
  CHECK(is_reduction_rule(RuleName::R6R));
  CHECK(!is_reduction_rule(RuleName::KL));
}

TEST_CASE("initial sequents need a shared atomic expression") {
  CHECK(is_initial(S("x: p => x: p")).has_value());
  CHECK(is_initial(S("x ~a y => x ~a y")).has_value());
  CHECK(!is_initial(S("x: p => y: p")).has_value());
  CHECK(!is_initial(S("x: K_a p => x: K_a p")).has_value());  // compound
  CHECK(!is_initial(S("x: p => x: q")).has_value());

  const auto app = is_initial(S("x: p, x: q => x: q"));
  REQUIRE(app.has_value());
  CHECK(app->rule == RuleName::InitProp);
  CHECK(app->premises.empty());
  CHECK(check_step(*app));
}

TEST_CASE("propositional rule shapes") {
  // NegL drops the principal and moves the body right.
  CHECK(prem(RuleName::NegL, S("x: ~p, x: q => x: r"), {lab(x, F("~p"))}) ==
        std::vector<Sequent>{S("x: q => x: r, x: p")});
  // NegR mirrors it.
  CHECK(prem(RuleName::NegR, S("=> x: ~p"), {lab(x, F("~p"))}) ==
        std::vector<Sequent>{S("x: p => ")});
  // AndL splits the conjunction in place.
  CHECK(prem(RuleName::AndL, S("x: p & q => "), {lab(x, F("p & q"))}) ==
        std::vector<Sequent>{S("x: p, x: q => ")});
  // AndR branches, succedent-carrying premise order left then right.
  CHECK(prem(RuleName::AndR, S("=> x: p & q"), {lab(x, F("p & q"))}) ==
        std::vector<Sequent>{S("=> x: p"), S("=> x: q")});
  // ImpL: the premise carrying the succedent comes first.
  CHECK(prem(RuleName::ImpL, S("x: p -> q => x: r"), {lab(x, F("p -> q"))}) ==
        std::vector<Sequent>{S("=> x: r, x: p"), S("x: q => x: r")});
  CHECK(prem(RuleName::ImpR, S("=> x: p -> q"), {lab(x, F("p -> q"))}) ==
        std::vector<Sequent>{S("x: p => x: q")});
}

TEST_CASE("knowledge rule shapes") {
  // KL keeps both principals.
  CHECK(prem(RuleName::KL, S("x: K_a p, x ~a y => "),
             {lab(x, F("K_a p")), rel(x, a, y)}) ==
        std::vector<Sequent>{S("x: K_a p, x ~a y, y: p => ")});
  // Wrong agent or mismatched source label is not an instance.
  CHECK(!schema_premises(RuleName::KL, S("x: K_a p, y ~a z => "),
                         {lab(x, F("K_a p")), rel(y, a, z)}, std::nullopt)
             .has_value());
  CHECK(!schema_premises(RuleName::KL, S("x: K_b p, x ~a y => "),
                         {lab(x, F("K_b p")), rel(x, a, y)}, std::nullopt)
             .has_value());

  // KR consumes the principal, adds the relational atom to a fresh label.
  CHECK(prem(RuleName::KR, S("=> x: K_a p"), {lab(x, F("K_a p"))}, y) ==
        std::vector<Sequent>{S("x ~a y => y: p")});
  // The eigenvariable must not occur in the conclusion.
  CHECK(!schema_premises(RuleName::KR, S("x ~a y => x: K_a p"),
                         {lab(x, F("K_a p"))}, y)
             .has_value());
  CHECK(!schema_premises(RuleName::KR, S("=> x: K_a p"), {lab(x, F("K_a p"))}, x)
             .has_value());
}

TEST_CASE("relational rule shapes and side conditions") {
  CHECK(prem(RuleName::Ref, S("x: K_a p => "), {rel(x, a, x)}) ==
        std::vector<Sequent>{S("x ~a x, x: K_a p => ")});
  // Ref only fires for labels and agents the sequent mentions.
  CHECK(!schema_premises(RuleName::Ref, S("x: K_a p => "), {rel(y, a, y)},
                         std::nullopt)
             .has_value());
  CHECK(!schema_premises(RuleName::Ref, S("x: p => "), {rel(x, a, x)},
                         std::nullopt)
             .has_value());  // no agent `a` anywhere
  // ...and refuses an atom that is already there.
  CHECK(!schema_premises(RuleName::Ref, S("x ~a x => "), {rel(x, a, x)},
                         std::nullopt)
             .has_value());

  CHECK(prem(RuleName::Sym, S("x ~a y => "), {rel(x, a, y)}) ==
        std::vector<Sequent>{S("x ~a y, y ~a x => ")});
  CHECK(!schema_premises(RuleName::Sym, S("x ~a y, y ~a x => "), {rel(x, a, y)},
                         std::nullopt)
             .has_value());

  CHECK(prem(RuleName::Trans, S("x ~a y, y ~a z => "),
             {rel(x, a, y), rel(y, a, z)}) ==
        std::vector<Sequent>{S("x ~a y, y ~a z, x ~a z => ")});
  // Chain must connect.
  CHECK(!schema_premises(RuleName::Trans, S("x ~a y, x ~a z => "),
                         {rel(x, a, y), rel(x, a, z)}, std::nullopt)
             .has_value());
  CHECK(!schema_premises(RuleName::Trans, S("x ~a y, y ~a z, x ~a z => "),
                         {rel(x, a, y), rel(y, a, z)}, std::nullopt)
             .has_value());
}

TEST_CASE("reduction rule shapes") {
  // R1: [phi]p against an atom.
  CHECK(prem(RuleName::R1R, S("=> x: [q]p"), {lab(x, F("[q]p"))}) ==
        std::vector<Sequent>{S("x: q => x: p")});
  CHECK(prem(RuleName::R1L, S("x: [q]p => "), {lab(x, F("[q]p"))}) ==
        std::vector<Sequent>{S("=> x: q"), S("x: p => ")});

  // R2: negated continuation.
  CHECK(prem(RuleName::R2R, S("=> x: [q]~p"), {lab(x, F("[q]~p"))}) ==
        std::vector<Sequent>{S("x: q => x: ~[q]p")});
  CHECK(prem(RuleName::R2L, S("x: [q]~p => "), {lab(x, F("[q]~p"))}) ==
        std::vector<Sequent>{S("=> x: q"), S("x: ~[q]p => ")});

  // R3: conjunction splits into two announcements.
  CHECK(prem(RuleName::R3L, S("x: [q](p & r) => "), {lab(x, F("[q](p & r)"))}) ==
        std::vector<Sequent>{S("x: [q]p, x: [q]r => ")});
  CHECK(prem(RuleName::R3R, S("=> x: [q](p & r)"), {lab(x, F("[q](p & r)"))}) ==
        std::vector<Sequent>{S("=> x: [q]p"), S("=> x: [q]r")});

  // R4: implication under an announcement.
  CHECK(prem(RuleName::R4R, S("=> x: [q](p -> r)"), {lab(x, F("[q](p -> r)"))}) ==
        std::vector<Sequent>{S("x: [q]p => x: [q]r")});
  CHECK(prem(RuleName::R4L, S("x: [q](p -> r) => "), {lab(x, F("[q](p -> r)"))}) ==
        std::vector<Sequent>{S("=> x: [q]p"), S("x: [q]r => ")});

  // R5: knowledge under an announcement.
  CHECK(prem(RuleName::R5R, S("=> x: [q]K_a p"), {lab(x, F("[q]K_a p"))}) ==
        std::vector<Sequent>{S("x: q => x: K_a [q]p")});
  CHECK(prem(RuleName::R5L, S("x: [q]K_a p => "), {lab(x, F("[q]K_a p"))}) ==
        std::vector<Sequent>{S("=> x: q"), S("x: K_a [q]p => ")});

  // R6: composed announcements collapse into one.
  CHECK(prem(RuleName::R6R, S("=> x: [q][p]r"), {lab(x, F("[q][p]r"))}) ==
        std::vector<Sequent>{S("=> x: [q & [q]p]r")});
  CHECK(prem(RuleName::R6L, S("x: [q][p]r => "), {lab(x, F("[q][p]r"))}) ==
        std::vector<Sequent>{S("x: [q & [q]p]r => ")});

  // Shape mismatches are rejected: R1 on a non-atomic continuation.
  CHECK(!schema_premises(RuleName::R1R, S("=> x: [q]~p"), {lab(x, F("[q]~p"))},
                         std::nullopt)
             .has_value());
  // Principal must actually occur in the stated side.
  CHECK(!schema_premises(RuleName::R1R, S("x: [q]p => "), {lab(x, F("[q]p"))},
                         std::nullopt)
             .has_value());
}

TEST_CASE("context weakening keeps multiplicity") {
  // The schema acts on one occurrence; the duplicate stays.
  CHECK(prem(RuleName::AndL, S("x: p & q, x: p & q => "),
             {lab(x, F("p & q"))}) ==
        std::vector<Sequent>{S("x: p & q, x: p, x: q => ")});
}

TEST_CASE("check_step accepts schema instances and rejects drift") {
  const Sequent c = S("x: p -> q => x: r");
  auto premises = prem(RuleName::ImpL, c, {lab(x, F("p -> q"))});
  RuleApplication app{RuleName::ImpL, c, {lab(x, F("p -> q"))}, premises,
                      std::nullopt};
  CHECK(check_step(app));

  RuleApplication swapped = app;
  std::swap(swapped.premises[0], swapped.premises[1]);
  CHECK(!check_step(swapped));

  RuleApplication extra = app;
  extra.premises[0].antecedent = extra.premises[0].antecedent.with(lab(x, F("p")));
  CHECK(!check_step(extra));
}

TEST_CASE("applicable enumerates exactly the schema instances") {
  // Reference enumeration built straight from the rule descriptions.
  std::mt19937_64 rng(21);
  const std::vector<Formula> pool{
      F("p"),         F("q"),          F("~p"),       F("p & q"),
      F("p -> q"),    F("K_a p"),      F("K_b q"),    F("[p]q"),
      F("[p]~q"),     F("[p](q & q)"), F("[p](p -> q)"), F("[p]K_a q"),
      F("[p][q]p"),
  };
  const std::vector<Label> labels{x, y};
  const std::vector<Agent> agents{a, Agent{"b"}};

  auto random_sequent = [&] {
    std::uniform_int_distribution<int> nexpr(0, 4);
    std::uniform_int_distribution<std::size_t> fpick(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> lpick(0, labels.size() - 1);
    std::uniform_int_distribution<std::size_t> apick(0, agents.size() - 1);
    std::uniform_int_distribution<int> kind(0, 3);
    auto side = [&] {
      std::vector<SequentExpr> items;
      const int n = nexpr(rng);
      for (int i = 0; i < n; ++i) {
        if (kind(rng) == 0) {
          items.push_back(rel(labels[lpick(rng)], agents[apick(rng)],
                              labels[lpick(rng)]));
        } else {
          items.push_back(lab(labels[lpick(rng)], pool[fpick(rng)]));
        }
      }
      return Multiset{std::move(items)};
    };
    return Sequent{side(), side()};
  };

  for (int round = 0; round < 300; ++round) {
    const Sequent s = random_sequent();

    // Everything applicable() returns must be a literal schema instance.
    const auto apps = applicable(s);
    for (const auto& app : apps) {
      CHECK(app.conclusion == s);
      CHECK(check_step(app));
    }

    // And it must not miss: replay every (rule, principal) pair the rule
    // descriptions admit and check containment.
    std::set<std::pair<RuleName, std::vector<SequentExpr>>> listed;
    for (const auto& app : apps) listed.insert({app.rule, app.principal});

    auto expect = [&](RuleName rule, std::vector<SequentExpr> principal,
                      std::optional<Label> eigen = std::nullopt) {
      if (schema_premises(rule, s, principal, eigen).has_value()) {
        CHECK(listed.contains({rule, principal}));
      }
    };

    const Label fresh = fresh_label(s);
    for (const auto& e : s.antecedent.items()) {
      if (const auto* r = std::get_if<RelationalAtom>(&e)) {
        expect(RuleName::InitRel, {e});
        expect(RuleName::Sym, {e});
        for (const auto& e2 : s.antecedent.items()) {
          if (const auto* r2 = std::get_if<RelationalAtom>(&e2)) {
            if (r->to == r2->from && r->agent == r2->agent)
              expect(RuleName::Trans, {e, e2});
          }
        }
        continue;
      }
      const auto& lf = std::get<LabelledFormula>(e);
      expect(RuleName::InitProp, {e});
      expect(RuleName::NegL, {e});
      expect(RuleName::AndL, {e});
      expect(RuleName::ImpL, {e});
      expect(RuleName::R1L, {e});
      expect(RuleName::R2L, {e});
      expect(RuleName::R3L, {e});
      expect(RuleName::R4L, {e});
      expect(RuleName::R5L, {e});
      expect(RuleName::R6L, {e});
      for (const auto& e2 : s.antecedent.items()) {
        if (const auto* r2 = std::get_if<RelationalAtom>(&e2)) {
          if (r2->from == lf.label) expect(RuleName::KL, {e, e2});
        }
      }
    }
    for (const auto& e : s.succedent.items()) {
      if (std::holds_alternative<RelationalAtom>(e)) continue;
      expect(RuleName::NegR, {e});
      expect(RuleName::AndR, {e});
      expect(RuleName::ImpR, {e});
      expect(RuleName::KR, {e}, fresh);
      expect(RuleName::R1R, {e});
      expect(RuleName::R2R, {e});
      expect(RuleName::R3R, {e});
      expect(RuleName::R4R, {e});
      expect(RuleName::R5R, {e});
      expect(RuleName::R6R, {e});
    }
    for (const Label& l : labels_of(s)) {
      for (const Agent& ag : agents_of(s)) expect(RuleName::Ref, {rel(l, ag, l)});
    }
  }
}

// Local soundness and invertibility, model-checked: a conclusion holds in
// every pointed interpretation iff all premises do (the KR eigenvariable
// ranges over worlds on the premise side).
TEST_CASE("rules are locally sound and invertible on small models") {
  const std::vector<Agent> agents{a};
  const std::vector<Atom> atoms{Atom{"p"}, Atom{"q"}};

  const std::vector<std::pair<RuleName, std::pair<Sequent, std::vector<SequentExpr>>>>
      cases{
          {RuleName::NegL, {S("x: ~p => x: q"), {lab(x, F("~p"))}}},
          {RuleName::NegR, {S("x: q => x: ~p"), {lab(x, F("~p"))}}},
          {RuleName::AndL, {S("x: p & q => x: q"), {lab(x, F("p & q"))}}},
          {RuleName::AndR, {S("x: q => x: p & q"), {lab(x, F("p & q"))}}},
          {RuleName::ImpL, {S("x: p -> q => x: q"), {lab(x, F("p -> q"))}}},
          {RuleName::ImpR, {S("=> x: p -> q"), {lab(x, F("p -> q"))}}},
          {RuleName::KL, {S("x: K_a p, x ~a y => y: q"),
                          {lab(x, F("K_a p")), rel(x, a, y)}}},
          {RuleName::KR, {S("x: q => x: K_a p"), {lab(x, F("K_a p"))}}},
          {RuleName::Ref, {S("x: K_a p => x: p"), {rel(x, a, x)}}},
          {RuleName::Sym, {S("x ~a y => y: p, x: p"), {rel(x, a, y)}}},
          {RuleName::Trans, {S("x ~a y, y ~a z, x: K_a p => z: q"),
                             {rel(x, a, y), rel(y, a, z)}}},
          {RuleName::R1R, {S("=> x: [q]p"), {lab(x, F("[q]p"))}}},
          {RuleName::R1L, {S("x: [q]p => x: q"), {lab(x, F("[q]p"))}}},
          {RuleName::R2R, {S("=> x: [q]~p"), {lab(x, F("[q]~p"))}}},
          {RuleName::R2L, {S("x: [q]~p => "), {lab(x, F("[q]~p"))}}},
          {RuleName::R3R, {S("=> x: [q](p & p)"), {lab(x, F("[q](p & p)"))}}},
          {RuleName::R3L, {S("x: [q](p & p) => "), {lab(x, F("[q](p & p)"))}}},
          {RuleName::R4R, {S("=> x: [q](p -> p)"), {lab(x, F("[q](p -> p)"))}}},
          {RuleName::R4L, {S("x: [q](p -> p) => x: q"), {lab(x, F("[q](p -> p)"))}}},
          {RuleName::R5R, {S("=> x: [q]K_a p"), {lab(x, F("[q]K_a p"))}}},
          {RuleName::R5L, {S("x: [q]K_a p => x: p"), {lab(x, F("[q]K_a p"))}}},
          {RuleName::R6R, {S("=> x: [q][p]q"), {lab(x, F("[q][p]q"))}}},
          {RuleName::R6L, {S("x: [q][p]q => "), {lab(x, F("[q][p]q"))}}},
      };

  for (const auto& [rule, instance] : cases) {
    CAPTURE(to_string(rule));
    const auto& [conclusion, principal] = instance;
    const std::optional<Label> eigen =
        rule == RuleName::KR ? std::optional<Label>(fresh_label(conclusion))
                             : std::nullopt;
    const auto premises = schema_premises(rule, conclusion, principal, eigen);
    REQUIRE(premises.has_value());

    // Collect the labels each side mentions.
    std::set<Label> c_labels = labels_of(conclusion);
    std::set<Label> p_labels;
    for (const auto& p : *premises) {
      for (const Label& l : labels_of(p)) p_labels.insert(l);
    }

    auto all_assignments = [](const std::set<Label>& ls, int n) {
      std::vector<std::map<Label, int>> out{{}};
      for (const Label& l : ls) {
        std::vector<std::map<Label, int>> next;
        for (const auto& base : out) {
          for (int w = 0; w < n; ++w) {
            auto extended = base;
            extended[l] = w;
            next.push_back(std::move(extended));
          }
        }
        out = std::move(next);
      }
      return out;
    };

    for_each_model(2, agents, atoms, [&](const KripkeModel& m) {
      const int n = static_cast<int>(m.worlds().size());
      for (const auto& assign : all_assignments(c_labels, n)) {
        const bool c_holds = sequent_holds(m, assign, conclusion);
        bool p_hold = true;
        // Premise labels beyond the conclusion's (the KR eigenvariable)
        // are quantified universally.
        std::set<Label> extra;
        for (const Label& l : p_labels) {
          if (!c_labels.contains(l)) extra.insert(l);
        }
        for (const auto& ext : all_assignments(extra, n)) {
          auto full = assign;
          for (const auto& [l, w] : ext) full[l] = w;
          for (const auto& p : *premises) {
            if (!sequent_holds(m, full, p)) p_hold = false;
          }
        }
        CHECK(c_holds == p_hold);
      }
      return true;
    });
  }
}
