#include "gpal/calculus.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace gpal {

namespace {

constexpr std::array<std::pair<RuleName, const char*>, 25> kRuleNames{{
    {RuleName::InitProp, "InitProp"}, {RuleName::InitRel, "InitRel"},
    {RuleName::NegL, "NegL"},         {RuleName::NegR, "NegR"},
    {RuleName::AndL, "AndL"},         {RuleName::AndR, "AndR"},
    {RuleName::ImpL, "ImpL"},         {RuleName::ImpR, "ImpR"},
    {RuleName::KL, "KL"},             {RuleName::KR, "KR"},
    {RuleName::Ref, "Ref"},           {RuleName::Trans, "Trans"},
    {RuleName::Sym, "Sym"},           {RuleName::R1L, "R1L"},
    {RuleName::R1R, "R1R"},           {RuleName::R2L, "R2L"},
    {RuleName::R2R, "R2R"},           {RuleName::R3L, "R3L"},
    {RuleName::R3R, "R3R"},           {RuleName::R4L, "R4L"},
    {RuleName::R4R, "R4R"},           {RuleName::R5L, "R5L"},
    {RuleName::R5R, "R5R"},           {RuleName::R6L, "R6L"},
    {RuleName::R6R, "R6R"},
}};

}  // namespace

std::string to_string(RuleName rule) {
  for (const auto& [r, name] : kRuleNames)
    if (r == rule) return name;
  throw std::logic_error("unknown rule");
}

std::optional<RuleName> rule_from_string(const std::string& name) {
  for (const auto& [r, n] : kRuleNames)
    if (name == n) return r;
  return std::nullopt;
}

bool is_reduction_rule(RuleName rule) {
  return rule >= RuleName::R1L && rule <= RuleName::R6R;
}

int rule_arity(RuleName rule) {
  switch (rule) {
    case RuleName::InitProp:
    case RuleName::InitRel:
      return 0;
    case RuleName::ImpL:
    case RuleName::AndR:
    case RuleName::R1L:
    case RuleName::R2L:
    case RuleName::R3R:
    case RuleName::R4L:
    case RuleName::R5L:
      return 2;
    default:
      return 1;
  }
}

namespace {

// Composite formulas the reduction rules introduce.
Formula neg_announced(const Formula& phi, const Formula& psi) {
  return Formula::negation(Formula::announcement(phi, psi));
}
Formula know_announced(const Agent& a, const Formula& phi, const Formula& psi) {
  return Formula::knows(a, Formula::announcement(phi, psi));
}
Formula composed_announcement(const Formula& phi, const Formula& psi,
                              const Formula& chi) {
  return Formula::announcement(
      Formula::conjunction(phi, Formula::announcement(phi, psi)), chi);
}

// Same relation as labels_of(s).contains(l), without building the set.
bool label_occurs(const Sequent& s, const Label& l) {
  auto in = [&l](const Multiset& m) {
    for (const auto& e : m.items()) {
      if (const auto* r = std::get_if<RelationalAtom>(&e)) {
        if (r->from == l || r->to == l) return true;
      } else if (std::get<LabelledFormula>(e).label == l) {
        return true;
      }
    }
    return false;
  };
  return in(s.antecedent) || in(s.succedent);
}

}  // namespace

std::optional<std::vector<Sequent>> schema_premises(
    RuleName rule, const Sequent& c, const std::vector<SequentExpr>& principal,
    const std::optional<Label>& eigenvariable) {
  const Multiset& ant = c.antecedent;
  const Multiset& suc = c.succedent;
  if (eigenvariable.has_value() != (rule == RuleName::KR)) return std::nullopt;
  if (principal.size() !=
      (rule == RuleName::KL || rule == RuleName::Trans ? 2u : 1u))
    return std::nullopt;

  const auto* lf = std::get_if<LabelledFormula>(&principal[0]);
  const auto* ra = std::get_if<RelationalAtom>(&principal[0]);

  auto one = [](Sequent s) { return std::vector<Sequent>{std::move(s)}; };
  auto two = [](Sequent a, Sequent b) {
    return std::vector<Sequent>{std::move(a), std::move(b)};
  };

  switch (rule) {
    case RuleName::InitProp:
      if (!lf || lf->formula.kind() != FormulaKind::Prop) return std::nullopt;
      if (!ant.contains(principal[0]) || !suc.contains(principal[0]))
        return std::nullopt;
      return std::vector<Sequent>{};

    case RuleName::InitRel:
      if (!ra) return std::nullopt;
      if (!ant.contains(principal[0]) || !suc.contains(principal[0]))
        return std::nullopt;
      return std::vector<Sequent>{};

    case RuleName::NegL: {
      if (!lf || lf->formula.kind() != FormulaKind::Not || !ant.contains(principal[0]))
        return std::nullopt;
      return one({ant.without(principal[0]),
                  suc.with(lab(lf->label, lf->formula.child()))});
    }
    case RuleName::NegR: {
      if (!lf || lf->formula.kind() != FormulaKind::Not || !suc.contains(principal[0]))
        return std::nullopt;
      return one({ant.with(lab(lf->label, lf->formula.child())),
                  suc.without(principal[0])});
    }
    case RuleName::AndL: {
      if (!lf || lf->formula.kind() != FormulaKind::And || !ant.contains(principal[0]))
        return std::nullopt;
      return one({ant.without(principal[0])
                      .with(lab(lf->label, lf->formula.left()))
                      .with(lab(lf->label, lf->formula.right())),
                  suc});
    }
    case RuleName::AndR: {
      if (!lf || lf->formula.kind() != FormulaKind::And || !suc.contains(principal[0]))
        return std::nullopt;
      const Multiset rest = suc.without(principal[0]);
      return two({ant, rest.with(lab(lf->label, lf->formula.left()))},
                 {ant, rest.with(lab(lf->label, lf->formula.right()))});
    }
    case RuleName::ImpL: {
      if (!lf || lf->formula.kind() != FormulaKind::Implies ||
          !ant.contains(principal[0]))
        return std::nullopt;
      const Multiset rest = ant.without(principal[0]);
      return two({rest, suc.with(lab(lf->label, lf->formula.left()))},
                 {rest.with(lab(lf->label, lf->formula.right())), suc});
    }
    case RuleName::ImpR: {
      if (!lf || lf->formula.kind() != FormulaKind::Implies ||
          !suc.contains(principal[0]))
        return std::nullopt;
      return one({ant.with(lab(lf->label, lf->formula.left())),
                  suc.without(principal[0]).with(lab(lf->label, lf->formula.right()))});
    }

    case RuleName::KL: {
      const auto* r = std::get_if<RelationalAtom>(&principal[1]);
      if (!lf || !r || lf->formula.kind() != FormulaKind::Know) return std::nullopt;
      if (r->agent != lf->formula.agent() || r->from != lf->label) return std::nullopt;
      if (!ant.contains(principal[0]) || !ant.contains(principal[1]))
        return std::nullopt;
      return one({ant.with(lab(r->to, lf->formula.child())), suc});
    }
    case RuleName::KR: {
      if (!lf || lf->formula.kind() != FormulaKind::Know || !suc.contains(principal[0]))
        return std::nullopt;
      if (label_occurs(c, *eigenvariable)) return std::nullopt;
      return one({ant.with(rel(lf->label, lf->formula.agent(), *eigenvariable)),
                  suc.without(principal[0])
                      .with(lab(*eigenvariable, lf->formula.child()))});
    }

    // The closure rules carry a side condition: the introduced atom must not
    // already occur in the antecedent.  Re-deriving a present atom is never
    // needed (all matching is by value), and the condition is what makes
    // relational saturation terminate without bookkeeping.
    case RuleName::Ref: {
      if (!ra || ra->from != ra->to) return std::nullopt;
      if (!label_occurs(c, ra->from) || !agents_of(c).contains(ra->agent))
        return std::nullopt;
      if (ant.contains(principal[0])) return std::nullopt;
      return one({ant.with(principal[0]), suc});
    }
    case RuleName::Sym: {
      if (!ra || !ant.contains(principal[0])) return std::nullopt;
      const SequentExpr flipped = rel(ra->to, ra->agent, ra->from);
      if (ant.contains(flipped)) return std::nullopt;
      return one({ant.with(flipped), suc});
    }
    case RuleName::Trans: {
      const auto* rb = std::get_if<RelationalAtom>(&principal[1]);
      if (!ra || !rb || ra->agent != rb->agent || ra->to != rb->from)
        return std::nullopt;
      if (!ant.contains(principal[0]) || !ant.contains(principal[1]))
        return std::nullopt;
      const SequentExpr composed = rel(ra->from, ra->agent, rb->to);
      if (ant.contains(composed)) return std::nullopt;
      return one({ant.with(composed), suc});
    }

    default:
      break;
  }

  // Reduction rules: principal is x:[phi]psi with psi's shape fixed per rule.
  if (!lf || lf->formula.kind() != FormulaKind::Announce) return std::nullopt;
  const Label& x = lf->label;
  const Formula phi = lf->formula.left();
  const Formula psi = lf->formula.right();
  const bool left_side = rule == RuleName::R1L || rule == RuleName::R2L ||
                         rule == RuleName::R3L || rule == RuleName::R4L ||
                         rule == RuleName::R5L || rule == RuleName::R6L;
  if (left_side ? !ant.contains(principal[0]) : !suc.contains(principal[0]))
    return std::nullopt;

  switch (rule) {
    case RuleName::R1L: {
      if (psi.kind() != FormulaKind::Prop) return std::nullopt;
      const Multiset rest = ant.without(principal[0]);
      return two({rest, suc.with(lab(x, phi))}, {rest.with(lab(x, psi)), suc});
    }
    case RuleName::R1R: {
      if (psi.kind() != FormulaKind::Prop) return std::nullopt;
      return one({ant.with(lab(x, phi)),
                    suc.without(principal[0]).with(lab(x, psi))});
    }
    case RuleName::R2L: {
      if (psi.kind() != FormulaKind::Not) return std::nullopt;
      const Multiset rest = ant.without(principal[0]);
      return two({rest, suc.with(lab(x, phi))},
                 {rest.with(lab(x, neg_announced(phi, psi.child()))), suc});
    }
    case RuleName::R2R: {
      if (psi.kind() != FormulaKind::Not) return std::nullopt;
      return one({ant.with(lab(x, phi)),
                    suc.without(principal[0])
                        .with(lab(x, neg_announced(phi, psi.child())))});
    }
    case RuleName::R3L: {
      if (psi.kind() != FormulaKind::And) return std::nullopt;
      return one({ant.without(principal[0])
                        .with(lab(x, Formula::announcement(phi, psi.left())))
                        .with(lab(x, Formula::announcement(phi, psi.right()))),
                    suc});
    }
    case RuleName::R3R: {
      if (psi.kind() != FormulaKind::And) return std::nullopt;
      const Multiset rest = suc.without(principal[0]);
      return two({ant, rest.with(lab(x, Formula::announcement(phi, psi.left())))},
                 {ant, rest.with(lab(x, Formula::announcement(phi, psi.right())))});
    }
    case RuleName::R4L: {
      if (psi.kind() != FormulaKind::Implies) return std::nullopt;
      const Multiset rest = ant.without(principal[0]);
      return two({rest, suc.with(lab(x, Formula::announcement(phi, psi.left())))},
                 {rest.with(lab(x, Formula::announcement(phi, psi.right()))), suc});
    }
    case RuleName::R4R: {
      if (psi.kind() != FormulaKind::Implies) return std::nullopt;
      return one({ant.with(lab(x, Formula::announcement(phi, psi.left()))),
                    suc.without(principal[0])
                        .with(lab(x, Formula::announcement(phi, psi.right())))});
    }
    case RuleName::R5L: {
      if (psi.kind() != FormulaKind::Know) return std::nullopt;
      const Multiset rest = ant.without(principal[0]);
      return two({rest, suc.with(lab(x, phi))},
                 {rest.with(lab(x, know_announced(psi.agent(), phi, psi.child()))),
                  suc});
    }
    case RuleName::R5R: {
      if (psi.kind() != FormulaKind::Know) return std::nullopt;
      return one({ant.with(lab(x, phi)),
                    suc.without(principal[0])
                        .with(lab(x, know_announced(psi.agent(), phi, psi.child())))});
    }
    case RuleName::R6L: {
      if (psi.kind() != FormulaKind::Announce) return std::nullopt;
      return one({ant.without(principal[0])
                        .with(lab(x, composed_announcement(phi, psi.left(),
                                                           psi.right()))),
                    suc});
    }
    case RuleName::R6R: {
      if (psi.kind() != FormulaKind::Announce) return std::nullopt;
      return one({ant, suc.without(principal[0])
                             .with(lab(x, composed_announcement(phi, psi.left(),
                                                                psi.right())))});
    }
    default:
      return std::nullopt;
  }
}

std::optional<RuleApplication> is_initial(const Sequent& s) {
  const SequentExpr* prev = nullptr;
  for (const auto& e : s.antecedent.items()) {
    if (prev && *prev == e) continue;
    prev = &e;
    const bool atomic =
        std::holds_alternative<RelationalAtom>(e) ||
        std::get<LabelledFormula>(e).formula.kind() == FormulaKind::Prop;
    if (!atomic || !s.succedent.contains(e)) continue;
    const RuleName rule = std::holds_alternative<RelationalAtom>(e)
                              ? RuleName::InitRel
                              : RuleName::InitProp;
    return RuleApplication{rule, s, {e}, {}, std::nullopt};
  }
  return std::nullopt;
}

namespace {

// Calls fn once per distinct value in a sorted multiset.
template <typename Fn>
void for_each_unique(const Multiset& m, Fn fn) {
  const SequentExpr* prev = nullptr;
  for (const auto& e : m.items()) {
    if (prev && *prev == e) continue;
    prev = &e;
    fn(e);
  }
}

}  // namespace

bool for_each_candidate(const Sequent& s, const CandidateFn& fn,
                        const RuleFilter& want) {
  bool stopped = false;
  auto wanted = [&](RuleName rule) { return !want || want(rule); };
  auto emit = [&](RuleName rule, std::vector<SequentExpr> principal,
                  std::optional<Label> eigen = std::nullopt) {
    if (!stopped && fn(rule, std::move(principal), std::move(eigen)))
      stopped = true;
  };

  auto emit1 = [&](RuleName rule, const SequentExpr& e) {
    if (wanted(rule)) emit(rule, {e});
  };

  for_each_unique(s.antecedent, [&](const SequentExpr& e) {
    if (stopped) return;
    if (const auto* r = std::get_if<RelationalAtom>(&e)) {
      if (wanted(RuleName::InitRel) && s.succedent.contains(e))
        emit(RuleName::InitRel, {e});
      // Closure candidates whose atom is already present fail the side
      // condition anyway; filtering here keeps a saturated relational part
      // from flooding the enumeration.
      if (wanted(RuleName::Sym) &&
          !s.antecedent.contains(rel(r->to, r->agent, r->from)))
        emit(RuleName::Sym, {e});
      if (wanted(RuleName::Trans)) {
        for_each_unique(s.antecedent, [&](const SequentExpr& e2) {
          const auto* r2 = std::get_if<RelationalAtom>(&e2);
          if (r2 && r2->agent == r->agent && r2->from == r->to &&
              !s.antecedent.contains(rel(r->from, r->agent, r2->to)))
            emit(RuleName::Trans, {e, e2});
        });
      }
      return;
    }
    const auto& lf = std::get<LabelledFormula>(e);
    switch (lf.formula.kind()) {
      case FormulaKind::Prop:
        if (wanted(RuleName::InitProp) && s.succedent.contains(e))
          emit(RuleName::InitProp, {e});
        break;
      case FormulaKind::Not:
        emit1(RuleName::NegL, e);
        break;
      case FormulaKind::And:
        emit1(RuleName::AndL, e);
        break;
      case FormulaKind::Implies:
        emit1(RuleName::ImpL, e);
        break;
      case FormulaKind::Know:
        if (wanted(RuleName::KL)) {
          for_each_unique(s.antecedent, [&](const SequentExpr& e2) {
            const auto* r2 = std::get_if<RelationalAtom>(&e2);
            if (r2 && r2->agent == lf.formula.agent() && r2->from == lf.label)
              emit(RuleName::KL, {e, e2});
          });
        }
        break;
      case FormulaKind::Announce:
        switch (lf.formula.right().kind()) {
          case FormulaKind::Prop: emit1(RuleName::R1L, e); break;
          case FormulaKind::Not: emit1(RuleName::R2L, e); break;
          case FormulaKind::And: emit1(RuleName::R3L, e); break;
          case FormulaKind::Implies: emit1(RuleName::R4L, e); break;
          case FormulaKind::Know: emit1(RuleName::R5L, e); break;
          case FormulaKind::Announce: emit1(RuleName::R6L, e); break;
        }
        break;
    }
  });
  if (stopped) return true;

  for_each_unique(s.succedent, [&](const SequentExpr& e) {
    if (stopped) return;
    const auto* lf = std::get_if<LabelledFormula>(&e);
    if (!lf) return;
    switch (lf->formula.kind()) {
      case FormulaKind::Prop:
        break;  // covered by the antecedent InitProp scan
      case FormulaKind::Not:
        emit1(RuleName::NegR, e);
        break;
      case FormulaKind::And:
        emit1(RuleName::AndR, e);
        break;
      case FormulaKind::Implies:
        emit1(RuleName::ImpR, e);
        break;
      case FormulaKind::Know:
        if (wanted(RuleName::KR)) emit(RuleName::KR, {e}, fresh_label(s));
        break;
      case FormulaKind::Announce:
        switch (lf->formula.right().kind()) {
          case FormulaKind::Prop: emit1(RuleName::R1R, e); break;
          case FormulaKind::Not: emit1(RuleName::R2R, e); break;
          case FormulaKind::And: emit1(RuleName::R3R, e); break;
          case FormulaKind::Implies: emit1(RuleName::R4R, e); break;
          case FormulaKind::Know: emit1(RuleName::R5R, e); break;
          case FormulaKind::Announce: emit1(RuleName::R6R, e); break;
        }
        break;
    }
  });
  if (stopped) return true;

  if (wanted(RuleName::Ref)) {
    const std::set<Agent> agents = agents_of(s);
    for (const Label& x : labels_of(s)) {
      for (const Agent& a : agents) {
        if (s.antecedent.contains(rel(x, a, x))) continue;  // side condition
        emit(RuleName::Ref, {rel(x, a, x)});
        if (stopped) return true;
      }
    }
  }
  return stopped;
}

std::vector<RuleApplication> applicable(const Sequent& s, const SearchContext& ctx) {
  std::vector<RuleApplication> out;
  for_each_candidate(s, [&](RuleName rule, std::vector<SequentExpr> principal,
                            std::optional<Label> eigen) {
    if (!ctx.permits(rule, principal)) return false;
    auto premises = schema_premises(rule, s, principal, eigen);
    if (premises) {
      out.push_back(RuleApplication{rule, s, std::move(principal),
                                    std::move(*premises), std::move(eigen)});
    }
    return false;
  });
  return out;
}

bool check_step(const RuleApplication& app) {
  auto premises =
      schema_premises(app.rule, app.conclusion, app.principal, app.eigenvariable);
  return premises && *premises == app.premises;
}

}  // namespace gpal
