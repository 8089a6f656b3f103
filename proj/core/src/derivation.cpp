#include "gpal/derivation.hpp"

#include "json.hpp"

#include <stdexcept>
#include <utility>

#include "gpal/syntax.hpp"

namespace gpal {

namespace {

using nlohmann::json;

}  // namespace

bool Derivation::operator==(const Derivation& other) const {
  return justification.rule == other.justification.rule &&
         justification.conclusion == other.justification.conclusion &&
         justification.eigenvariable == other.justification.eigenvariable &&
         justification.premises == other.justification.premises &&
         children == other.children;
}

bool check_derivation(const Derivation& d) {
  if (!check_step(d.justification)) return false;
  if (d.children.size() != d.justification.premises.size()) return false;
  for (std::size_t i = 0; i < d.children.size(); ++i) {
    if (!(d.children[i].root() == d.justification.premises[i])) return false;
    if (!check_derivation(d.children[i])) return false;
  }
  return true;
}

int height(const Derivation& d) {
  int best = 0;
  for (const auto& c : d.children) best = std::max(best, height(c));
  return 1 + best;
}

namespace {

// Applies `rule` to `c` and builds each premise's subderivation with `next`;
// the schema is the single source of truth for the premise sequents.
template <typename Next>
Derivation ident_apply(RuleName rule, const Sequent& c,
                       std::vector<SequentExpr> principal,
                       std::optional<Label> eigen, Next next) {
  auto premises = schema_premises(rule, c, principal, eigen);
  if (!premises)
    throw std::logic_error("identity_derivation: schema rejected a step");
  std::vector<Derivation> children;
  children.reserve(premises->size());
  for (std::size_t i = 0; i < premises->size(); ++i)
    children.push_back(next(i, (*premises)[i]));
  return Derivation{RuleApplication{rule, c, std::move(principal),
                                    std::move(*premises), std::move(eigen)},
                    std::move(children)};
}

}  // namespace

Derivation identity_derivation(const Sequent& s, const Label& x,
                               const Formula& phi) {
  const SequentExpr pr = lab(x, phi);
  if (!s.antecedent.contains(pr) || !s.succedent.contains(pr))
    throw std::invalid_argument(
        "identity_derivation: formula does not occur on both sides");

  // Each case peels phi on the right, then on the left, leaving identity
  // goals on strictly smaller formulas (by the complexity measure).
  auto no_children = [](std::size_t, const Sequent&) -> Derivation {
    throw std::logic_error("identity_derivation: initial rule has no premise");
  };
  auto ident = [&](const Label& y, const Formula& g) {
    return [&, y, g](std::size_t, const Sequent& q) {
      return identity_derivation(q, y, g);
    };
  };

  switch (phi.kind()) {
    case FormulaKind::Prop:
      return ident_apply(RuleName::InitProp, s, {pr}, std::nullopt,
                         no_children);
    case FormulaKind::Not:
      return ident_apply(RuleName::NegR, s, {pr}, std::nullopt,
                         [&](std::size_t, const Sequent& p) {
                           return ident_apply(RuleName::NegL, p, {pr},
                                              std::nullopt,
                                              ident(x, phi.child()));
                         });
    case FormulaKind::And:
      return ident_apply(
          RuleName::AndR, s, {pr}, std::nullopt,
          [&](std::size_t i, const Sequent& p) {
            return ident_apply(RuleName::AndL, p, {pr}, std::nullopt,
                               ident(x, i == 0 ? phi.left() : phi.right()));
          });
    case FormulaKind::Implies:
      return ident_apply(
          RuleName::ImpR, s, {pr}, std::nullopt,
          [&](std::size_t, const Sequent& p) {
            return ident_apply(
                RuleName::ImpL, p, {pr}, std::nullopt,
                [&](std::size_t i, const Sequent& q) {
                  return identity_derivation(
                      q, x, i == 0 ? phi.left() : phi.right());
                });
          });
    case FormulaKind::Know: {
      const Label y = fresh_label(s);
      return ident_apply(
          RuleName::KR, s, {pr}, y,
          [&](std::size_t, const Sequent& p) {
            return ident_apply(RuleName::KL, p,
                               {pr, rel(x, phi.agent(), y)}, std::nullopt,
                               ident(y, phi.child()));
          });
    }
    case FormulaKind::Announce:
      break;
  }

  // Announcements: the right reduction rule first, then its left twin; the
  // recursion closes on the rule's active formulas.
  const Formula psi = phi.left();
  const Formula chi = phi.right();
  switch (chi.kind()) {
    case FormulaKind::Prop:
      return ident_apply(
          RuleName::R1R, s, {pr}, std::nullopt,
          [&](std::size_t, const Sequent& p) {
            return ident_apply(
                RuleName::R1L, p, {pr}, std::nullopt,
                [&](std::size_t i, const Sequent& q) {
                  return identity_derivation(q, x, i == 0 ? psi : chi);
                });
          });
    case FormulaKind::Not: {
      const Formula active =
          Formula::negation(Formula::announcement(psi, chi.child()));
      return ident_apply(
          RuleName::R2R, s, {pr}, std::nullopt,
          [&](std::size_t, const Sequent& p) {
            return ident_apply(
                RuleName::R2L, p, {pr}, std::nullopt,
                [&](std::size_t i, const Sequent& q) {
                  return identity_derivation(q, x, i == 0 ? psi : active);
                });
          });
    }
    case FormulaKind::And:
      return ident_apply(
          RuleName::R3R, s, {pr}, std::nullopt,
          [&](std::size_t i, const Sequent& p) {
            const Formula sub = Formula::announcement(
                psi, i == 0 ? chi.left() : chi.right());
            return ident_apply(RuleName::R3L, p, {pr}, std::nullopt,
                               ident(x, sub));
          });
    case FormulaKind::Implies:
      return ident_apply(
          RuleName::R4R, s, {pr}, std::nullopt,
          [&](std::size_t, const Sequent& p) {
            return ident_apply(
                RuleName::R4L, p, {pr}, std::nullopt,
                [&](std::size_t i, const Sequent& q) {
                  return identity_derivation(
                      q, x,
                      Formula::announcement(
                          psi, i == 0 ? chi.left() : chi.right()));
                });
          });
    case FormulaKind::Know: {
      const Formula active =
          Formula::knows(chi.agent(), Formula::announcement(psi, chi.child()));
      return ident_apply(
          RuleName::R5R, s, {pr}, std::nullopt,
          [&](std::size_t, const Sequent& p) {
            return ident_apply(
                RuleName::R5L, p, {pr}, std::nullopt,
                [&](std::size_t i, const Sequent& q) {
                  return identity_derivation(q, x, i == 0 ? psi : active);
                });
          });
    }
    case FormulaKind::Announce: {
      const Formula composed = Formula::announcement(
          Formula::conjunction(psi, Formula::announcement(psi, chi.left())),
          chi.right());
      return ident_apply(
          RuleName::R6R, s, {pr}, std::nullopt,
          [&](std::size_t, const Sequent& p) {
            return ident_apply(RuleName::R6L, p, {pr}, std::nullopt,
                               ident(x, composed));
          });
    }
  }
  throw std::logic_error("unreachable");
}

Multiset translate_multiset(const Multiset& m) {
  std::vector<SequentExpr> out;
  out.reserve(m.size());
  for (const auto& e : m.items()) {
    if (const auto* lf = std::get_if<LabelledFormula>(&e)) {
      out.push_back(lab(lf->label, translate(lf->formula)));
    } else {
      out.push_back(e);
    }
  }
  return Multiset{std::move(out)};
}

Sequent translate_sequent(const Sequent& s) {
  return Sequent{translate_multiset(s.antecedent), translate_multiset(s.succedent)};
}

namespace {

SequentExpr translate_expr(const SequentExpr& e) {
  if (const auto* lf = std::get_if<LabelledFormula>(&e)) {
    return lab(lf->label, translate(lf->formula));
  }
  return e;
}

// Builds a node and re-derives its premises from the schema, insisting they
// match the supplied children.  Transforms go through this so a bug surfaces
// as a logic_error instead of an invalid tree.
Derivation make_node(RuleName rule, Sequent conclusion,
                     std::vector<SequentExpr> principal,
                     std::optional<Label> eigen,
                     std::vector<Derivation> children) {
  auto premises = schema_premises(rule, conclusion, principal, eigen);
  if (!premises || premises->size() != children.size()) {
    throw std::logic_error("derivation transform produced a malformed step");
  }
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (!((*premises)[i] == children[i].root())) {
      throw std::logic_error("derivation transform premise mismatch");
    }
  }
  RuleApplication app{rule, std::move(conclusion), std::move(principal),
                      std::move(*premises), std::move(eigen)};
  return Derivation{std::move(app), std::move(children)};
}

RuleName lowered_rule(RuleName r) {
  switch (r) {
    case RuleName::R1L:
    case RuleName::R2L:
    case RuleName::R4L:
    case RuleName::R5L:
      return RuleName::ImpL;
    case RuleName::R1R:
    case RuleName::R2R:
    case RuleName::R4R:
    case RuleName::R5R:
      return RuleName::ImpR;
    case RuleName::R3L:
      return RuleName::AndL;
    case RuleName::R3R:
      return RuleName::AndR;
    default:
      return r;
  }
}

Derivation lower_node(const Derivation& d) {
  const RuleApplication& j = d.justification;
  // Both premise and conclusion of a composition step have the same
  // translation, so the step disappears.
  if (j.rule == RuleName::R6L || j.rule == RuleName::R6R) {
    return lower_node(d.children[0]);
  }
  std::vector<Derivation> children;
  children.reserve(d.children.size());
  for (const auto& c : d.children) children.push_back(lower_node(c));
  std::vector<SequentExpr> principal;
  principal.reserve(j.principal.size());
  for (const auto& e : j.principal) principal.push_back(translate_expr(e));
  return make_node(lowered_rule(j.rule), translate_sequent(j.conclusion),
                   std::move(principal), j.eigenvariable, std::move(children));
}

}  // namespace

Derivation lower_to_el(const Derivation& d) {
  if (!check_derivation(d)) {
    throw std::invalid_argument("lower_to_el: input derivation is invalid");
  }
  return lower_node(d);
}

namespace {

Sequent replace_occurrence(const Sequent& s, bool in_antecedent,
                           const SequentExpr& from, const SequentExpr& to) {
  if (in_antecedent) {
    return Sequent{s.antecedent.without(from).with(to), s.succedent};
  }
  return Sequent{s.antecedent, s.succedent.without(from).with(to)};
}

// The rule that decomposes an announcement-free compound g on the given side.
RuleName el_rule_for(const Formula& g, bool antecedent) {
  switch (g.kind()) {
    case FormulaKind::Not:
      return antecedent ? RuleName::NegL : RuleName::NegR;
    case FormulaKind::And:
      return antecedent ? RuleName::AndL : RuleName::AndR;
    case FormulaKind::Implies:
      return antecedent ? RuleName::ImpL : RuleName::ImpR;
    case FormulaKind::Know:
      return antecedent ? RuleName::KL : RuleName::KR;
    default:
      throw std::logic_error("el_rule_for: atomic or announced formula");
  }
}

// Rewrites one occurrence of x : t(phi) on the given side back into x : phi,
// throughout the derivation.  Recursion is on (complexity(phi), height(d))
// lexicographically: the not-principal and Know cases shrink the height at
// fixed phi, every other case moves to a strictly simpler formula.
Derivation lift_occurrence(const Derivation& d, bool ant, const Label& x,
                           const Formula& phi) {
  const Formula tphi = translate(phi);
  if (tphi == phi) return d;
  const SequentExpr occ = lab(x, tphi);
  const SequentExpr target = lab(x, phi);
  const RuleApplication& j = d.justification;

  const Multiset& side = ant ? d.root().antecedent : d.root().succedent;
  if (!side.contains(occ)) {
    throw std::logic_error("lift: tracked occurrence vanished");
  }

  // t(phi) is compound, so an initial sequent stays initial when the
  // occurrence is rewritten: the shared atomic pair is untouched.
  if (d.children.empty()) {
    Sequent c2 = replace_occurrence(d.root(), ant, occ, target);
    auto init = is_initial(c2);
    if (!init) throw std::logic_error("lift: leaf lost initiality");
    return Derivation{*init, {}};
  }

  const bool principal_here = !j.principal.empty() && j.principal[0] == occ &&
                              j.rule == el_rule_for(tphi, ant);

  if (!principal_here) {
    // Context occurrences persist into every premise, so rewrite them all.
    std::vector<Derivation> children;
    children.reserve(d.children.size());
    for (const auto& c : d.children) {
      children.push_back(lift_occurrence(c, ant, x, phi));
    }
    Sequent c2 = replace_occurrence(d.root(), ant, occ, target);
    return make_node(j.rule, std::move(c2), j.principal, j.eigenvariable,
                     std::move(children));
  }

  Sequent c2 = replace_occurrence(d.root(), ant, occ, target);

  switch (phi.kind()) {
    case FormulaKind::Not: {
      Derivation child = lift_occurrence(d.children[0], !ant, x, phi.child());
      return make_node(ant ? RuleName::NegL : RuleName::NegR, std::move(c2),
                       {target}, std::nullopt, {std::move(child)});
    }
    case FormulaKind::And: {
      if (ant) {
        Derivation child = lift_occurrence(d.children[0], true, x, phi.left());
        child = lift_occurrence(child, true, x, phi.right());
        return make_node(RuleName::AndL, std::move(c2), {target}, std::nullopt,
                         {std::move(child)});
      }
      Derivation l = lift_occurrence(d.children[0], false, x, phi.left());
      Derivation r = lift_occurrence(d.children[1], false, x, phi.right());
      return make_node(RuleName::AndR, std::move(c2), {target}, std::nullopt,
                       {std::move(l), std::move(r)});
    }
    case FormulaKind::Implies: {
      if (ant) {
        Derivation l = lift_occurrence(d.children[0], false, x, phi.left());
        Derivation r = lift_occurrence(d.children[1], true, x, phi.right());
        return make_node(RuleName::ImpL, std::move(c2), {target}, std::nullopt,
                         {std::move(l), std::move(r)});
      }
      Derivation child = lift_occurrence(d.children[0], true, x, phi.left());
      child = lift_occurrence(child, false, x, phi.right());
      return make_node(RuleName::ImpR, std::move(c2), {target}, std::nullopt,
                       {std::move(child)});
    }
    case FormulaKind::Know: {
      if (ant) {
        // The premise keeps x : K_a t(psi) and adds y : t(psi).  Rewrite the
        // kept copy first (same formula, smaller derivation), then the fresh
        // y occurrence, and close with KL.
        const auto& rel = std::get<RelationalAtom>(j.principal[1]);
        Derivation child = lift_occurrence(d.children[0], true, x, phi);
        child = lift_occurrence(child, true, rel.to, phi.child());
        return make_node(RuleName::KL, std::move(c2), {target, j.principal[1]},
                         std::nullopt, {std::move(child)});
      }
      const Label& y = *j.eigenvariable;
      Derivation child = lift_occurrence(d.children[0], false, y, phi.child());
      return make_node(RuleName::KR, std::move(c2), {target}, j.eigenvariable,
                       {std::move(child)});
    }
    case FormulaKind::Announce: {
      const Formula chi = phi.left();
      const Formula rho = phi.right();
      switch (rho.kind()) {
        case FormulaKind::Prop: {
          if (ant) {
            Derivation l = lift_occurrence(d.children[0], false, x, chi);
            return make_node(RuleName::R1L, std::move(c2), {target},
                             std::nullopt, {std::move(l), d.children[1]});
          }
          Derivation child = lift_occurrence(d.children[0], true, x, chi);
          return make_node(RuleName::R1R, std::move(c2), {target},
                           std::nullopt, {std::move(child)});
        }
        case FormulaKind::Not: {
          const Formula inner =
              Formula::negation(Formula::announcement(chi, rho.child()));
          if (ant) {
            Derivation l = lift_occurrence(d.children[0], false, x, chi);
            Derivation r = lift_occurrence(d.children[1], true, x, inner);
            return make_node(RuleName::R2L, std::move(c2), {target},
                             std::nullopt, {std::move(l), std::move(r)});
          }
          Derivation child = lift_occurrence(d.children[0], true, x, chi);
          child = lift_occurrence(child, false, x, inner);
          return make_node(RuleName::R2R, std::move(c2), {target},
                           std::nullopt, {std::move(child)});
        }
        case FormulaKind::And: {
          const Formula p1 = Formula::announcement(chi, rho.left());
          const Formula p2 = Formula::announcement(chi, rho.right());
          if (ant) {
            Derivation child = lift_occurrence(d.children[0], true, x, p1);
            child = lift_occurrence(child, true, x, p2);
            return make_node(RuleName::R3L, std::move(c2), {target},
                             std::nullopt, {std::move(child)});
          }
          Derivation l = lift_occurrence(d.children[0], false, x, p1);
          Derivation r = lift_occurrence(d.children[1], false, x, p2);
          return make_node(RuleName::R3R, std::move(c2), {target},
                           std::nullopt, {std::move(l), std::move(r)});
        }
        case FormulaKind::Implies: {
          const Formula p1 = Formula::announcement(chi, rho.left());
          const Formula p2 = Formula::announcement(chi, rho.right());
          if (ant) {
            Derivation l = lift_occurrence(d.children[0], false, x, p1);
            Derivation r = lift_occurrence(d.children[1], true, x, p2);
            return make_node(RuleName::R4L, std::move(c2), {target},
                             std::nullopt, {std::move(l), std::move(r)});
          }
          Derivation child = lift_occurrence(d.children[0], true, x, p1);
          child = lift_occurrence(child, false, x, p2);
          return make_node(RuleName::R4R, std::move(c2), {target},
                           std::nullopt, {std::move(child)});
        }
        case FormulaKind::Know: {
          const Formula inner = Formula::knows(
              rho.agent(), Formula::announcement(chi, rho.child()));
          if (ant) {
            Derivation l = lift_occurrence(d.children[0], false, x, chi);
            Derivation r = lift_occurrence(d.children[1], true, x, inner);
            return make_node(RuleName::R5L, std::move(c2), {target},
                             std::nullopt, {std::move(l), std::move(r)});
          }
          Derivation child = lift_occurrence(d.children[0], true, x, chi);
          child = lift_occurrence(child, false, x, inner);
          return make_node(RuleName::R5R, std::move(c2), {target},
                           std::nullopt, {std::move(child)});
        }
        case FormulaKind::Announce: {
          // t([chi][psi]rho') = t of the composed announcement, so first lift
          // to the composed form (strictly smaller complexity), then add the
          // composition step.
          const Formula composed = Formula::announcement(
              Formula::conjunction(chi,
                                   Formula::announcement(chi, rho.left())),
              rho.right());
          Derivation inner = lift_occurrence(d, ant, x, composed);
          Sequent c3 = replace_occurrence(inner.root(), ant,
                                          lab(x, composed), target);
          return make_node(ant ? RuleName::R6L : RuleName::R6R, std::move(c3),
                           {target}, std::nullopt, {std::move(inner)});
        }
      }
      throw std::logic_error("lift: unreachable announcement shape");
    }
    case FormulaKind::Prop:
      break;  // unreachable: t(p) = p was filtered above
  }
  throw std::logic_error("lift: unreachable formula shape");
}

}  // namespace

Derivation lift_to_pal(const Derivation& d, const Sequent& target) {
  if (!check_derivation(d)) {
    throw std::invalid_argument("lift_to_pal: input derivation is invalid");
  }
  if (!(d.root() == translate_sequent(target))) {
    throw std::invalid_argument(
        "lift_to_pal: derivation does not end in the target's translation");
  }
  Derivation out = d;
  for (const auto& e : target.antecedent.items()) {
    if (const auto* lf = std::get_if<LabelledFormula>(&e)) {
      out = lift_occurrence(out, true, lf->label, lf->formula);
    }
  }
  for (const auto& e : target.succedent.items()) {
    if (const auto* lf = std::get_if<LabelledFormula>(&e)) {
      out = lift_occurrence(out, false, lf->label, lf->formula);
    }
  }
  if (!(out.root() == target)) {
    throw std::logic_error("lift_to_pal: lifted root differs from target");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

namespace {

void text_lines(const Derivation& d, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += render_sequent(d.root());
  out += "   [";
  out += to_string(d.justification.rule);
  if (d.justification.eigenvariable) {
    out += ' ';
    out += d.justification.eigenvariable->name();
  }
  out += "]\n";
  for (const auto& c : d.children) text_lines(c, depth + 1, out);
}

std::string latex_escape_name(const std::string& name) {
  std::string out;
  for (char ch : name) {
    if (ch == '_') out += "\\_";
    else out += ch;
  }
  return out;
}

// Same precedence scheme as render_formula; only the operator glyphs differ.
std::string latex_formula(const Formula& f, int min_prec) {
  constexpr int kImp = 1, kAnd = 2, kUnary = 3;
  int prec = kUnary;
  switch (f.kind()) {
    case FormulaKind::And: prec = kAnd; break;
    case FormulaKind::Implies: prec = kImp; break;
    default: break;
  }
  std::string body;
  switch (f.kind()) {
    case FormulaKind::Prop:
      body = "\\mathit{" + latex_escape_name(f.atom().name()) + "}";
      break;
    case FormulaKind::Not:
      body = "\\lnot " + latex_formula(f.child(), kUnary);
      break;
    case FormulaKind::And:
      body = latex_formula(f.left(), kAnd) + " \\land " +
             latex_formula(f.right(), kAnd + 1);
      break;
    case FormulaKind::Implies:
      body = latex_formula(f.left(), kImp + 1) + " \\to " +
             latex_formula(f.right(), kImp);
      break;
    case FormulaKind::Know:
      body = "K_{" + latex_escape_name(f.agent().name()) + "} " +
             latex_formula(f.child(), kUnary);
      break;
    case FormulaKind::Announce:
      body = "[" + latex_formula(f.left(), kImp) + "]" +
             latex_formula(f.right(), kUnary);
      break;
  }
  if (prec < min_prec) return "(" + body + ")";
  return body;
}

std::string latex_expr(const SequentExpr& e) {
  if (const auto* r = std::get_if<RelationalAtom>(&e)) {
    return "\\mathit{" + latex_escape_name(r->from.name()) + "} \\sim_{" +
           latex_escape_name(r->agent.name()) + "} \\mathit{" +
           latex_escape_name(r->to.name()) + "}";
  }
  const auto& lf = std::get<LabelledFormula>(e);
  return "\\mathit{" + latex_escape_name(lf.label.name()) + "}\\colon " +
         latex_formula(lf.formula, 1);
}

std::string latex_sequent(const Sequent& s) {
  std::string out;
  bool first = true;
  for (const auto& e : s.antecedent.items()) {
    if (!first) out += ", ";
    first = false;
    out += latex_expr(e);
  }
  out += first ? "\\Rightarrow " : " \\Rightarrow ";
  first = true;
  for (const auto& e : s.succedent.items()) {
    if (!first) out += ", ";
    first = false;
    out += latex_expr(e);
  }
  return out;
}

void latex_nodes(const Derivation& d, std::string& out) {
  for (const auto& c : d.children) latex_nodes(c, out);
  if (d.children.empty()) {
    out += "\\AxiomC{$" + latex_sequent(d.root()) + "$}\n";
    return;
  }
  out += "\\RightLabel{\\footnotesize $\\mathsf{";
  out += to_string(d.justification.rule);
  out += "}$}\n";
  const char* inf = d.children.size() == 1 ? "\\UnaryInfC{$" : "\\BinaryInfC{$";
  out += inf;
  out += latex_sequent(d.root());
  out += "$}\n";
}

json expr_to_json(const SequentExpr& e) {
  if (const auto* r = std::get_if<RelationalAtom>(&e)) {
    return json{{"rel", {r->from.name(), r->agent.name(), r->to.name()}}};
  }
  const auto& lf = std::get<LabelledFormula>(e);
  return json{{"lab", {lf.label.name(), render_formula(lf.formula)}}};
}

json derivation_to_json(const Derivation& d) {
  json ant = json::array();
  for (const auto& e : d.root().antecedent.items()) ant.push_back(expr_to_json(e));
  json suc = json::array();
  for (const auto& e : d.root().succedent.items()) suc.push_back(expr_to_json(e));
  json children = json::array();
  for (const auto& c : d.children) children.push_back(derivation_to_json(c));
  json eigen;
  if (d.justification.eigenvariable) {
    eigen = d.justification.eigenvariable->name();
  }
  return json{{"seq", {{"ant", std::move(ant)}, {"suc", std::move(suc)}}},
              {"rule", to_string(d.justification.rule)},
              {"eigen", std::move(eigen)},
              {"children", std::move(children)}};
}

}  // namespace

std::string export_derivation(const Derivation& d, ExportFormat format) {
  switch (format) {
    case ExportFormat::Text: {
      std::string out;
      text_lines(d, 0, out);
      return out;
    }
    case ExportFormat::Latex: {
      std::string out =
          "\\documentclass{standalone}\n"
          "\\usepackage{bussproofs}\n"
          "\\begin{document}\n"
          "\\begin{prooftree}\n";
      latex_nodes(d, out);
      out += "\\end{prooftree}\n\\end{document}\n";
      return out;
    }
    case ExportFormat::Json:
      return derivation_to_json(d).dump(2) + "\n";
  }
  throw std::invalid_argument("export_derivation: unknown format");
}

// ---------------------------------------------------------------------------
// Import

namespace {

[[noreturn]] void fail(const std::string& message, const std::string& path) {
  throw ImportError(message, path);
}

SequentExpr expr_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) {
    fail("expected an object with a single \"rel\" or \"lab\" key", path);
  }
  if (auto it = j.find("rel"); it != j.end()) {
    const json& arr = *it;
    if (!arr.is_array() || arr.size() != 3 || !arr[0].is_string() ||
        !arr[1].is_string() || !arr[2].is_string()) {
      fail("\"rel\" must be an array of three strings", path);
    }
    return rel(Label{arr[0].get<std::string>()},
               Agent{arr[1].get<std::string>()},
               Label{arr[2].get<std::string>()});
  }
  if (auto it = j.find("lab"); it != j.end()) {
    const json& arr = *it;
    if (!arr.is_array() || arr.size() != 2 || !arr[0].is_string() ||
        !arr[1].is_string()) {
      fail("\"lab\" must be an array [label, formula]", path);
    }
    try {
      return lab(Label{arr[0].get<std::string>()},
                 parse_formula(arr[1].get<std::string>()));
    } catch (const ParseError& e) {
      fail(e.what(), path);
    }
  }
  fail("expected a \"rel\" or \"lab\" key", path);
}

Multiset multiset_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) fail("expected an array of sequent expressions", path);
  std::vector<SequentExpr> items;
  items.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    items.push_back(expr_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return Multiset{std::move(items)};
}

// Recovers a principal list consistent with the recorded premises.  The json
// format does not store principals, so we try candidates in the same order
// applicable() enumerates them and keep the first whose schema instance
// reproduces the premises exactly.
std::optional<std::vector<SequentExpr>> infer_principal(
    RuleName rule, const Sequent& c, const std::optional<Label>& eigen,
    const std::vector<Sequent>& premises) {
  auto matches = [&](std::vector<SequentExpr> cand)
      -> std::optional<std::vector<SequentExpr>> {
    auto got = schema_premises(rule, c, cand, eigen);
    if (got && *got == premises) return cand;
    return std::nullopt;
  };
  auto each_unique = [](const Multiset& m, auto&& fn) {
    const auto& items = m.items();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0 && items[i] == items[i - 1]) continue;
      if (auto r = fn(items[i])) return r;
    }
    return std::optional<std::vector<SequentExpr>>{};
  };

  switch (rule) {
    case RuleName::Ref: {
      for (const auto& x : labels_of(c)) {
        for (const auto& a : agents_of(c)) {
          if (auto r = matches({rel(x, a, x)})) return r;
        }
      }
      return std::nullopt;
    }
    case RuleName::KL: {
      return each_unique(c.antecedent, [&](const SequentExpr& e) {
        return each_unique(c.antecedent, [&](const SequentExpr& r) {
          return matches({e, r});
        });
      });
    }
    case RuleName::Trans: {
      return each_unique(c.antecedent, [&](const SequentExpr& a) {
        return each_unique(c.antecedent, [&](const SequentExpr& b) {
          return matches({a, b});
        });
      });
    }
    default: {
      if (auto r = each_unique(c.antecedent, [&](const SequentExpr& e) {
            return matches({e});
          })) {
        return r;
      }
      return each_unique(c.succedent, [&](const SequentExpr& e) {
        return matches({e});
      });
    }
  }
}

Derivation derivation_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail("expected an object", path);
  auto seq_it = j.find("seq");
  if (seq_it == j.end() || !seq_it->is_object()) {
    fail("missing \"seq\" object", path);
  }
  auto ant_it = seq_it->find("ant");
  auto suc_it = seq_it->find("suc");
  if (ant_it == seq_it->end() || suc_it == seq_it->end()) {
    fail("\"seq\" needs \"ant\" and \"suc\" arrays", path + ".seq");
  }
  Sequent conclusion{multiset_from_json(*ant_it, path + ".seq.ant"),
                     multiset_from_json(*suc_it, path + ".seq.suc")};

  auto rule_it = j.find("rule");
  if (rule_it == j.end() || !rule_it->is_string()) {
    fail("missing \"rule\" string", path);
  }
  auto rule = rule_from_string(rule_it->get<std::string>());
  if (!rule) {
    fail("unknown rule name \"" + rule_it->get<std::string>() + "\"",
         path + ".rule");
  }

  std::optional<Label> eigen;
  if (auto it = j.find("eigen"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) fail("\"eigen\" must be a string or null", path);
    eigen = Label{it->get<std::string>()};
  }

  std::vector<Derivation> children;
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_array()) fail("\"children\" must be an array", path);
    children.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      children.push_back(derivation_from_json(
          (*it)[i], path + ".children[" + std::to_string(i) + "]"));
    }
  }

  std::vector<Sequent> premises;
  premises.reserve(children.size());
  for (const auto& c : children) premises.push_back(c.root());

  // An un-inferable principal means the step is not a schema instance; keep
  // the node anyway so check_derivation can report it as invalid.
  auto principal = infer_principal(*rule, conclusion, eigen, premises);
  RuleApplication app{*rule, std::move(conclusion),
                      principal.value_or(std::vector<SequentExpr>{}),
                      std::move(premises), std::move(eigen)};
  return Derivation{std::move(app), std::move(children)};
}

}  // namespace

Derivation import_derivation(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ImportError(e.what(), "$");
  }
  return derivation_from_json(doc, "$");
}

}  // namespace gpal
