#ifndef GPAL_FORMULA_HPP
#define GPAL_FORMULA_HPP

// Formulas of public announcement logic over a multi-agent epistemic language:
//
//   phi ::= p | ~phi | phi & phi | phi -> phi | K_a phi | [phi] phi
//
// Formula is an immutable handle onto a shared tree node; copies are cheap and
// structural equality / ordering are deep.  All connectives are primitive (no
// desugaring at this level), so syntax-directed algorithms such as the
// reduction translation can match on exactly the shape the user wrote.

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>

namespace gpal {

// Agent names label the knowledge modalities: K_a, K_b, ...
class Agent {
 public:
  Agent() = default;
  explicit Agent(std::string name) : name_(std::move(name)) {}
  const std::string& name() const { return name_; }
  auto operator<=>(const Agent&) const = default;

 private:
  std::string name_;
};

// Propositional atoms.
class Atom {
 public:
  Atom() = default;
  explicit Atom(std::string name) : name_(std::move(name)) {}
  const std::string& name() const { return name_; }
  auto operator<=>(const Atom&) const = default;

 private:
  std::string name_;
};

enum class FormulaKind {
  Prop,      // p
  Not,       // ~phi
  And,       // phi & psi
  Implies,   // phi -> psi
  Know,      // K_a phi
  Announce,  // [phi] psi
};

class Formula {
 public:
  static Formula prop(Atom p);
  static Formula prop(std::string name) { return prop(Atom(std::move(name))); }
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula knows(Agent a, Formula f);
  static Formula announcement(Formula announced, Formula then);

  FormulaKind kind() const;

  // Prop only.
  const Atom& atom() const;
  // Know only.
  const Agent& agent() const;
  // Unary operand (Not, Know); left/right operands (And, Implies, Announce).
  // Announce: left() is the announced formula, right() the continuation.
  Formula child() const;
  Formula left() const;
  Formula right() const;

  bool operator==(const Formula& other) const;
  std::strong_ordering operator<=>(const Formula& other) const;

  // Identity of the underlying shared node.  Equal identities imply equal
  // formulas; the converse holds only where construction shared structure.
  const void* identity() const;

  struct Node;  // opaque; defined in formula.cpp

 private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Announcement-depth-sensitive complexity measure.  Strictly larger than the
// node count, multiplicative in announcements:
//
//   c(p) = 1          c(~phi) = 1 + c(phi)        c(K_a phi) = 1 + c(phi)
//   c(phi & psi) = c(phi -> psi) = 1 + max(c(phi), c(psi))
//   c([phi] psi) = (4 + c(phi)) * c(psi)
//
// Every clause of the reduction translation strictly decreases this measure,
// which is what makes both the translation and the semi-subformula closure
// terminate.  Arithmetic saturates at uint64 max instead of wrapping.
std::uint64_t complexity(const Formula& f);

// True iff f contains no announcement operator.
bool is_el(const Formula& f);

// Reduction translation into the announcement-free fragment.  Homomorphic on
// ~, &, ->, K_a; announcements are pushed through the continuation:
//
//   t([phi] p)           = t(phi -> p)
//   t([phi] ~psi)        = t(phi -> ~[phi] psi)
//   t([phi](psi & chi))  = t([phi] psi & [phi] chi)
//   t([phi](psi -> chi)) = t([phi] psi -> [phi] chi)
//   t([phi] K_a psi)     = t(phi -> K_a [phi] psi)
//   t([phi][psi] chi)    = t([phi & [phi] psi] chi)
//
// The result is equivalent to f in every epistemic model.
Formula translate(const Formula& f);

// Semi-subformulas: the least set containing every subformula of f and closed
// under the one-step unfoldings of an announcement against its continuation
// (the right-hand sides of the translation clauses above, without recursing).
// Every proper member has strictly smaller complexity than f itself; this is
// the space of formulas proof search can ever touch.
std::set<Formula> semi_subformulas(const Formula& f);

std::set<Atom> atoms_of(const Formula& f);
std::set<Agent> agents_of(const Formula& f);

}  // namespace gpal

#endif
