#include "gpal/formula.hpp"

#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gpal {

struct Formula::Node {
  FormulaKind kind;
  Atom atom;    // Prop
  Agent agent;  // Know
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

Formula Formula::prop(Atom p) {
  return Formula(std::make_shared<const Node>(
      Node{FormulaKind::Prop, std::move(p), Agent(), nullptr, nullptr}));
}

Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const Node>(
      Node{FormulaKind::Not, Atom(), Agent(), std::move(f.node_), nullptr}));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{
      FormulaKind::And, Atom(), Agent(), std::move(lhs.node_), std::move(rhs.node_)}));
}

Formula Formula::implication(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{
      FormulaKind::Implies, Atom(), Agent(), std::move(lhs.node_), std::move(rhs.node_)}));
}

Formula Formula::knows(Agent a, Formula f) {
  return Formula(std::make_shared<const Node>(
      Node{FormulaKind::Know, Atom(), std::move(a), std::move(f.node_), nullptr}));
}

Formula Formula::announcement(Formula announced, Formula then) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Announce, Atom(),
                                                   Agent(), std::move(announced.node_),
                                                   std::move(then.node_)}));
}

FormulaKind Formula::kind() const { return node_->kind; }

const Atom& Formula::atom() const {
  if (node_->kind != FormulaKind::Prop)
    throw std::invalid_argument("atom() requires a propositional formula");
  return node_->atom;
}

const Agent& Formula::agent() const {
  if (node_->kind != FormulaKind::Know)
    throw std::invalid_argument("agent() requires a knowledge formula");
  return node_->agent;
}

Formula Formula::child() const {
  if (node_->kind != FormulaKind::Not && node_->kind != FormulaKind::Know)
    throw std::invalid_argument("child() requires a unary formula");
  return Formula(node_->lhs);
}

Formula Formula::left() const {
  if (!node_->lhs || node_->kind == FormulaKind::Not || node_->kind == FormulaKind::Know)
    throw std::invalid_argument("left() requires a binary formula");
  return Formula(node_->lhs);
}

Formula Formula::right() const {
  if (!node_->rhs) throw std::invalid_argument("right() requires a binary formula");
  return Formula(node_->rhs);
}

namespace {

std::strong_ordering compare(const Formula::Node* a, const Formula::Node* b);

std::strong_ordering compare_children(const Formula::Node* a, const Formula::Node* b) {
  if (auto c = compare(a->lhs.get(), b->lhs.get()); c != 0) return c;
  return compare(a->rhs.get(), b->rhs.get());
}

std::strong_ordering compare(const Formula::Node* a, const Formula::Node* b) {
  if (a == b) return std::strong_ordering::equal;
  if (!a) return std::strong_ordering::less;
  if (!b) return std::strong_ordering::greater;
  if (auto c = a->kind <=> b->kind; c != 0) return c;
  switch (a->kind) {
    case FormulaKind::Prop:
      return a->atom <=> b->atom;
    case FormulaKind::Know:
      if (auto c = a->agent <=> b->agent; c != 0) return c;
      return compare(a->lhs.get(), b->lhs.get());
    default:
      return compare_children(a, b);
  }
}

}  // namespace

bool Formula::operator==(const Formula& other) const {
  return compare(node_.get(), other.node_.get()) == 0;
}

const void* Formula::identity() const { return node_.get(); }

std::strong_ordering Formula::operator<=>(const Formula& other) const {
  return compare(node_.get(), other.node_.get());
}

namespace {

constexpr std::uint64_t kMax = ~std::uint64_t{0};

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kMax - b ? kMax : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kMax / b ? kMax : a * b;
}

}  // namespace

std::uint64_t complexity(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Prop:
      return 1;
    case FormulaKind::Not:
    case FormulaKind::Know:
      return sat_add(1, complexity(f.child()));
    case FormulaKind::And:
    case FormulaKind::Implies:
      return sat_add(1, std::max(complexity(f.left()), complexity(f.right())));
    case FormulaKind::Announce:
      return sat_mul(sat_add(4, complexity(f.left())), complexity(f.right()));
  }
  throw std::logic_error("unreachable");
}

bool is_el(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Prop:
      return true;
    case FormulaKind::Not:
    case FormulaKind::Know:
      return is_el(f.child());
    case FormulaKind::And:
    case FormulaKind::Implies:
      return is_el(f.left()) && is_el(f.right());
    case FormulaKind::Announce:
      return false;
  }
  throw std::logic_error("unreachable");
}

namespace {

// Right-hand side of the translation clause for [phi] psi, one step only.
// Complexity strictly decreases, so recursion through these grounds out.
Formula unfold_announcement(const Formula& phi, const Formula& psi) {
  switch (psi.kind()) {
    case FormulaKind::Prop:
      return Formula::implication(phi, psi);
    case FormulaKind::Not:
      return Formula::implication(
          phi, Formula::negation(Formula::announcement(phi, psi.child())));
    case FormulaKind::And:
      return Formula::conjunction(Formula::announcement(phi, psi.left()),
                                  Formula::announcement(phi, psi.right()));
    case FormulaKind::Implies:
      return Formula::implication(Formula::announcement(phi, psi.left()),
                                  Formula::announcement(phi, psi.right()));
    case FormulaKind::Know:
      return Formula::implication(
          phi, Formula::knows(psi.agent(), Formula::announcement(phi, psi.child())));
    case FormulaKind::Announce:
      return Formula::announcement(
          Formula::conjunction(phi, Formula::announcement(phi, psi.left())),
          psi.right());
  }
  throw std::logic_error("unreachable");
}

// Memoised on node identity: announcement clauses mention phi several times,
// so without the cache the same subterm is retranslated once per mention and
// the output loses all internal sharing (which the rest of the toolkit relies
// on for fast comparison).  The map also owns the key formulas — intermediate
// unfoldings die young, and a recycled node address must not resurrect them.
using TranslateMemo =
    std::unordered_map<const void*, std::pair<Formula, Formula>>;

static Formula translate_rec(const Formula& f, TranslateMemo& memo) {
  if (f.kind() == FormulaKind::Prop) return f;
  if (auto it = memo.find(f.identity()); it != memo.end())
    return it->second.second;
  Formula out = [&] {
    switch (f.kind()) {
      case FormulaKind::Not:
        return Formula::negation(translate_rec(f.child(), memo));
      case FormulaKind::And:
        return Formula::conjunction(translate_rec(f.left(), memo),
                                    translate_rec(f.right(), memo));
      case FormulaKind::Implies:
        return Formula::implication(translate_rec(f.left(), memo),
                                    translate_rec(f.right(), memo));
      case FormulaKind::Know:
        return Formula::knows(f.agent(), translate_rec(f.child(), memo));
      case FormulaKind::Announce:
        return translate_rec(unfold_announcement(f.left(), f.right()), memo);
      default:
        throw std::logic_error("unreachable");
    }
  }();
  memo.emplace(f.identity(), std::make_pair(f, out));
  return out;
}

}  // namespace

Formula translate(const Formula& f) {
  TranslateMemo memo;
  return translate_rec(f, memo);
}

std::set<Formula> semi_subformulas(const Formula& f) {
  std::set<Formula> seen;
  std::vector<Formula> work{f};
  while (!work.empty()) {
    Formula g = work.back();
    work.pop_back();
    if (!seen.insert(g).second) continue;
    switch (g.kind()) {
      case FormulaKind::Prop:
        break;
      case FormulaKind::Not:
      case FormulaKind::Know:
        work.push_back(g.child());
        break;
      case FormulaKind::And:
      case FormulaKind::Implies:
        work.push_back(g.left());
        work.push_back(g.right());
        break;
      case FormulaKind::Announce: {
        work.push_back(g.left());
        work.push_back(g.right());
        // One-step unfolding against the continuation's top connective.
        const Formula phi = g.left();
        const Formula psi = g.right();
        switch (psi.kind()) {
          case FormulaKind::Prop:
            break;
          case FormulaKind::Not:
            work.push_back(Formula::negation(Formula::announcement(phi, psi.child())));
            break;
          case FormulaKind::Know:
            work.push_back(Formula::knows(psi.agent(),
                                          Formula::announcement(phi, psi.child())));
            break;
          case FormulaKind::And:
          case FormulaKind::Implies:
            work.push_back(Formula::announcement(phi, psi.left()));
            work.push_back(Formula::announcement(phi, psi.right()));
            break;
          case FormulaKind::Announce:
            work.push_back(Formula::announcement(
                Formula::conjunction(phi, Formula::announcement(phi, psi.left())),
                psi.right()));
            break;
        }
        break;
      }
    }
  }
  return seen;
}

namespace {

void collect(const Formula& f, std::set<Atom>* atoms, std::set<Agent>* agents) {
  switch (f.kind()) {
    case FormulaKind::Prop:
      if (atoms) atoms->insert(f.atom());
      return;
    case FormulaKind::Know:
      if (agents) agents->insert(f.agent());
      collect(f.child(), atoms, agents);
      return;
    case FormulaKind::Not:
      collect(f.child(), atoms, agents);
      return;
    case FormulaKind::And:
    case FormulaKind::Implies:
    case FormulaKind::Announce:
      collect(f.left(), atoms, agents);
      collect(f.right(), atoms, agents);
      return;
  }
}

}  // namespace

std::set<Atom> atoms_of(const Formula& f) {
  std::set<Atom> out;
  collect(f, &out, nullptr);
  return out;
}

std::set<Agent> agents_of(const Formula& f) {
  std::set<Agent> out;
  collect(f, nullptr, &out);
  return out;
}

}  // namespace gpal
