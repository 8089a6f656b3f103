#ifndef GPAL_SEQUENT_HPP
#define GPAL_SEQUENT_HPP

// Labelled sequents.  A sequent expression is either a relational atom
// "x ~a y" (worlds x and y are indistinguishable to agent a) or a labelled
// formula "x: phi" (phi holds at world x).  Both sides of a sequent are
// multisets of such expressions; the multiset is kept as a sorted vector so
// that equality, hashing into sets, and saturation checks are cheap.

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gpal/formula.hpp"

namespace gpal {

// World labels x, y, x0, x1, ...
class Label {
 public:
  Label() = default;
  explicit Label(std::string name) : name_(std::move(name)) {}
  const std::string& name() const { return name_; }
  auto operator<=>(const Label&) const = default;

 private:
  std::string name_;
};

struct RelationalAtom {
  Label from;
  Agent agent;
  Label to;
  auto operator<=>(const RelationalAtom&) const = default;
};

struct LabelledFormula {
  Label label;
  Formula formula;
  bool operator==(const LabelledFormula& other) const = default;
  std::strong_ordering operator<=>(const LabelledFormula& other) const {
    if (auto c = label <=> other.label; c != 0) return c;
    return formula <=> other.formula;
  }
};

// Relational atoms sort before labelled formulas, matching the convention of
// writing the relational part of a sequent first.
using SequentExpr = std::variant<RelationalAtom, LabelledFormula>;

SequentExpr rel(Label from, Agent agent, Label to);
SequentExpr lab(Label label, Formula formula);

// Multiset of sequent expressions with canonical (sorted) storage.
class Multiset {
 public:
  Multiset() = default;
  Multiset(std::initializer_list<SequentExpr> items);
  explicit Multiset(std::vector<SequentExpr> items);

  const std::vector<SequentExpr>& items() const { return items_; }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  bool contains(const SequentExpr& e) const;
  std::size_t count(const SequentExpr& e) const;

  Multiset with(const SequentExpr& e) const;
  // Removes one occurrence; throws std::invalid_argument if absent.
  Multiset without(const SequentExpr& e) const;

  auto operator<=>(const Multiset&) const = default;

 private:
  std::vector<SequentExpr> items_;  // sorted
};

struct Sequent {
  Multiset antecedent;
  Multiset succedent;
  auto operator<=>(const Sequent&) const = default;
};

std::set<Label> labels_of(const Sequent& s);
std::set<Agent> agents_of(const Sequent& s);

// Smallest label of the form x0, x1, ... not occurring in s.
Label fresh_label(const Sequent& s);

}  // namespace gpal

#endif
