#include "gpal/sequent.hpp"

#include <algorithm>
#include <stdexcept>

namespace gpal {

SequentExpr rel(Label from, Agent agent, Label to) {
  return RelationalAtom{std::move(from), std::move(agent), std::move(to)};
}

SequentExpr lab(Label label, Formula formula) {
  return LabelledFormula{std::move(label), std::move(formula)};
}

Multiset::Multiset(std::initializer_list<SequentExpr> items)
    : items_(items.begin(), items.end()) {
  std::sort(items_.begin(), items_.end());
}

Multiset::Multiset(std::vector<SequentExpr> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
}

bool Multiset::contains(const SequentExpr& e) const {
  return std::binary_search(items_.begin(), items_.end(), e);
}

std::size_t Multiset::count(const SequentExpr& e) const {
  auto [lo, hi] = std::equal_range(items_.begin(), items_.end(), e);
  return static_cast<std::size_t>(hi - lo);
}

Multiset Multiset::with(const SequentExpr& e) const {
  Multiset out = *this;
  out.items_.insert(std::upper_bound(out.items_.begin(), out.items_.end(), e), e);
  return out;
}

Multiset Multiset::without(const SequentExpr& e) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), e);
  if (it == items_.end() || *it != e)
    throw std::invalid_argument("Multiset::without: expression not present");
  Multiset out = *this;
  out.items_.erase(out.items_.begin() + (it - items_.begin()));
  return out;
}

namespace {

void visit_labels(const SequentExpr& e, std::set<Label>& out) {
  if (const auto* r = std::get_if<RelationalAtom>(&e)) {
    out.insert(r->from);
    out.insert(r->to);
  } else {
    out.insert(std::get<LabelledFormula>(e).label);
  }
}

}  // namespace

std::set<Label> labels_of(const Sequent& s) {
  std::set<Label> out;
  for (const auto& e : s.antecedent.items()) visit_labels(e, out);
  for (const auto& e : s.succedent.items()) visit_labels(e, out);
  return out;
}

std::set<Agent> agents_of(const Sequent& s) {
  std::set<Agent> out;
  auto visit = [&out](const SequentExpr& e) {
    if (const auto* r = std::get_if<RelationalAtom>(&e)) {
      out.insert(r->agent);
    } else {
      for (const Agent& a : agents_of(std::get<LabelledFormula>(e).formula))
        out.insert(a);
    }
  };
  for (const auto& e : s.antecedent.items()) visit(e);
  for (const auto& e : s.succedent.items()) visit(e);
  return out;
}

Label fresh_label(const Sequent& s) {
  // Only a label spelled exactly like a candidate ("x" + decimal index, no
  // leading zeros) can collide, so an index bitmap replaces the label set.
  std::vector<bool> taken;
  std::vector<std::size_t> big;  // indices too large for the bitmap
  auto note = [&](const Label& l) {
    const std::string& n = l.name();
    if (n.size() < 2 || n[0] != 'x') return;
    if (n.size() > 2 && n[1] == '0') return;  // leading zero: not canonical
    if (n.size() > 16) return;  // beyond any reachable candidate index
    std::size_t i = 0;
    for (std::size_t k = 1; k < n.size(); ++k) {
      if (n[k] < '0' || n[k] > '9') return;
      i = i * 10 + static_cast<std::size_t>(n[k] - '0');
    }
    if (i < 4096) {
      if (i >= taken.size()) taken.resize(i + 1, false);
      taken[i] = true;
    } else {
      big.push_back(i);
    }
  };
  auto scan = [&note](const Multiset& m) {
    for (const auto& e : m.items()) {
      if (const auto* r = std::get_if<RelationalAtom>(&e)) {
        note(r->from);
        note(r->to);
      } else {
        note(std::get<LabelledFormula>(e).label);
      }
    }
  };
  scan(s.antecedent);
  scan(s.succedent);
  for (std::size_t i = 0;; ++i) {
    const bool small_taken = i < taken.size() && taken[i];
    if (!small_taken && std::find(big.begin(), big.end(), i) == big.end())
      return Label("x" + std::to_string(i));
  }
}

}  // namespace gpal
