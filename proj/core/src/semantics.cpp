#include "gpal/semantics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gpal {

namespace {

int find_root(std::map<int, int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::set<WorldPair> equivalence_closure(const std::vector<int>& worlds,
                                        const std::set<WorldPair>& pairs) {
  std::map<int, int> parent;
  for (int w : worlds) parent[w] = w;
  for (const auto& [u, v] : pairs) {
    if (!parent.contains(u) || !parent.contains(v))
      throw std::invalid_argument("equivalence_closure: pair outside world set");
    parent[find_root(parent, u)] = find_root(parent, v);
  }
  std::set<WorldPair> out;
  for (int u : worlds)
    for (int v : worlds)
      if (find_root(parent, u) == find_root(parent, v)) out.insert({u, v});
  return out;
}

KripkeModel::KripkeModel(int num_worlds, std::map<Agent, std::set<WorldPair>> relations,
                         std::map<Atom, std::set<int>> valuation)
    : KripkeModel(
          [num_worlds] {
            std::vector<int> ws(static_cast<std::size_t>(std::max(num_worlds, 0)));
            for (int i = 0; i < num_worlds; ++i) ws[static_cast<std::size_t>(i)] = i;
            return ws;
          }(),
          std::move(relations), std::move(valuation)) {}

KripkeModel::KripkeModel(std::vector<int> worlds,
                         std::map<Agent, std::set<WorldPair>> relations,
                         std::map<Atom, std::set<int>> valuation)
    : worlds_(std::move(worlds)),
      relations_(std::move(relations)),
      valuation_(std::move(valuation)) {
  std::sort(worlds_.begin(), worlds_.end());
  if (worlds_.empty()) throw std::invalid_argument("model needs at least one world");
  if (std::adjacent_find(worlds_.begin(), worlds_.end()) != worlds_.end())
    throw std::invalid_argument("duplicate world id");
  for (const auto& [agent, rel] : relations_) {
    for (const auto& [u, v] : rel) {
      if (!is_world(u) || !is_world(v))
        throw std::invalid_argument("relation for agent '" + agent.name() +
                                    "' mentions an unknown world");
      if (!rel.contains({v, u}))
        throw std::invalid_argument("relation for agent '" + agent.name() +
                                    "' is not symmetric");
    }
    for (int w : worlds_)
      if (!rel.contains({w, w}))
        throw std::invalid_argument("relation for agent '" + agent.name() +
                                    "' is not reflexive");
    for (const auto& [u, v] : rel)
      for (int w : worlds_)
        if (rel.contains({v, w}) && !rel.contains({u, w}))
          throw std::invalid_argument("relation for agent '" + agent.name() +
                                      "' is not transitive");
  }
  for (const auto& [atom, trueset] : valuation_)
    for (int w : trueset)
      if (!is_world(w))
        throw std::invalid_argument("valuation of '" + atom.name() +
                                    "' mentions an unknown world");
}

bool KripkeModel::is_world(int w) const {
  return std::binary_search(worlds_.begin(), worlds_.end(), w);
}

const std::set<WorldPair>& KripkeModel::relation(const Agent& a) const {
  auto it = relations_.find(a);
  if (it == relations_.end())
    throw std::invalid_argument("model has no relation for agent '" + a.name() + "'");
  return it->second;
}

bool KripkeModel::related(const Agent& a, int w, int v) const {
  return relation(a).contains({w, v});
}

bool KripkeModel::value(const Atom& p, int w) const {
  auto it = valuation_.find(p);
  return it != valuation_.end() && it->second.contains(w);
}

bool eval(const KripkeModel& m, int world, const Formula& f) {
  if (!m.is_world(world)) throw std::invalid_argument("eval: world not in model");
  switch (f.kind()) {
    case FormulaKind::Prop:
      return m.value(f.atom(), world);
    case FormulaKind::Not:
      return !eval(m, world, f.child());
    case FormulaKind::And:
      return eval(m, world, f.left()) && eval(m, world, f.right());
    case FormulaKind::Implies:
      return !eval(m, world, f.left()) || eval(m, world, f.right());
    case FormulaKind::Know: {
      const auto& rel = m.relation(f.agent());
      for (const auto& [u, v] : rel)
        if (u == world && !eval(m, v, f.child())) return false;
      return true;
    }
    case FormulaKind::Announce: {
      if (!eval(m, world, f.left())) return true;
      std::optional<KripkeModel> sub = restrict_to(m, f.left());
      return eval(*sub, world, f.right());
    }
  }
  throw std::logic_error("unreachable");
}

std::optional<KripkeModel> restrict_to(const KripkeModel& m, const Formula& phi) {
  std::vector<int> keep;
  for (int w : m.worlds())
    if (eval(m, w, phi)) keep.push_back(w);
  if (keep.empty()) return std::nullopt;
  auto in_keep = [&keep](int w) {
    return std::binary_search(keep.begin(), keep.end(), w);
  };
  std::map<Agent, std::set<WorldPair>> rels;
  for (const auto& [agent, rel] : m.relations()) {
    std::set<WorldPair>& sub = rels[agent];
    for (const auto& [u, v] : rel)
      if (in_keep(u) && in_keep(v)) sub.insert({u, v});
  }
  std::map<Atom, std::set<int>> val;
  for (const auto& [atom, trueset] : m.valuation()) {
    std::set<int>& sub = val[atom];
    for (int w : trueset)
      if (in_keep(w)) sub.insert(w);
  }
  return KripkeModel(std::move(keep), std::move(rels), std::move(val));
}

namespace {

int world_of(const std::map<Label, int>& assignment, const Label& l) {
  auto it = assignment.find(l);
  if (it == assignment.end())
    throw std::invalid_argument("no world assigned to label '" + l.name() + "'");
  return it->second;
}

bool expr_holds(const KripkeModel& m, const std::map<Label, int>& assignment,
                const SequentExpr& e) {
  if (const auto* r = std::get_if<RelationalAtom>(&e))
    return m.related(r->agent, world_of(assignment, r->from),
                     world_of(assignment, r->to));
  const auto& lf = std::get<LabelledFormula>(e);
  return eval(m, world_of(assignment, lf.label), lf.formula);
}

}  // namespace

bool sequent_holds(const KripkeModel& m, const std::map<Label, int>& assignment,
                   const Sequent& s) {
  for (const auto& e : s.antecedent.items())
    if (!expr_holds(m, assignment, e)) return true;
  for (const auto& e : s.succedent.items())
    if (expr_holds(m, assignment, e)) return true;
  return false;
}

namespace {

// Set partitions of {0..n-1} as restricted growth strings, turned into
// equivalence relations.
std::vector<std::set<WorldPair>> partition_relations(int n) {
  std::vector<std::set<WorldPair>> out;
  std::vector<int> block(static_cast<std::size_t>(n), 0);
  auto emit = [&out, &block, n] {
    std::set<WorldPair> rel;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (block[static_cast<std::size_t>(i)] == block[static_cast<std::size_t>(j)])
          rel.insert({i, j});
    out.push_back(std::move(rel));
  };
  std::function<void(int, int)> grow = [&](int i, int max_used) {
    if (i == n) {
      emit();
      return;
    }
    for (int b = 0; b <= max_used + 1; ++b) {
      block[static_cast<std::size_t>(i)] = b;
      grow(i + 1, std::max(max_used, b));
    }
  };
  if (n > 0) grow(1, 0);
  return out;
}

}  // namespace

bool for_each_model(int num_worlds, const std::vector<Agent>& agents,
                    const std::vector<Atom>& atoms,
                    const std::function<bool(const KripkeModel&)>& visit) {
  if (num_worlds < 1) throw std::invalid_argument("num_worlds must be positive");
  const std::vector<std::set<WorldPair>> rels = partition_relations(num_worlds);
  const std::size_t bits = static_cast<std::size_t>(num_worlds) * atoms.size();
  if (bits > 24) throw std::invalid_argument("signature too large to enumerate");

  std::map<Agent, std::set<WorldPair>> chosen;
  std::function<bool(std::size_t)> per_agent = [&](std::size_t ai) -> bool {
    if (ai == agents.size()) {
      for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << bits); ++mask) {
        std::map<Atom, std::set<int>> val;
        std::size_t bit = 0;
        for (const Atom& p : atoms) {
          std::set<int>& trueset = val[p];
          for (int w = 0; w < num_worlds; ++w, ++bit)
            if (mask & (std::uint32_t{1} << bit)) trueset.insert(w);
        }
        if (!visit(KripkeModel(num_worlds, chosen, std::move(val)))) return false;
      }
      return true;
    }
    for (const auto& rel : rels) {
      chosen[agents[ai]] = rel;
      if (!per_agent(ai + 1)) return false;
    }
    return true;
  };
  return per_agent(0);
}

std::vector<KripkeModel> enumerate_models(int num_worlds,
                                          const std::vector<Agent>& agents,
                                          const std::vector<Atom>& atoms) {
  std::vector<KripkeModel> out;
  for_each_model(num_worlds, agents, atoms, [&out](const KripkeModel& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

std::optional<CounterExample> brute_force_check(const Formula& f, int max_worlds) {
  const std::set<Agent> agent_set = agents_of(f);
  const std::set<Atom> atom_set = atoms_of(f);
  const std::vector<Agent> agents(agent_set.begin(), agent_set.end());
  const std::vector<Atom> atoms(atom_set.begin(), atom_set.end());
  std::optional<CounterExample> found;
  for (int n = 1; n <= max_worlds && !found; ++n) {
    for_each_model(n, agents, atoms, [&](const KripkeModel& m) {
      for (int w : m.worlds()) {
        if (!eval(m, w, f)) {
          found = CounterExample{m, w};
          return false;
        }
      }
      return true;
    });
  }
  return found;
}

std::optional<SequentCounterExample> brute_force_check_sequent(const Sequent& s,
                                                               int max_worlds) {
  const std::set<Label> label_set = labels_of(s);
  const std::vector<Label> labels(label_set.begin(), label_set.end());
  const std::set<Agent> agent_set = agents_of(s);
  std::set<Atom> atom_set;
  auto add_atoms = [&atom_set](const Multiset& side) {
    for (const auto& e : side.items())
      if (const auto* lf = std::get_if<LabelledFormula>(&e))
        for (const Atom& p : atoms_of(lf->formula)) atom_set.insert(p);
  };
  add_atoms(s.antecedent);
  add_atoms(s.succedent);
  const std::vector<Agent> agents(agent_set.begin(), agent_set.end());
  const std::vector<Atom> atoms(atom_set.begin(), atom_set.end());

  std::optional<SequentCounterExample> found;
  for (int n = 1; n <= max_worlds && !found; ++n) {
    for_each_model(n, agents, atoms, [&](const KripkeModel& m) {
      std::map<Label, int> assignment;
      std::function<bool(std::size_t)> assign = [&](std::size_t li) -> bool {
        if (li == labels.size()) {
          if (!sequent_holds(m, assignment, s)) {
            found = SequentCounterExample{m, assignment};
            return false;
          }
          return true;
        }
        for (int w : m.worlds()) {
          assignment[labels[li]] = w;
          if (!assign(li + 1)) return false;
        }
        return true;
      };
      return assign(0);
    });
  }
  return found;
}

}  // namespace gpal
