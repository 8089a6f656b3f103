#ifndef GPAL_SEMANTICS_HPP
#define GPAL_SEMANTICS_HPP

// Kripke semantics over equivalence frames.  A model carries a finite set of
// world ids, one equivalence relation per agent, and a valuation; evaluating
// an announcement [phi]psi restricts the model to the worlds satisfying phi
// (world ids are stable under restriction, nothing is renumbered).
//
// This module is deliberately independent of the proof machinery: it is the
// oracle that search results, the reduction translation, and extracted
// countermodels are judged against.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "gpal/formula.hpp"
#include "gpal/sequent.hpp"

namespace gpal {

using WorldPair = std::pair<int, int>;

// Reflexive-symmetric-transitive closure of `pairs` over `worlds`.
std::set<WorldPair> equivalence_closure(const std::vector<int>& worlds,
                                        const std::set<WorldPair>& pairs);

class KripkeModel {
 public:
  // Worlds 0..num_worlds-1.
  KripkeModel(int num_worlds, std::map<Agent, std::set<WorldPair>> relations,
              std::map<Atom, std::set<int>> valuation);
  // Explicit world set (ids need not be contiguous).  The world set must be
  // nonempty, every relation must be an equivalence relation on it, and the
  // valuation must only mention its members; throws std::invalid_argument
  // otherwise.
  KripkeModel(std::vector<int> worlds, std::map<Agent, std::set<WorldPair>> relations,
              std::map<Atom, std::set<int>> valuation);

  const std::vector<int>& worlds() const { return worlds_; }  // ascending
  bool is_world(int w) const;
  bool has_agent(const Agent& a) const { return relations_.contains(a); }
  // Throws std::invalid_argument for agents without a relation.
  const std::set<WorldPair>& relation(const Agent& a) const;
  bool related(const Agent& a, int w, int v) const;
  bool value(const Atom& p, int w) const;  // unmapped atoms are false

  const std::map<Agent, std::set<WorldPair>>& relations() const { return relations_; }
  const std::map<Atom, std::set<int>>& valuation() const { return valuation_; }

  auto operator<=>(const KripkeModel&) const = default;

 private:
  std::vector<int> worlds_;
  std::map<Agent, std::set<WorldPair>> relations_;
  std::map<Atom, std::set<int>> valuation_;
};

// Truth at a world; throws std::invalid_argument if `world` is not in the
// model or the formula mentions an agent the model lacks.
bool eval(const KripkeModel& m, int world, const Formula& f);

// Submodel on the worlds satisfying phi; nullopt if no world does.
std::optional<KripkeModel> restrict_to(const KripkeModel& m, const Formula& phi);

// A labelled sequent holds under an assignment of labels to worlds when some
// antecedent member fails or some succedent member holds.  Every label of the
// sequent must be mapped to a world of the model.
bool sequent_holds(const KripkeModel& m, const std::map<Label, int>& assignment,
                   const Sequent& s);

// All models with exactly num_worlds worlds over the given signature: every
// per-agent partition into equivalence classes, every valuation.  The
// callback returns false to stop; for_each_model returns false iff stopped.
bool for_each_model(int num_worlds, const std::vector<Agent>& agents,
                    const std::vector<Atom>& atoms,
                    const std::function<bool(const KripkeModel&)>& visit);

std::vector<KripkeModel> enumerate_models(int num_worlds,
                                          const std::vector<Agent>& agents,
                                          const std::vector<Atom>& atoms);

struct CounterExample {
  KripkeModel model;
  int world;
};

struct SequentCounterExample {
  KripkeModel model;
  std::map<Label, int> assignment;
};

// Exhaustive search for a falsifying pointed model with 1..max_worlds worlds,
// over the agents and atoms of f.  nullopt means f is valid within the bound.
std::optional<CounterExample> brute_force_check(const Formula& f, int max_worlds);

std::optional<SequentCounterExample> brute_force_check_sequent(const Sequent& s,
                                                               int max_worlds);

}  // namespace gpal

#endif
