#include "gpal/fuzz.hpp"

#include <stdexcept>

#include "gpal/syntax.hpp"

namespace gpal {

Formula random_formula(std::mt19937_64& rng, int max_depth,
                       const std::vector<Agent>& agents,
                       const std::vector<Atom>& atoms) {
  if (agents.empty() || atoms.empty()) {
    throw std::invalid_argument("random_formula: empty signature");
  }
  auto atom = [&] { return Formula::prop(atoms[rng() % atoms.size()]); };
  if (max_depth <= 0) return atom();
  auto sub = [&] { return random_formula(rng, max_depth - 1, agents, atoms); };
  switch (rng() % 8) {
    case 0:
    case 1:
      return atom();
    case 2:
      return Formula::negation(sub());
    case 3: {
      Formula l = sub();
      return Formula::conjunction(std::move(l), sub());
    }
    case 4: {
      Formula l = sub();
      return Formula::implication(std::move(l), sub());
    }
    case 5:
    case 6:
      return Formula::knows(agents[rng() % agents.size()], sub());
    default: {
      Formula l = sub();
      return Formula::announcement(std::move(l), sub());
    }
  }
}

namespace {

std::string spell(int i, char base) {
  std::string name(1, static_cast<char>(base + i % 26));
  if (i >= 26) name += std::to_string(i / 26);
  return name;
}

}  // namespace

FuzzReport run_fuzz(const FuzzOptions& options) {
  if (options.count < 0 || options.max_depth < 0 || options.num_agents < 1 ||
      options.num_atoms < 1 || options.oracle_worlds < 1) {
    throw std::invalid_argument("run_fuzz: bad options");
  }

  std::vector<Agent> agents;
  for (int i = 0; i < options.num_agents; ++i) agents.emplace_back(spell(i, 'a'));
  std::vector<Atom> atoms;
  for (int i = 0; i < options.num_atoms; ++i) atoms.emplace_back(spell(i, 'p'));

  std::mt19937_64 rng(options.seed);
  FuzzReport report;

  for (int i = 0; i < options.count; ++i) {
    const Formula f =
        random_formula(rng, options.max_depth, agents, atoms);
    ++report.cases;
    auto flag = [&](std::string kind, std::string detail) {
      report.violations.push_back(
          FuzzViolation{i, f, std::move(kind), std::move(detail)});
    };

    const ProofResult pr = prove_formula(f, options.budget, options.search);
    switch (pr.verdict) {
      case Verdict::Proved:
        ++report.proved;
        break;
      case Verdict::Refuted:
        ++report.refuted;
        break;
      case Verdict::BudgetExhausted:
        ++report.budget_exhausted;
        flag("budget", pr.reason);
        break;
    }

    if (pr.verdict == Verdict::Proved) {
      if (auto ce = brute_force_check(f, options.oracle_worlds)) {
        flag("soundness",
             "claimed valid but false at world " + std::to_string(ce->world) +
                 " of a " + std::to_string(ce->model.worlds().size()) +
                 "-world model");
      }
    }

    const Formula tf = translate(f);
    const ProofResult pt = prove_formula(tf, options.budget, options.search);
    if (pt.verdict == Verdict::BudgetExhausted) {
      flag("budget", "on translation: " + pt.reason);
    } else if (pr.verdict != Verdict::BudgetExhausted &&
               pt.verdict != pr.verdict) {
      flag("translation-verdict", "original " + to_string(pr.verdict) +
                                      ", translation " + to_string(pt.verdict));
    }

    const auto agent_set = agents_of(f);
    const auto atom_set = atoms_of(f);
    const std::vector<Agent> f_agents(agent_set.begin(), agent_set.end());
    const std::vector<Atom> f_atoms(atom_set.begin(), atom_set.end());
    bool eval_ok = true;
    std::string eval_detail;
    for (int n = 1; n <= options.oracle_worlds && eval_ok; ++n) {
      for_each_model(n, f_agents, f_atoms, [&](const KripkeModel& m) {
        for (int w : m.worlds()) {
          if (eval(m, w, f) != eval(m, w, tf)) {
            eval_ok = false;
            eval_detail = "translation disagrees at world " +
                          std::to_string(w) + " of a " + std::to_string(n) +
                          "-world model";
            return false;
          }
        }
        return true;
      });
    }
    if (!eval_ok) flag("translation-eval", eval_detail);
  }

  std::string text =
      "fuzz: cases=" + std::to_string(report.cases) +
      " seed=" + std::to_string(options.seed) +
      " depth=" + std::to_string(options.max_depth) +
      " agents=" + std::to_string(options.num_agents) +
      " atoms=" + std::to_string(options.num_atoms) +
      " oracle-worlds=" + std::to_string(options.oracle_worlds) + "\n";
  text += "verdicts: proved=" + std::to_string(report.proved) +
          " refuted=" + std::to_string(report.refuted) +
          " budget-exhausted=" + std::to_string(report.budget_exhausted) +
          "\n";
  text += "violations: " + std::to_string(report.violations.size()) + "\n";
  for (std::size_t k = 0; k < report.violations.size(); ++k) {
    const auto& v = report.violations[k];
    text += "violation[" + std::to_string(k) + "]: kind=" + v.kind +
            " case=" + std::to_string(v.case_index) + " formula=\"" +
            render_formula(v.formula) + "\"\n  " + v.detail + "\n";
  }
  report.text = std::move(text);
  return report;
}

}  // namespace gpal
