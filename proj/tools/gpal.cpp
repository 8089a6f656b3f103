// Command-line front end: prove / translate / check / modelcheck / fuzz.
// Exit codes: 0 = positive answer, 1 = negative answer, 2 = error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpal/derivation.hpp"
#include "gpal/fuzz.hpp"
#include "gpal/model_json.hpp"
#include "gpal/search.hpp"
#include "gpal/semantics.hpp"
#include "gpal/syntax.hpp"

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kError = 2;

gpal::ParseOptions parse_options(const std::vector<std::string>& agents) {
  gpal::ParseOptions opts;
  if (!agents.empty()) {
    std::set<gpal::Agent> allowed;
    for (const auto& a : agents) allowed.insert(gpal::Agent{a});
    opts.allowed_agents = std::move(allowed);
  }
  return opts;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct ProveArgs {
  std::string input;
  bool as_sequent = false;
  std::string emit = "text";
  long long budget_ms = 10'000;
  int max_labels = 64;
  int max_depth = 2000;
  std::vector<std::string> agents;
};

int cmd_prove(const ProveArgs& args) {
  const gpal::ParseOptions popts = parse_options(args.agents);
  gpal::Sequent goal;
  if (args.as_sequent) {
    goal = gpal::parse_sequent(args.input, popts);
  } else {
    goal = gpal::Sequent{
        gpal::Multiset{},
        gpal::Multiset{gpal::lab(gpal::Label{"x0"},
                                 gpal::parse_formula(args.input, popts))}};
  }

  gpal::SearchBudget budget;
  budget.max_branch_depth = args.max_depth;
  budget.max_labels = args.max_labels;
  budget.time_limit = std::chrono::milliseconds(args.budget_ms);

  const gpal::ProofResult result = gpal::prove(goal, budget);
  // With --emit json/latex, stdout carries exactly the artifact so it can be
  // piped into `check`; the human-readable lines move to stderr.
  std::ostream& info = args.emit == "text" ? std::cout : std::cerr;
  const auto print_stats = [&result, &info] {
    info << "stats: nodes=" << result.stats.nodes
         << " kl=" << result.stats.kl_steps << " kr=" << result.stats.kr_steps
         << " max-depth=" << result.stats.max_depth
         << " peak-labels=" << result.stats.peak_labels << "\n";
  };
  switch (result.verdict) {
    case gpal::Verdict::Proved: {
      info << "proved\n";
      print_stats();
      gpal::ExportFormat fmt = gpal::ExportFormat::Text;
      if (args.emit == "latex") fmt = gpal::ExportFormat::Latex;
      if (args.emit == "json") fmt = gpal::ExportFormat::Json;
      std::cout << gpal::export_derivation(*result.derivation, fmt);
      return kYes;
    }
    case gpal::Verdict::Refuted: {
      info << "refuted\n";
      print_stats();
      info << "saturated branch: "
           << gpal::render_sequent(*result.saturated_branch) << "\n";
      if (result.countermodel) {
        info << "countermodel:\n";
        std::cout << gpal::model_to_json(*result.countermodel) << "\n";
        for (const auto& [label, world] : result.world_of_label) {
          info << "  " << label.name() << " -> world " << world << "\n";
        }
      } else {
        info << "countermodel: extraction failed\n";
      }
      return kNo;
    }
    case gpal::Verdict::BudgetExhausted:
      info << "budget-exhausted (" << result.reason << ")\n";
      print_stats();
      return kError;
  }
  return kError;
}

int cmd_translate(const std::string& input,
                  const std::vector<std::string>& agents) {
  const gpal::Formula f = gpal::parse_formula(input, parse_options(agents));
  std::cout << gpal::render_formula(gpal::translate(f)) << "\n";
  return kYes;
}

int cmd_check(const std::string& path) {
  gpal::Derivation d = gpal::import_derivation(read_file(path));
  if (gpal::check_derivation(d)) {
    std::cout << "valid derivation of: " << gpal::render_sequent(d.root())
              << "\n";
    return kYes;
  }
  std::cout << "invalid derivation\n";
  return kNo;
}

int cmd_modelcheck(const std::string& model_path, int world,
                   const std::string& formula_text,
                   const std::vector<std::string>& agents) {
  const gpal::KripkeModel model = gpal::model_from_json(read_file(model_path));
  const gpal::Formula f =
      gpal::parse_formula(formula_text, parse_options(agents));
  const bool value = gpal::eval(model, world, f);
  std::cout << (value ? "true" : "false") << "\n";
  return value ? kYes : kNo;
}

struct FuzzArgs {
  int count = 500;
  std::uint64_t seed = 1;
  int depth = 4;
  int agents = 2;
  int atoms = 2;
  int oracle_worlds = 3;
};

int cmd_fuzz(const FuzzArgs& args) {
  gpal::FuzzOptions options;
  options.count = args.count;
  options.seed = args.seed;
  options.max_depth = args.depth;
  options.num_agents = args.agents;
  options.num_atoms = args.atoms;
  options.oracle_worlds = args.oracle_worlds;
  const gpal::FuzzReport report = gpal::run_fuzz(options);
  std::cout << report.text;
  return report.clean() ? kYes : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gpal - proofs, countermodels and reductions for public "
               "announcement logic over multi-agent S5"};
  app.require_subcommand(1);

  ProveArgs prove_args;
  CLI::App* prove = app.add_subcommand(
      "prove", "decide a formula (or sequent) and emit a proof/countermodel");
  prove->add_option("input", prove_args.input, "formula, e.g. \"K_a p -> p\"")
      ->required();
  prove->add_flag("--sequent", prove_args.as_sequent,
                  "treat the input as a labelled sequent");
  prove->add_option("--emit", prove_args.emit, "derivation format")
      ->check(CLI::IsMember({"text", "latex", "json"}))
      ->capture_default_str();
  prove->add_option("--budget-ms", prove_args.budget_ms, "time budget")
      ->capture_default_str();
  prove->add_option("--max-labels", prove_args.max_labels, "label budget")
      ->capture_default_str();
  prove->add_option("--max-depth", prove_args.max_depth, "branch depth budget")
      ->capture_default_str();
  prove->add_option("--agents", prove_args.agents,
                    "restrict agent names (default: any)");

  std::string translate_input;
  std::vector<std::string> translate_agents;
  CLI::App* translate = app.add_subcommand(
      "translate", "print the announcement-free reduction of a formula");
  translate->add_option("input", translate_input, "formula")->required();
  translate->add_option("--agents", translate_agents,
                        "restrict agent names (default: any)");

  std::string check_path;
  CLI::App* check =
      app.add_subcommand("check", "validate an exported json derivation");
  check->add_option("file", check_path, "derivation file")->required();

  std::string mc_model;
  int mc_world = 0;
  std::string mc_formula;
  std::vector<std::string> mc_agents;
  CLI::App* modelcheck = app.add_subcommand(
      "modelcheck", "evaluate a formula at a world of a json model");
  modelcheck->add_option("model", mc_model, "model file")->required();
  modelcheck->add_option("world", mc_world, "world id")->required();
  modelcheck->add_option("formula", mc_formula, "formula")->required();
  modelcheck->add_option("--agents", mc_agents,
                         "restrict agent names (default: any)");

  FuzzArgs fuzz_args;
  CLI::App* fuzz = app.add_subcommand(
      "fuzz", "differential-test the prover against the semantic oracle");
  fuzz->add_option("-n,--count", fuzz_args.count, "number of cases")
      ->capture_default_str();
  fuzz->add_option("--seed", fuzz_args.seed, "rng seed")
      ->capture_default_str();
  fuzz->add_option("--depth", fuzz_args.depth, "max formula depth")
      ->capture_default_str();
  fuzz->add_option("--agents", fuzz_args.agents, "number of agents")
      ->capture_default_str();
  fuzz->add_option("--atoms", fuzz_args.atoms, "number of atoms")
      ->capture_default_str();
  fuzz->add_option("--oracle-worlds", fuzz_args.oracle_worlds,
                   "semantic oracle world bound")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kYes : kError;
  }

  try {
    if (prove->parsed()) return cmd_prove(prove_args);
    if (translate->parsed()) return cmd_translate(translate_input, translate_agents);
    if (check->parsed()) return cmd_check(check_path);
    if (modelcheck->parsed()) {
      return cmd_modelcheck(mc_model, mc_world, mc_formula, mc_agents);
    }
    if (fuzz->parsed()) return cmd_fuzz(fuzz_args);
  } catch (const gpal::ParseError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kError;
  } catch (const gpal::ImportError& e) {
    std::cerr << "import error: " << e.what() << "\n";
    return kError;
  } catch (const gpal::ModelJsonError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
