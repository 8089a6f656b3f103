// Microbenchmarks for the hot paths: proof search (proved and refuted),
// translation, derivation checking and the semantic oracle.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gpal/derivation.hpp"
#include "gpal/fuzz.hpp"
#include "gpal/search.hpp"
#include "gpal/semantics.hpp"
#include "gpal/syntax.hpp"

namespace {

void BM_ProveAxiom(benchmark::State& state, const char* text) {
  const gpal::Formula f = gpal::parse_formula(text);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpal::prove_formula(f));
  }
}
BENCHMARK_CAPTURE(BM_ProveAxiom, T, "K_a p -> p");
BENCHMARK_CAPTURE(BM_ProveAxiom, Four, "K_a p -> K_a K_a p");
BENCHMARK_CAPTURE(BM_ProveAxiom, Five, "~K_a p -> K_a ~K_a p");
BENCHMARK_CAPTURE(BM_ProveAxiom, R5, "[p]K_a q <-> (p -> K_a [p]q)");
BENCHMARK_CAPTURE(BM_ProveAxiom, R6, "[p][q]r <-> [p & [p]q]r");

void BM_RefuteMoore(benchmark::State& state) {
  const gpal::Formula moore = gpal::parse_formula("[p & ~K_a p]~K_a p");
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpal::prove_formula(moore));
  }
}
BENCHMARK(BM_RefuteMoore);

// Stacked announcements make the translation blow up; this tracks both the
// translator and search on its (much larger) output.
void BM_TranslateNested(benchmark::State& state) {
  const gpal::Formula f =
      gpal::parse_formula("[p & ~K_a p][K_b q][p -> q]K_a (p & q)");
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpal::translate(f));
  }
}
BENCHMARK(BM_TranslateNested);

void BM_ProveTranslated(benchmark::State& state) {
  const gpal::Formula f = gpal::translate(
      gpal::parse_formula("[p & ~K_a p][K_b q]K_a (p & q)"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpal::prove_formula(f));
  }
}
BENCHMARK(BM_ProveTranslated);

void BM_IdentityExpansion(benchmark::State& state) {
  // Proof closes through the synthesized identity derivation.
  const gpal::Formula f =
      gpal::parse_formula("[p][q]K_a (p -> K_b q) -> [p][q]K_a (p -> K_b q)");
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpal::prove_formula(f));
  }
}
BENCHMARK(BM_IdentityExpansion);

void BM_CheckDerivation(benchmark::State& state) {
  const gpal::ProofResult r = gpal::prove_formula(
      gpal::parse_formula("[p](q -> r) <-> ([p]q -> [p]r)"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpal::check_derivation(*r.derivation));
  }
}
BENCHMARK(BM_CheckDerivation);

void BM_LowerLift(benchmark::State& state) {
  const gpal::ProofResult r = gpal::prove_formula(
      gpal::parse_formula("[p]K_a q <-> (p -> K_a [p]q)"));
  for (auto _ : state) {
    const gpal::Derivation el = gpal::lower_to_el(*r.derivation);
    benchmark::DoNotOptimize(gpal::lift_to_pal(el, r.derivation->root()));
  }
}
BENCHMARK(BM_LowerLift);

void BM_OracleEnumeration(benchmark::State& state) {
  const std::vector<gpal::Agent> agents{gpal::Agent{"a"}, gpal::Agent{"b"}};
  const std::vector<gpal::Atom> atoms{gpal::Atom{"p"}, gpal::Atom{"q"}};
  const gpal::Formula moore = gpal::parse_formula("[p & ~K_a p]~K_a p");
  for (auto _ : state) {
    int falsified = 0;
    for (int n = 1; n <= static_cast<int>(state.range(0)); ++n) {
      gpal::for_each_model(n, agents, atoms, [&](const gpal::KripkeModel& m) {
        for (int w : m.worlds()) falsified += !gpal::eval(m, w, moore);
        return true;
      });
    }
    benchmark::DoNotOptimize(falsified);
  }
}
BENCHMARK(BM_OracleEnumeration)->Arg(2)->Arg(3);

void BM_ProveRandomDepth4(benchmark::State& state) {
  // A slice of the differential-testing corpus, verdicts mixed.
  std::mt19937_64 rng(7);
  const std::vector<gpal::Agent> agents{gpal::Agent{"a"}, gpal::Agent{"b"}};
  const std::vector<gpal::Atom> atoms{gpal::Atom{"p"}, gpal::Atom{"q"}};
  std::vector<gpal::Formula> slice;
  for (int i = 0; i < 50; ++i) {
    slice.push_back(gpal::random_formula(rng, 4, agents, atoms));
  }
  for (auto _ : state) {
    for (const gpal::Formula& f : slice) {
      benchmark::DoNotOptimize(gpal::prove_formula(f));
    }
  }
}
BENCHMARK(BM_ProveRandomDepth4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
