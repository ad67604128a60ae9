#include <benchmark/benchmark.h>

#include "scorekeeping/embed.hpp"
#include "scorekeeping/propgen.hpp"
#include "scorekeeping/rules.hpp"

namespace sk = scorekeeping;

namespace {

void BM_MatchFirst(benchmark::State& state) {
  const auto corpus = sk::synth_corpus(50, 1, sk::Split::Train);
  const auto& rules = sk::canonical_rules();
  std::size_t matched = 0;
  for (auto _ : state) {
    for (const auto& d : corpus) {
      for (const auto& t : d.turns) matched += sk::match_first(rules, t.question, t.answer).has_value();
    }
  }
  benchmark::DoNotOptimize(matched);
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_MatchFirst);

void BM_Generate(benchmark::State& state) {
  const auto corpus = sk::synth_corpus(200, 2, sk::Split::Train);
  sk::GenerationInputs in;
  in.dialogues = corpus;
  in.rules = sk::canonical_rules();
  for (auto _ : state) benchmark::DoNotOptimize(sk::generate(in).ordered.size());
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

}  // namespace
