#include <random>

#include <benchmark/benchmark.h>

#include "cortexenc/corpus.hpp"
#include "cortexenc/encode.hpp"
#include "cortexenc/parallel.hpp"
#include "cortexenc/ppmi_svd.hpp"
#include "cortexenc/synth.hpp"

using namespace cortexenc;

namespace {

corpus::Corpus zipf_corpus(int tokens, int types) {
  std::mt19937 gen(1);
  std::vector<double> weights(static_cast<std::size_t>(types));
  for (int i = 0; i < types; ++i) weights[static_cast<std::size_t>(i)] = 1.0 / (i + 1);
  std::discrete_distribution<int> word(weights.begin(), weights.end());
  corpus::Corpus c(static_cast<std::size_t>(tokens / 20));
  for (int i = 0; i < tokens; ++i) c[static_cast<std::size_t>(i / 20)].push_back("w" + std::to_string(word(gen)));
  return c;
}

void BM_CountCooccurrences(benchmark::State& state) {
  const auto c = zipf_corpus(static_cast<int>(state.range(0)), 5000);
  auto vocab = std::make_shared<const corpus::Vocabulary>(corpus::build_vocab(c, 1, 100000));
  set_thread_count(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus::count_cooccurrences(c, vocab, {5, corpus::Weighting::flat}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  set_thread_count(1);
}
BENCHMARK(BM_CountCooccurrences)->Args({100000, 1})->Args({100000, 4})->Unit(benchmark::kMillisecond);

void BM_PpmiSvd(benchmark::State& state) {
  const auto c = zipf_corpus(200000, static_cast<int>(state.range(0)));
  auto vocab = std::make_shared<const corpus::Vocabulary>(corpus::build_vocab(c, 1, 100000));
  const auto counts = corpus::count_cooccurrences(c, vocab, {2, corpus::Weighting::flat});
  reprs::SvdOptions opts;
  opts.method = reprs::SvdMethod::randomized;
  for (auto _ : state) {
    const auto ppmi = reprs::ppmi_weight(counts);
    benchmark::DoNotOptimize(reprs::truncated_svd(ppmi, 100, 7, opts));
  }
}
BENCHMARK(BM_PpmiSvd)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_CrossvalEncode(benchmark::State& state) {
  const auto x = synth::random_matrix(1000, 20, 1);
  const auto w = synth::random_matrix(20, state.range(0), 2);
  const auto y = synth::gen_brain(x, w, 1.0, 3).data;
  const auto folds = encode::kfold_split(1000, 10, 0, encode::FoldScheme::contiguous);
  for (auto _ : state) benchmark::DoNotOptimize(encode::crossval_encode(x, y, folds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CrossvalEncode)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
