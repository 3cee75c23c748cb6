#include <benchmark/benchmark.h>

#include "corpusforge/minhash.hpp"
#include "corpusforge/unicode.hpp"
#include "support/fixtures.hpp"

using namespace corpusforge;

namespace {

std::string sample_doc(std::size_t chars) {
  testsupport::JapaneseTextGen gen(7);
  std::string out;
  while (count_scalars(out) < chars) out += gen.sentence(60) + "\n";
  return out;
}

void BM_Shingle(benchmark::State& state) {
  std::string canonical = fold_for_shingles(sample_doc(std::size_t(state.range(0))));
  std::uint64_t chars = 0;
  for (auto _ : state) {
    auto set = shingle_text(canonical, 5);
    benchmark::DoNotOptimize(set.hashes.data());
    chars += std::uint64_t(state.range(0));
  }
  state.SetItemsProcessed(int64_t(chars));
}
BENCHMARK(BM_Shingle)->Arg(1000)->Arg(10000);

void BM_Signature(benchmark::State& state) {
  std::string canonical = fold_for_shingles(sample_doc(std::size_t(state.range(0))));
  ShingleSet set = shingle_text(canonical, 5);
  MinHashParams params{.k = 128, .ngram = 5, .seed = 1};
  for (auto _ : state) {
    auto sig = minhash_signature(set, params);
    benchmark::DoNotOptimize(sig.values.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(set.size()) * params.k);
}
BENCHMARK(BM_Signature)->Arg(1000)->Arg(10000);

void BM_CandidatePairs(benchmark::State& state) {
  testsupport::JapaneseTextGen gen(13);
  MinHashParams params{.k = 128, .ngram = 5, .seed = 2};
  std::vector<SignatureRecord> docs;
  for (int d = 0; d < state.range(0); ++d) {
    std::string text = fold_for_shingles(gen.document(4, 50));
    docs.push_back({DocId{"b", 0, std::uint32_t(d)},
                    minhash_signature(shingle_text(text, 5), params)});
  }
  for (auto _ : state) {
    auto pairs = build_candidate_pairs(docs, 16, 8);
    benchmark::DoNotOptimize(pairs.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_CandidatePairs)->Arg(1000)->Arg(5000);

}  // namespace
