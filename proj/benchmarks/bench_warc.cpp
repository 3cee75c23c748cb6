#include <benchmark/benchmark.h>

#include <sstream>

#include "corpusforge/warc.hpp"
#include "support/fixtures.hpp"

using namespace corpusforge;

namespace {

std::string archive_of(int records) {
  testsupport::JapaneseTextGen gen(31);
  std::vector<std::string> recs;
  for (int i = 0; i < records; ++i) {
    std::string page = testsupport::html_page(gen.sentence(8), {gen.document(3, 60)});
    recs.push_back(testsupport::response_record(
        page, "http://bench" + std::to_string(i) + ".example.jp/"));
  }
  return testsupport::gzip_archive(recs);
}

void BM_WarcIterate(benchmark::State& state) {
  std::string archive = archive_of(int(state.range(0)));
  std::uint64_t records = 0;
  for (auto _ : state) {
    std::istringstream in(archive);
    WarcReader reader(in);
    while (auto rec = reader.next()) {
      benchmark::DoNotOptimize(rec->payload.data());
      ++records;
    }
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(archive.size()));
  state.SetItemsProcessed(int64_t(records));
}
BENCHMARK(BM_WarcIterate)->Arg(100)->Arg(1000);

void BM_ScoreJapanese(benchmark::State& state) {
  testsupport::JapaneseTextGen gen(37);
  std::string text = gen.document(12, 80);
  for (auto _ : state) {
    auto score = score_japanese(text);
    benchmark::DoNotOptimize(&score);
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(text.size()));
}
BENCHMARK(BM_ScoreJapanese);

}  // namespace
