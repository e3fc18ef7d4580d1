// Serial references against their OpenMP kernels, and the tree against a
// linear scan. Run: build/bench/standoff_bench

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "standoff/concept_tagger.hpp"
#include "standoff/graph_tools.hpp"
#include "standoff/interval_tree.hpp"
#include "support/graph_oracles.hpp"
#include "support/oracles.hpp"

using namespace standoff;

namespace {

struct TreeFixture {
  IntervalTree tree;
  std::vector<TreeEntry> all;
  std::vector<RelationQuery> queries;

  explicit TreeFixture(std::size_t n) {
    std::mt19937_64 rng(1);
    const Offset span = static_cast<Offset>(n) * 10;
    for (EntryId id = 1; id <= n; ++id) {
      const auto iv = testing::random_interval(rng, span, 200);
      tree.insert(iv, id);
      all.push_back({iv, id});
    }
    std::sort(all.begin(), all.end());
    // before/after return about half the set; both methods then spend
    // their time copying results, so they are left out here
    std::vector<AllenRelation> selective;
    for (auto r : kAllRelations) {
      if (r != AllenRelation::kBefore && r != AllenRelation::kAfter) selective.push_back(r);
    }
    for (int q = 0; q < 2000; ++q) {
      queries.push_back({selective[rng() % selective.size()], testing::random_interval(rng, span, 400)});
    }
  }
};

const TreeFixture& tree_fixture(std::size_t n) {
  static std::map<std::size_t, TreeFixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, TreeFixture(n)).first;
  return it->second;
}

void BM_TreeQuery(benchmark::State& state) {
  const auto& f = tree_fixture(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = f.queries[i++ % f.queries.size()];
    benchmark::DoNotOptimize(f.tree.query(q.rel, q.b));
  }
}
BENCHMARK(BM_TreeQuery)->Arg(1000)->Arg(100000);

void BM_LinearScan(benchmark::State& state) {
  const auto& f = tree_fixture(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = f.queries[i++ % f.queries.size()];
    benchmark::DoNotOptimize(testing::linear_scan(f.all, q.rel, q.b));
  }
}
BENCHMARK(BM_LinearScan)->Arg(1000)->Arg(100000);

void BM_BatchQuerySerial(benchmark::State& state) {
  const auto& f = tree_fixture(100000);
  for (auto _ : state) benchmark::DoNotOptimize(batch_query_serial(f.tree, f.queries));
}
BENCHMARK(BM_BatchQuerySerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BatchQueryParallel(benchmark::State& state) {
  const auto& f = tree_fixture(100000);
  for (auto _ : state) benchmark::DoNotOptimize(batch_query(f.tree, f.queries));
}
BENCHMARK(BM_BatchQueryParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

struct TaggerFixture {
  Lexicon lex;
  std::vector<std::vector<SentenceToken>> sentences;

  TaggerFixture() {
    std::mt19937 rng(2);
    std::vector<std::string> vocab;
    for (int i = 0; i < 400; ++i) vocab.push_back("w" + std::to_string(i));
    for (int t = 0; t < 20000; ++t) {
      std::string term;
      const int len = 1 + static_cast<int>(rng() % 4);
      for (int k = 0; k < len; ++k) term += (k ? " " : "") + vocab[rng() % vocab.size()];
      lex.add_term(term, "C" + std::to_string(t));
    }
    for (int s = 0; s < 5000; ++s) {
      std::vector<SentenceToken> toks;
      Offset pos = 0;
      for (int i = 0; i < 25; ++i) {
        const auto& w = vocab[rng() % vocab.size()];
        toks.push_back({Interval(pos, pos + w.size()), w});
        pos += w.size() + 1;
      }
      sentences.push_back(std::move(toks));
    }
  }
};

const TaggerFixture& tagger_fixture() {
  static const TaggerFixture f;
  return f;
}

void BM_TagSerial(benchmark::State& state) {
  const auto& f = tagger_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(tag_sentences_serial(f.sentences, f.lex));
}
BENCHMARK(BM_TagSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_TagParallel(benchmark::State& state) {
  const auto& f = tagger_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(tag_sentences(f.sentences, f.lex));
}
BENCHMARK(BM_TagParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

const std::vector<LabeledGraph>& mining_graphs() {
  static const auto graphs = [] {
    std::mt19937 rng(3);
    std::vector<LabeledGraph> g;
    for (int i = 0; i < 300; ++i) g.push_back(testing::random_graph(rng, 8, 10, {"a", "b", "c", "d"}));
    return g;
  }();
  return graphs;
}

void BM_Mine(benchmark::State& state) {
  const MiningOptions opts{.min_support = 5, .max_nodes = 4, .parallel = state.range(0) != 0};
  for (auto _ : state) benchmark::DoNotOptimize(mine_frequent_subgraphs(mining_graphs(), opts));
}
BENCHMARK(BM_Mine)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
