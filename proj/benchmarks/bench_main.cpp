#include <benchmark/benchmark.h>

#include "kairos/graph.hpp"
#include "kairos/impact.hpp"
#include "kairos/neural.hpp"
#include "kairos/synth.hpp"
#include "kairos/textfeat.hpp"
#include "kairos/util.hpp"

namespace {

using namespace kairos;

std::string sample_text(std::size_t words) {
  Rng rng(99);
  static const char* vocab[] = {"the",  "debate", "argument", "because", "therefore",
                                "good", "wrong",  "evidence", "thank",   "opponent",
                                "must", "policy", "freedom",  "against", "support"};
  std::string text;
  for (std::size_t i = 0; i < words; ++i) {
    text += vocab[rng.below(std::size(vocab))];
    text += (i % 12 == 11) ? ". " : " ";
  }
  return text;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string text = sample_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    TokenStream stream = tokenize(text);
    benchmark::DoNotOptimize(stream.tokens.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Tokenize)->Arg(100)->Arg(1000)->Arg(10000);

void BM_LinguisticFeatures(benchmark::State& state) {
  const std::string text = sample_text(static_cast<std::size_t>(state.range(0)));
  const TokenStream stream = tokenize(text);
  const LexiconSet& lex = builtin_lexicons();
  for (auto _ : state) {
    FeatureVector fv = claim_or_side_features(stream, lex);
    benchmark::DoNotOptimize(fv.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LinguisticFeatures)->Arg(100)->Arg(1000);

void BM_TfidfTransform(benchmark::State& state) {
  std::vector<std::string> docs;
  for (int i = 0; i < 200; ++i) docs.push_back(sample_text(120));
  TfidfModel model = fit_tfidf(docs, 2);
  const std::string doc = sample_text(120);
  for (auto _ : state) {
    SparseVector v = tfidf_transform(model, doc);
    benchmark::DoNotOptimize(v.entries.data());
  }
}
BENCHMARK(BM_TfidfTransform);

void BM_Pagerank(benchmark::State& state) {
  SynthConfig config = preset_ideology(7);
  config.n_users = static_cast<int>(state.range(0));
  config.n_debates = config.n_users * 2;
  Corpus corpus = gen_debates(config);
  WeightedDigraph g = build_voter_graph(corpus);
  for (auto _ : state) {
    auto scores = pagerank(g);
    benchmark::DoNotOptimize(scores.data());
  }
}
BENCHMARK(BM_Pagerank)->Arg(100)->Arg(400);

void BM_Hits(benchmark::State& state) {
  SynthConfig config = preset_ideology(7);
  config.n_users = static_cast<int>(state.range(0));
  config.n_debates = config.n_users * 2;
  Corpus corpus = gen_debates(config);
  WeightedDigraph g = build_voter_graph(corpus);
  for (auto _ : state) {
    HitsScores scores = hits(g, 1e-9, 2000);
    benchmark::DoNotOptimize(scores.hub.data());
  }
}
BENCHMARK(BM_Hits)->Arg(100)->Arg(400);

void BM_BiGruForwardBackward(benchmark::State& state) {
  Rng rng(5);
  const int dim = 32, hidden = 16, steps = static_cast<int>(state.range(0));
  BiGru gru(dim, hidden, rng);
  std::vector<Vec> xs(steps, Vec(dim));
  for (auto& x : xs)
    for (double& v : x) v = rng.normal();
  std::vector<Vec> dstates(steps, Vec(2 * hidden, 0.01));
  for (auto _ : state) {
    BiGruTrace trace = bigru_forward(gru, xs);
    auto dxs = bigru_backward(gru, trace, dstates);
    benchmark::DoNotOptimize(dxs.data());
    for (Tensor* t : gru.params()) t->zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_BiGruForwardBackward)->Arg(16)->Arg(64);

void BM_ImpactTrainStep(benchmark::State& state) {
  SynthConfig config = preset_context(3);
  config.n_trees = 20;
  auto trees = gen_trees(config);
  auto examples = labeled_claims(trees);
  ImpactModelSpec spec;
  spec.composition = Composition::Flat;
  spec.context_len = 3;
  spec.encoder.dim = 16;
  ImpactModel model(spec);
  auto params = model.params();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& ex = examples[i++ % examples.size()];
    double loss = model.train_step(*ex.tree, ex.claim_id, ex.label);
    benchmark::DoNotOptimize(loss);
    for (Tensor* t : params) t->zero_grad();
  }
}
BENCHMARK(BM_ImpactTrainStep);

}  // namespace

BENCHMARK_MAIN();
