// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "analogia/evaluation.hpp"
#include "analogia/synthetic.hpp"
#include "analogia/training.hpp"

using namespace analogia;

namespace {

const SyntheticCorpus& corpus() {
    static const SyntheticCorpus c = make_synthetic_corpus(SyntheticConfig{});
    return c;
}

}  // namespace

// Inference encode of one sentence; arg 0 is the output dimension.
static void BM_Encode(benchmark::State& state) {
    const auto& c = corpus();
    const auto params = EncoderParams<Real>::init(c.table.dim(), static_cast<std::size_t>(state.range(0)) / 2, 1);
    const TokenSeq& sentence = c.train.questions[0].candidates[0].text;
    for (auto _ : state) benchmark::DoNotOptimize(encode(sentence, c.table, params));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Encode)->Arg(32)->Arg(300);

// One training epoch on the synthetic corpus, including backward passes.
static void BM_TrainEpoch(benchmark::State& state) {
    const auto& c = corpus();
    const PrototypeSet protos = select_prototypes(c.train, 5, 1);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.output_dim = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train(cfg, c.train, protos, c.table).log.back().mean_loss);
}
BENCHMARK(BM_TrainEpoch)->Arg(32)->Unit(benchmark::kMillisecond);

// Scoring every test question against its prototypes with a learned encoder.
static void BM_Evaluate(benchmark::State& state) {
    const auto& c = corpus();
    const PrototypeSet protos = select_prototypes(c.train, static_cast<std::size_t>(state.range(0)), 1);
    const auto encoder = learned_encoder(EncoderParams<Real>::init(c.table.dim(), 16, 1), c.table);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(encoder, c.test, protos).combined().mrr);
}
BENCHMARK(BM_Evaluate)->Arg(5)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_RankCandidates(benchmark::State& state) {
    const std::size_t dim = 300, k = 20, p = static_cast<std::size_t>(state.range(0));
    SentenceVec q(dim, 0.1);
    std::vector<SentenceVec> cands(k, SentenceVec(dim));
    std::vector<PrototypeVecs> protos(p, {SentenceVec(dim), SentenceVec(dim)});
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < dim; ++j) cands[i][j] = double((i * 31 + j * 7) % 13) / 13.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            protos[i].first[j] = double((i + j) % 5);
            protos[i].second[j] = double((i * j) % 3);
        }
    for (auto _ : state) benchmark::DoNotOptimize(rank_candidates(q, cands, protos).entries.front().score);
}
BENCHMARK(BM_RankCandidates)->Arg(5)->Arg(50);

BENCHMARK_MAIN();
