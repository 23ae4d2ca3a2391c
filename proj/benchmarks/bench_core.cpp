// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "hardneg/encoder.hpp"
#include "hardneg/hard_miner.hpp"
#include "hardneg/infonce.hpp"
#include "hardneg/synthesizer.hpp"

namespace {

using namespace hardneg;

std::vector<Embedding> unit_rows(std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<Embedding> out;
  for (std::size_t i = 0; i < count; ++i) {
    Embedding v(dim);
    for (double& x : v) x = rng.normal();
    out.push_back(normalize(v));
  }
  return out;
}

void BM_InfoNceBackward(benchmark::State& state) {
  Rng rng(1);
  const auto k_size = static_cast<std::size_t>(state.range(0));
  const auto negs = unit_rows(k_size, 32, rng);
  const auto q = unit_rows(1, 32, rng)[0];
  const auto k = unit_rows(1, 32, rng)[0];
  for (auto _ : state) benchmark::DoNotOptimize(infonce_backward(q, k, negs, 0.2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InfoNceBackward)->Arg(512)->Arg(4096);

void BM_TopNHardest(benchmark::State& state) {
  Rng rng(2);
  const auto negs = unit_rows(static_cast<std::size_t>(state.range(0)), 32, rng);
  const auto q = unit_rows(1, 32, rng)[0];
  for (auto _ : state) benchmark::DoNotOptimize(top_n_hardest(q, negs, 64));
}
BENCHMARK(BM_TopNHardest)->Arg(512)->Arg(4096);

void BM_Synthesize(benchmark::State& state) {
  Rng rng(3);
  const auto negs = unit_rows(512, 32, rng);
  const auto q = unit_rows(1, 32, rng)[0];
  const HardSet hard = top_n_hardest(q, negs, 64);
  const auto strategy = state.range(0) == 0 ? SynthesisStrategy::pair_mix() : SynthesisStrategy::query_mix();
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(q, hard, negs, 64, strategy, rng));
}
BENCHMARK(BM_Synthesize)->Arg(0)->Arg(1);

void BM_EncodeForwardBackward(benchmark::State& state) {
  EncoderConfig config;
  config.head_norm = state.range(0) == 0 ? HeadNorm::PerSample : HeadNorm::PerBatch;
  Rng rng(4);
  const EncoderParams params = init_encoder(config, rng, true);
  Matrix x(64, config.input_dim);
  for (double& v : x.values()) v = rng.normal();
  const Matrix grad(64, config.embed_dim, 0.01);
  for (auto _ : state) {
    EncodeResult r = encode(params, config, x, EncoderMode::Online, rng, true);
    benchmark::DoNotOptimize(encode_backward(params, r.cache, grad));
  }
}
BENCHMARK(BM_EncodeForwardBackward)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
