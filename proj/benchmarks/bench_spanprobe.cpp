#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <string>
#include <vector>

#include "spanprobe/encoder.hpp"
#include "spanprobe/rng.hpp"
#include "spanprobe/span_locator.hpp"
#include "spanprobe/span_repr.hpp"

namespace {

using namespace spanprobe;

std::string random_text(int words, std::uint64_t seed) {
  static const char* pool[] = {"casa", "verde", "spill", "the",  "beans", "under",
                               "pão",  "água",  "fish",  "cold", "feet",  "grande"};
  rng::Generator gen(seed);
  std::string out;
  for (int i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += pool[gen.next_below(std::size(pool))];
  }
  return out;
}

void bench_edit_distance(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const std::string a = random_text(n, 1);
  const std::string b = random_text(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(edit_distance_utf8(a, b));
  }
  state.SetComplexityN(n);
}
BENCHMARK(bench_edit_distance)->RangeMultiplier(4)->Range(2, 32)->Complexity();

void bench_locate(benchmark::State& state) {
  const auto words = static_cast<int>(state.range(0));
  const std::string sentence = random_text(words, 3) + " spill the beans " + random_text(4, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(try_locate_mwe("spill the beans", sentence, 0.5));
  }
  state.SetComplexityN(words);
}
BENCHMARK(bench_locate)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void bench_locate_with_slack(benchmark::State& state) {
  const std::string sentence = random_text(64, 3) + " spill the beans " + random_text(4, 4);
  LocateOptions options;
  options.word_count_slack = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(try_locate_mwe("spill the beans", sentence, 0.5, options));
  }
}
BENCHMARK(bench_locate_with_slack);

void bench_represent(benchmark::State& state) {
  const auto type = static_cast<ReprType>(state.range(0));
  const int d = 768;
  rng::Generator gen(5);
  Eigen::MatrixXd span(3, d);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < d; ++c) span(r, c) = gen.next_uniform(-1, 1);
  }
  AttentiveScorer scorer{Eigen::VectorXd(d)};
  for (int c = 0; c < d; ++c) scorer.weights(c) = gen.next_uniform(-1, 1);
  const AttentiveScorer* maybe_scorer = type == ReprType::SELF_ATTENTIVE ? &scorer : nullptr;
  for (auto _ : state) {
    benchmark::DoNotOptimize(represent(span, type, maybe_scorer));
  }
  state.SetLabel(repr_type_name(type));
}
BENCHMARK(bench_represent)->DenseRange(0, 5, 1);

void bench_mock_encode(benchmark::State& state) {
  const auto spec = default_spec(EncoderName::MOCK);
  const auto encoder = make_encoder(spec);
  static const char* pool[] = {"casa", "verde", "spill", "beans", "weather", "pão"};
  std::vector<std::string> words;
  for (int i = 0; i < state.range(0); ++i) words.push_back(pool[i % std::size(pool)]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(encoder->encode(words));
  }
}
BENCHMARK(bench_mock_encode)->RangeMultiplier(4)->Range(4, 64);

}  // namespace

BENCHMARK_MAIN();
