#include <fstream>
#include <random>
#include <sstream>

#include <benchmark/benchmark.h>

#include "lids/embedding_store.hpp"
#include "lids/layer_inference.hpp"
#include "lids/metric.hpp"
#include "lids/reference_metrics.hpp"

using namespace lids;

namespace {

const std::string kBundle = LIDS_BUNDLE_DIR;

EmbeddedText load(const std::string& stem) { return load_embedded_text_file(kBundle + "/" + stem + ".lids"); }

std::vector<std::string> words(const std::string& stem) {
  std::ifstream in(kBundle + "/text/" + stem + ".txt");
  std::stringstream buf;
  buf << in.rdbuf();
  return overlap_tokens(buf.str());
}

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = z(rng);
  }
  return m;
}

void BM_MacsBundle(benchmark::State& state) {
  const auto ref = load("article"), test = load("good_01");
  for (auto _ : state) benchmark::DoNotOptimize(macs(ref, test).score);
}
BENCHMARK(BM_MacsBundle)->Unit(benchmark::kMillisecond);

void BM_MacsPreparedReference(benchmark::State& state) {
  const auto ref = prepare_text(load("article"), kDefaultAlpha, {});
  const auto test = load("good_01");
  for (auto _ : state) {
    const auto prepared = prepare_text(test, kDefaultAlpha, {});
    benchmark::DoNotOptimize(macs(ref, prepared).score);
  }
}
BENCHMARK(BM_MacsPreparedReference)->Unit(benchmark::kMillisecond);

void BM_MacsRandom(benchmark::State& state) {
  const auto n = state.range(0);
  const auto ref = random_matrix(4 * n, 128, 1), test = random_matrix(n, 128, 2);
  for (auto _ : state) benchmark::DoNotOptimize(macs(ref, test).score);
}
BENCHMARK(BM_MacsRandom)->Arg(32)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BertScore(benchmark::State& state) {
  const auto ref = load("article"), test = load("good_01");
  for (auto _ : state) benchmark::DoNotOptimize(bertscore(ref, test).f1);
}
BENCHMARK(BM_BertScore)->Unit(benchmark::kMillisecond);

void BM_RougeL(benchmark::State& state) {
  const auto ref = words("article"), cand = words("good_01");
  for (auto _ : state) benchmark::DoNotOptimize(rougeL(ref, cand).f1);
}
BENCHMARK(BM_RougeL);

void BM_Bleu(benchmark::State& state) {
  const auto ref = words("article"), cand = words("good_01");
  for (auto _ : state) benchmark::DoNotOptimize(bleu(ref, cand));
}
BENCHMARK(BM_Bleu);

void BM_KeywordClouds(benchmark::State& state) {
  const auto text = load("good_01");
  for (auto _ : state) benchmark::DoNotOptimize(keyword_clouds(text, 3, kDefaultFdrQ, 3).sigma_hat);
}
BENCHMARK(BM_KeywordClouds)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
