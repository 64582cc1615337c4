#include <benchmark/benchmark.h>

#include "crl/core/linalg.hpp"
#include "crl/core/rng.hpp"
#include "crl/eval/cluster.hpp"
#include "crl/eval/metrics.hpp"
#include "crl/providers/crle.hpp"
#include "crl/transform/transform.hpp"

namespace {

using namespace crl;

EmbeddingMatrix random_matrix(std::size_t rows, std::size_t dims, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> data(rows * dims);
  for (auto& v : data) v = static_cast<float>(rng.normal());
  return EmbeddingMatrix(rows, dims, std::move(data));
}

void BM_Project(benchmark::State& state) {
  const auto images = random_matrix(static_cast<std::size_t>(state.range(0)), 512, 1);
  const auto rows = l2_normalize_rows(random_matrix(100, 512, 2)).matrix;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rows.rows(); ++i) names.push_back("d" + std::to_string(i));
  const TextBasis basis(make_criterion("color"), names, rows, true, "bench");
  for (auto _ : state) benchmark::DoNotOptimize(transform::project(images, basis));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Project)->Arg(256)->Arg(4096);

void BM_KMeans(benchmark::State& state) {
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 64, 3);
  eval::ClusterConfig cfg;
  cfg.k = 8;
  std::size_t trial = 0;
  for (auto _ : state) benchmark::DoNotOptimize(eval::kmeans(x, cfg, trial++));
}
BENCHMARK(BM_KMeans)->Arg(400)->Arg(4000);

void BM_Hungarian(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  std::vector<std::int64_t> counts(k * k);
  for (auto& c : counts) c = static_cast<std::int64_t>(rng.uniform_index(1000));
  for (auto _ : state) benchmark::DoNotOptimize(eval::hungarian_match(k, counts));
}
BENCHMARK(BM_Hungarian)->Arg(4)->Arg(32)->Arg(200);

void BM_CrleEncodeDecode(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 512, 5);
  for (auto _ : state) benchmark::DoNotOptimize(providers::decode_crle(providers::encode_crle(m)));
  state.SetBytesProcessed(state.iterations() * state.range(0) * 512 * 4);
}
BENCHMARK(BM_CrleEncodeDecode)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
