#include <benchmark/benchmark.h>

#include <vector>

#include "fv/encode.hpp"
#include "fv/gmm.hpp"
#include "fv/kernels.hpp"
#include "fv/kmeans.hpp"
#include "fv/rng.hpp"
#include "fv/types.hpp"

// Serial reference vs OpenMP kernels on the same instances. Run with
// OMP_NUM_THREADS to control the parallel side.
namespace {

using namespace fv;

DescriptorSet make_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  DescriptorSet x;
  x.n = n;
  x.dim = dim;
  x.data.resize(n * dim);
  for (auto& v : x.data) v = static_cast<float>(rng.normal(0.0, 2.0));
  return x;
}

GmmModel make_model(std::size_t k2, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  GmmModel m;
  m.k2 = k2;
  m.dim = dim;
  m.weights.assign(k2, 1.0 / static_cast<double>(k2));
  m.means.resize(k2 * dim);
  m.variances.resize(k2 * dim);
  for (auto& v : m.means) v = rng.uniform(-3.0, 3.0);
  for (auto& v : m.variances) v = rng.uniform(0.5, 2.0);
  return m;
}

Codebook make_codebook(std::size_t k1, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  Codebook cb;
  cb.k1 = k1;
  cb.dim = dim;
  cb.centers.resize(k1 * dim);
  for (auto& v : cb.centers) v = rng.uniform(-3.0, 3.0);
  return cb;
}

void BM_assign_ref(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto cb = make_codebook(256, 32, 2);
  std::vector<std::uint32_t> out(n);
  for (auto _ : state) {
    ref::assign_nearest(cb, x, out.data());
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_assign_omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto cb = make_codebook(256, 32, 2);
  std::vector<std::uint32_t> out(n);
  for (auto _ : state) {
    kernels::assign_nearest(cb, x, out.data());
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_estep_ref(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto m = make_model(64, 32, 2);
  for (auto _ : state) {
    auto stats = ref::estep_accumulate(m, x);
    benchmark::DoNotOptimize(stats);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_estep_omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto m = make_model(64, 32, 2);
  for (auto _ : state) {
    auto stats = kernels::estep_accumulate(m, x);
    benchmark::DoNotOptimize(stats);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_fv_sums_ref(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto m = make_model(64, 32, 2);
  std::vector<double> out(2 * m.k2 * m.dim);
  for (auto _ : state) {
    ref::fv_sums(m, x, out.data());
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_fv_sums_omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto m = make_model(64, 32, 2);
  std::vector<double> out(2 * m.k2 * m.dim);
  for (auto _ : state) {
    kernels::fv_sums(m, x, out.data());
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_posteriors_ref(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto m = make_model(64, 32, 2);
  std::vector<double> q(n * m.k2);
  for (auto _ : state) {
    ref::posterior_rows(m, x, q.data());
    benchmark::DoNotOptimize(q);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_posteriors_omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto m = make_model(64, 32, 2);
  std::vector<double> q(n * m.k2);
  for (auto _ : state) {
    kernels::posterior_rows(m, x, q.data());
    benchmark::DoNotOptimize(q);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_hfv_encode(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = make_points(n, 32, 1);
  const auto m = make_model(64, 32, 2);
  const auto cb = make_codebook(128, 32, 3);
  for (auto _ : state) {
    auto enc = hfv_encode(m, cb, x);
    benchmark::DoNotOptimize(enc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

}  // namespace

BENCHMARK(BM_assign_ref)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_assign_omp)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_estep_ref)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_estep_omp)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_fv_sums_ref)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_fv_sums_omp)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_posteriors_ref)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_posteriors_omp)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_hfv_encode)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK_MAIN();
