#include <random>

#include <benchmark/benchmark.h>

#include "factcheck/kernels.hpp"
#include "factcheck/sadhan/train.hpp"
#include "factcheck/worthiness/model.hpp"

using namespace factcheck;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// Full-scale shapes: T tokens through a 100 -> 4*200 gate projection.
template <void (*Kernel)(const Matrix&, const Matrix&, const Vector&, Matrix&)>
void BM_project(benchmark::State& state) {
  const auto t = state.range(0);
  const Matrix x = random_matrix(t, 100, 1);
  const Matrix w = random_matrix(800, 100, 2);
  const Vector b = Vector::Constant(800, 0.1);
  Matrix out;
  for (auto _ : state) {
    Kernel(x, w, b, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * t * 800 * 100);
}

template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_weight_grad(benchmark::State& state) {
  const auto t = state.range(0);
  const Matrix dy = random_matrix(t, 800, 3);
  const Matrix x = random_matrix(t, 100, 4);
  Matrix grad = Matrix::Zero(800, 100);
  for (auto _ : state) {
    Kernel(dy, x, grad);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * t * 800 * 100);
}

template <void (*Kernel)(const Vector&, const Matrix&, std::vector<double>&)>
void BM_cosine_rows(benchmark::State& state) {
  const Matrix rows = random_matrix(state.range(0), 100, 5);
  const Vector q = random_matrix(100, 1, 6).col(0);
  std::vector<double> out;
  for (auto _ : state) {
    Kernel(q, rows, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_sadhan_epoch(benchmark::State& state) {
  const auto data = sadhan::toy_dataset(8, 1);
  auto vocab = std::make_shared<const text::Vocabulary>(sadhan::dataset_vocabulary(data));
  auto table = std::make_shared<const text::EmbeddingTable>(text::random_embeddings(vocab, 16, 3));
  nn::TrainConfig config;
  config.epochs = 1;
  config.optimizer = nn::OptimizerKind::adam;
  config.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(sadhan::train_sadhan(data, config, {16, 8, 8, 16}, table).best_epoch);
}

void BM_worthiness_epoch(benchmark::State& state) {
  const auto data = worthiness::synthetic_corpus(200, 1);
  std::vector<std::vector<std::string>> corpus;
  for (const auto& s : data) corpus.push_back(text::tokenize(s.text));
  auto vocab = std::make_shared<const text::Vocabulary>(text::Vocabulary::build(corpus, 1));
  auto table = std::make_shared<const text::EmbeddingTable>(text::random_embeddings(vocab, 16, 3));
  nn::TrainConfig config;
  config.epochs = 1;
  config.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(worthiness::train_worthiness(data, config, table, 64).best_epoch);
}

}  // namespace

BENCHMARK(BM_project<kernels::serial::project>)->Name("project/serial")->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_project<kernels::parallel::project>)->Name("project/parallel")->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_weight_grad<kernels::serial::accumulate_weight_grad>)->Name("weight_grad/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_weight_grad<kernels::parallel::accumulate_weight_grad>)->Name("weight_grad/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_cosine_rows<kernels::serial::cosine_rows>)->Name("cosine_rows/serial")->Arg(1000)->Arg(20000);
BENCHMARK(BM_cosine_rows<kernels::parallel::cosine_rows>)->Name("cosine_rows/parallel")->Arg(1000)->Arg(20000);
BENCHMARK(BM_sadhan_epoch)->Name("sadhan_epoch")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_worthiness_epoch)->Name("worthiness_epoch")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
