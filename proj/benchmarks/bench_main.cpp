#include <map>
#include <benchmark/benchmark.h>

#include "frad/datagen.hpp"
#include "frad/ensembles.hpp"
#include "frad/features.hpp"
#include "frad/hpo.hpp"
#include "frad/mlp.hpp"
#include "frad/tree.hpp"

namespace {

struct Fixture {
  frad::Matrix X;
  std::vector<int> y;
};

const Fixture& training_set(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  frad::GeneratorConfig cfg;
  cfg.n_total = n;
  cfg.seed = 7;
  const frad::Dataset d = frad::generate_dataset(cfg);
  Fixture f;
  f.X = frad::apply_standardizer(frad::fit_standardizer(d.features), d.features);
  f.y = frad::label_codes(d);
  return cache.emplace(n, std::move(f)).first->second;
}

void BM_ClassificationTree(benchmark::State& state) {
  const auto& data = training_set(static_cast<std::size_t>(state.range(0)));
  frad::TreeParams p;
  p.n_feature_candidates = 4;
  for (auto _ : state) {
    frad::Rng rng(1);
    benchmark::DoNotOptimize(frad::fit_classification_tree(data.X, data.y, 3, p, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClassificationTree)->Arg(1000)->Arg(6000)->Unit(benchmark::kMillisecond);

void BM_RandomForest(benchmark::State& state) {
  const auto& data = training_set(6000);
  frad::ForestParams p;
  p.n_trees = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(frad::fit_random_forest(data.X, data.y, p, 1));
}
BENCHMARK(BM_RandomForest)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Boosting(benchmark::State& state) {
  const auto& data = training_set(6000);
  frad::BoostParams p;
  p.n_rounds = static_cast<int>(state.range(0));
  p.tree.max_depth = 6;
  for (auto _ : state) benchmark::DoNotOptimize(frad::fit_boosting(data.X, data.y, p, 1));
}
BENCHMARK(BM_Boosting)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MlpEpoch(benchmark::State& state) {
  const auto& data = training_set(6000);
  frad::MlpTrainConfig cfg;
  cfg.epochs = 1;
  cfg.n_hidden = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(frad::train_mlp(data.X, data.y, cfg));
}
BENCHMARK(BM_MlpEpoch)->Arg(64)->Arg(233)->Unit(benchmark::kMillisecond);

void BM_GpFitAndPosterior(benchmark::State& state) {
  const auto n = state.range(0);
  frad::Rng rng(3);
  Eigen::MatrixXd pts(n, 4);
  Eigen::VectorXd vals(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) pts(i, j) = frad::uniform01(rng);
    vals(i) = frad::uniform01(rng);
  }
  const std::vector<double> x{0.5, 0.5, 0.5, 0.5};
  for (auto _ : state) {
    const auto gp = frad::gp_fit(pts, vals);
    for (int c = 0; c < 1024; ++c) benchmark::DoNotOptimize(frad::gp_posterior(gp, x));
  }
}
BENCHMARK(BM_GpFitAndPosterior)->Arg(25)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
