#include <doctest.h>

#include <cmath>

#include "frad/datagen.hpp"
#include "frad/ensembles.hpp"
#include "frad/eval.hpp"
#include "frad/features.hpp"
#include "frad/hpo.hpp"
#include "frad/mlp.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace frad;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale) {
  Matrix m(r, c);
  std::normal_distribution<double> n(0.0, scale);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

void check_distribution_rows(const Matrix& p) {
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double s = 0.0;
    for (double v : p.row(i)) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
      s += v;
    }
    REQUIRE(std::abs(s - 1.0) <= 1e-9);
  }
}

}  // namespace

TEST_CASE("CSV round trip holds for many generated datasets") {
  const auto dir = testing_support::scratch_dir("prop_roundtrip");
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    GeneratorConfig cfg;
    cfg.n_total = rng() % 200;
    cfg.noise_sigma = uniform01(rng);
    cfg.seed = rng();
    const Dataset d = generate_dataset(cfg);
    save_dataset(d, dir / "d.csv");
    const Dataset back = load_dataset(dir / "d.csv");
    REQUIRE(back.features == d.features);
    REQUIRE(back.labels == d.labels);
  }
}

TEST_CASE("structural class footprint holds without noise for any seed") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GeneratorConfig cfg;
    cfg.n_total = 600;
    cfg.noise_sigma = 0.0;
    cfg.seed = seed;
    cfg.suppression_tx_mean = 3.0 + static_cast<double>(seed);
    const Dataset d = generate_dataset(cfg);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      const double tx = d.features(i, 0);
      switch (d.labels[i].value) {
        case 0: REQUIRE(tx == 1.0); break;
        case 1: REQUIRE(tx == 2.0); break;
        default: REQUIRE(tx >= 3.0);
      }
      REQUIRE(oracle::hand_rule(tx, d.features(i, 10)) == d.labels[i].value);
    }
  }
}

TEST_CASE("generated rows always satisfy the dataset invariants") {
  for (double noise : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0}) {
    GeneratorConfig cfg;
    cfg.n_total = 500;
    cfg.noise_sigma = noise;
    const Dataset d = generate_dataset(cfg);
    CHECK_NOTHROW(validate(d));
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      REQUIRE(d.features(i, 0) >= 1.0);
      REQUIRE(d.features(i, 12) <= 1.0);
      REQUIRE(d.features(i, 12) >= 0.0);
      REQUIRE(d.features(i, 10) >= 1.0);
    }
  }
}

TEST_CASE("GP likelihood stays finite on arbitrary designs, including duplicates") {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + static_cast<int>(rng() % 25);
    const int d = 1 + static_cast<int>(rng() % 5);
    Eigen::MatrixXd pts(n, d);
    Eigen::VectorXd vals(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) pts(i, j) = i > 0 && t % 4 == 0 ? pts(i - 1, j) : uniform01(rng);
      vals[i] = uniform01(rng);
    }
    const auto gp = gp_fit(pts, vals);
    REQUIRE(std::isfinite(gp.log_marginal_likelihood()));
    const std::vector<double> centre(static_cast<std::size_t>(d), 0.5);
    const auto post = gp_posterior(gp, centre);
    REQUIRE(std::isfinite(post.mean));
    REQUIRE(post.std >= 0.0);
  }
}

TEST_CASE("correlation matrices are symmetric and bounded") {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    const std::size_t r = 2 + rng() % 50;
    const std::size_t c = 1 + rng() % 8;
    Matrix m = random_matrix(r, c, rng, std::pow(10.0, static_cast<double>(rng() % 7) - 3.0));
    if (t % 3 == 0)
      for (std::size_t i = 0; i < r; ++i) m(i, 0) = 4.0;
    const auto cm = pearson_correlation(m);
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        REQUIRE(std::abs(cm.entries(i, j) - cm.entries(j, i)) <= 1e-12);
        REQUIRE(cm.entries(i, j) >= -1.0 - 1e-12);
        REQUIRE(cm.entries(i, j) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("standardizer fitted on train leaves test columns off-centre") {
  const auto data = testing_support::synthetic(2000, 0.25, 3);
  const auto split = stratified_split(data.raw, 0.8, 3);
  const auto s = fit_standardizer(split.train.features);
  const Matrix zt = apply_standardizer(s, split.test.features);
  int off_centre = 0;
  for (std::size_t j = 0; j < zt.cols(); ++j) {
    double mean = 0.0;
    for (double v : zt.column(j)) mean += v;
    mean /= static_cast<double>(zt.rows());
    off_centre += std::abs(mean) > 1e-10 ? 1 : 0;
  }
  CHECK(off_centre > 0);
}

TEST_CASE("every model outputs probability rows, even on extreme inputs") {
  const auto data = testing_support::synthetic(200, 0.25, 4);
  Rng rng(4);
  const Matrix wild = random_matrix(100, kNumFeatures, rng, 1e3);
  ForestParams fp;
  fp.n_trees = 5;
  check_distribution_rows(predict_proba(fit_random_forest(data.X, data.y, fp), wild));
  for (auto v : {BoostVariant::FirstOrder, BoostVariant::SecondOrder}) {
    BoostParams bp;
    bp.variant = v;
    bp.n_rounds = 10;
    bp.learning_rate = 0.3;
    check_distribution_rows(predict_proba(fit_boosting(data.X, data.y, bp), wild));
  }
  MlpTrainConfig mc;
  mc.n_hidden = 16;
  mc.epochs = 5;
  check_distribution_rows(predict_proba(train_mlp(data.X, data.y, mc), wild));
}

TEST_CASE("accuracy is trace over total and confusion counts every row") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 100;
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % 3);
      b[i] = static_cast<int>(rng() % 3);
    }
    const auto cm = confusion_matrix(a, b);
    REQUIRE(cm.total() == static_cast<std::int64_t>(n));
    const auto trace = cm.counts[0][0] + cm.counts[1][1] + cm.counts[2][2];
    const auto m = compute_metrics(cm);
    REQUIRE(m.accuracy == static_cast<double>(trace) / static_cast<double>(n));
    for (std::size_t k = 0; k < 3; ++k) {
      REQUIRE(cm.row_sum(k) == std::count(a.begin(), a.end(), static_cast<int>(k)));
    }
    for (double v : {m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1}) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
  }
}

TEST_CASE("splits partition the rows for any seed and fraction") {
  const auto data = testing_support::synthetic(301, 0.25, 6);
  Rng rng(6);
  for (int t = 0; t < 25; ++t) {
    const double frac = 0.1 + 0.8 * uniform01(rng);
    const auto s = stratified_split(data.raw, frac, rng());
    std::vector<int> hits(data.raw.n_rows(), 0);
    for (auto r : s.train_rows) ++hits[r];
    for (auto r : s.test_rows) ++hits[r];
    REQUIRE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}

TEST_CASE("GP fits stay finite and interpolate on spread-out random designs") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const int d = 1 + static_cast<int>(rng() % 5);
    const int target = 1 + static_cast<int>(rng() % 25);
    // Points closer than 0.1 with different targets cannot be interpolated
    // through the jitter, so candidates that close to an accepted point are dropped.
    std::vector<std::vector<double>> accepted;
    for (int attempt = 0; attempt < 2000 && static_cast<int>(accepted.size()) < target; ++attempt) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& v : x) v = uniform01(rng);
      const bool spread = std::all_of(accepted.begin(), accepted.end(), [&](const std::vector<double>& a) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += (a[j] - x[j]) * (a[j] - x[j]);
        return std::sqrt(s) >= 0.1;
      });
      if (spread) accepted.push_back(x);
    }
    const int n = static_cast<int>(accepted.size());
    Eigen::MatrixXd pts(n, d);
    Eigen::VectorXd vals(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) pts(i, j) = accepted[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      vals[i] = uniform01(rng);
    }
    const auto gp = gp_fit(pts, vals);
    REQUIRE(std::isfinite(gp.log_marginal_likelihood()));
    CAPTURE(t);
    for (int i = 0; i < n; ++i) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = pts(i, j);
      const auto post = gp_posterior(gp, x);
      REQUIRE(post.std >= 0.0);
      REQUIRE(std::abs(post.mean - vals[i]) <= 1e-4);
    }
  }
}
