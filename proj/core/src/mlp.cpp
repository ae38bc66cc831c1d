#include "frad/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frad/random.hpp"

namespace frad {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum Stream : std::uint64_t { kInit = 30, kShuffle = 31 };

void check_config(const MlpTrainConfig& cfg) {
  if (cfg.n_hidden < 1) throw Error(ErrorCode::InvalidArgument, "n_hidden must be >= 1");
  if (!(cfg.initial_learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  if (cfg.batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
  if (cfg.epochs < 0) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 0");
  if (!(cfg.l2_weight_decay >= 0.0)) throw Error(ErrorCode::InvalidArgument, "l2_weight_decay must be >= 0");
}

Eigen::Map<const RowMatrix> as_eigen(const Matrix& X) {
  return {X.data().data(), static_cast<Eigen::Index>(X.rows()), static_cast<Eigen::Index>(X.cols())};
}

void softmax_rows(RowMatrix& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

/// Forward + backward over a batch given as a row matrix.
template <typename Batch>
double batch_loss_and_grad(const MlpModel& m, const Batch& X, std::span<const int> y, double l2, MlpGradients& g) {
  const auto n = X.rows();
  RowMatrix z1 = X * m.w1;
  z1.rowwise() += m.b1.transpose();
  RowMatrix a1 = z1.cwiseMax(0.0);
  RowMatrix logits = a1 * m.w2;
  logits.rowwise() += m.b2.transpose();
  softmax_rows(logits);

  double loss = 0.0;
  RowMatrix delta = logits;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]);
    loss -= std::log(std::max(logits(i, k), 1e-300));
    delta(i, k) -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss *= inv_n;
  delta *= inv_n;

  g.w2.noalias() = a1.transpose() * delta;
  g.b2 = delta.colwise().sum().transpose();
  RowMatrix d1 = delta * m.w2.transpose();
  d1.array() *= (z1.array() > 0.0).cast<double>();
  g.w1.noalias() = X.transpose() * d1;
  g.b1 = d1.colwise().sum().transpose();

  if (l2 > 0.0) {
    loss += 0.5 * l2 * (m.w1.squaredNorm() + m.w2.squaredNorm());
    g.w1 += l2 * m.w1;
    g.w2 += l2 * m.w2;
  }
  return loss;
}

void check_batch(const MlpModel& m, const Matrix& X, std::span<const int> y) {
  if (X.rows() != y.size()) throw Error(ErrorCode::ShapeMismatch, "batch rows and label count differ");
  if (X.rows() == 0) throw Error(ErrorCode::EmptyInput, "empty batch");
  if (X.cols() != m.n_features()) throw Error(ErrorCode::ShapeMismatch, "batch arity does not match the model");
  for (int l : y) {
    if (l < 0 || l >= static_cast<int>(kNumClasses)) throw Error(ErrorCode::InvalidLabel, "label outside {0,1,2}");
  }
}

}  // namespace

MlpModel init_mlp(std::size_t n_features, const MlpTrainConfig& cfg, std::uint64_t seed) {
  check_config(cfg);
  if (n_features < 1) throw Error(ErrorCode::InvalidArgument, "n_features must be >= 1");
  const auto f = static_cast<Eigen::Index>(n_features);
  const auto h = static_cast<Eigen::Index>(cfg.n_hidden);
  Rng rng = derive_rng(seed, {kInit});

  MlpModel m;
  m.config = cfg;
  auto he_uniform = [&rng](Eigen::MatrixXd& w, double fan_in) {
    std::uniform_real_distribution<double> u(-std::sqrt(6.0 / fan_in), std::sqrt(6.0 / fan_in));
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
    }
  };
  m.w1.resize(f, h);
  m.w2.resize(h, static_cast<Eigen::Index>(kNumClasses));
  he_uniform(m.w1, static_cast<double>(f));
  he_uniform(m.w2, static_cast<double>(h));
  m.b1 = Eigen::VectorXd::Zero(h);
  m.b2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kNumClasses));
  return m;
}

Eigen::Vector3d forward(const MlpModel& m, std::span<const double> x) {
  if (x.size() != m.n_features()) {
    throw Error(ErrorCode::ShapeMismatch, "row has " + std::to_string(x.size()) + " features, model expects " +
                                              std::to_string(m.n_features()));
  }
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd hidden = (m.w1.transpose() * xv + m.b1).cwiseMax(0.0);
  Eigen::Vector3d logits = m.w2.transpose() * hidden + m.b2;
  logits.array() -= logits.maxCoeff();
  logits = logits.array().exp().matrix();
  return logits / logits.sum();
}

Matrix predict_proba(const MlpModel& m, const Matrix& X) {
  if (X.rows() > 0 && X.cols() != m.n_features()) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(X.cols()) + " features, model expects " +
                                              std::to_string(m.n_features()));
  }
  Matrix out(X.rows(), kNumClasses);
  if (X.rows() == 0) return out;
  RowMatrix z1 = as_eigen(X) * m.w1;
  z1.rowwise() += m.b1.transpose();
  RowMatrix logits = z1.cwiseMax(0.0) * m.w2;
  logits.rowwise() += m.b2.transpose();
  softmax_rows(logits);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t k = 0; k < kNumClasses; ++k) out(i, k) = logits(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  }
  return out;
}

LossAndGradients loss_and_gradients(const MlpModel& m, const Matrix& X, std::span<const int> y, double l2_weight_decay) {
  check_batch(m, X, y);
  LossAndGradients out;
  out.loss = batch_loss_and_grad(m, as_eigen(X), y, l2_weight_decay, out.grad);
  return out;
}

MlpModel train_mlp(const Matrix& X, std::span<const int> y, const MlpTrainConfig& cfg) {
  check_config(cfg);
  if (X.rows() == 0) throw Error(ErrorCode::EmptyInput, "cannot train on zero rows");
  MlpModel m = init_mlp(X.cols(), cfg, cfg.seed);
  check_batch(m, X, y);

  const auto n = X.rows();
  const auto f = static_cast<Eigen::Index>(X.cols());
  const auto data = as_eigen(X);

  // Adam moments.
  MlpGradients m1{Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols()), Eigen::VectorXd::Zero(m.b1.size()),
                  Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols()), Eigen::VectorXd::Zero(m.b2.size())};
  MlpGradients m2 = m1;
  MlpGradients g = m1;
  double beta1_t = 1.0;
  double beta2_t = 1.0;

  auto adam = [&](auto& param, auto& first, auto& second, const auto& grad, double step, double bias2) {
    first = cfg.adam_beta1 * first + (1.0 - cfg.adam_beta1) * grad;
    second = cfg.adam_beta2 * second + (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
    param.array() -= step * first.array() / ((second.array() / bias2).sqrt() + cfg.adam_epsilon);
  };

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng shuffle_rng = derive_rng(cfg.seed, {kShuffle});
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  RowMatrix xb(static_cast<Eigen::Index>(std::min(batch, n)), f);
  std::vector<int> yb;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(len), f);
      yb.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = data.row(static_cast<Eigen::Index>(perm[start + i]));
        yb[i] = y[perm[start + i]];
      }
      epoch_loss += batch_loss_and_grad(m, xb, yb, cfg.l2_weight_decay, g) * static_cast<double>(len);

      beta1_t *= cfg.adam_beta1;
      beta2_t *= cfg.adam_beta2;
      const double step = cfg.initial_learning_rate / (1.0 - beta1_t);
      const double bias2 = 1.0 - beta2_t;
      adam(m.w1, m1.w1, m2.w1, g.w1, step, bias2);
      adam(m.b1, m1.b1, m2.b1, g.b1, step, bias2);
      adam(m.w2, m1.w2, m2.w2, g.w2, step, bias2);
      adam(m.b2, m1.b2, m2.b2, g.b2, step, bias2);
    }
    m.loss_trace.push_back(epoch_loss / static_cast<double>(n));
  }
  if (!m.w1.allFinite() || !m.w2.allFinite() || !m.b1.allFinite() || !m.b2.allFinite()) {
    throw Error(ErrorCode::NumericalFailure, "MLP weights diverged");
  }
  return m;
}

}  // namespace frad
