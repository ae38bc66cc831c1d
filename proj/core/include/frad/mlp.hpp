#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "frad/data.hpp"

namespace frad {

/// Values reported for the best MLP configuration.
inline constexpr int kPaperHiddenUnits = 233;
inline constexpr double kPaperInitialLearningRate = 0.0021547501740925594;

struct MlpTrainConfig {
  int n_hidden = kPaperHiddenUnits;
  double initial_learning_rate = kPaperInitialLearningRate;
  int epochs = 300;
  int batch_size = 64;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  double l2_weight_decay = 0.0;

  friend bool operator==(const MlpTrainConfig&, const MlpTrainConfig&) = default;
};

/// One hidden ReLU layer followed by a softmax over the three classes.
struct MlpModel {
  Eigen::MatrixXd w1;  // n_features x n_hidden
  Eigen::VectorXd b1;  // n_hidden
  Eigen::MatrixXd w2;  // n_hidden x 3
  Eigen::VectorXd b2;  // 3
  MlpTrainConfig config;
  /// Mean minibatch loss per epoch, filled by train_mlp.
  std::vector<double> loss_trace;

  std::size_t n_features() const noexcept { return static_cast<std::size_t>(w1.rows()); }
  std::size_t n_hidden() const noexcept { return static_cast<std::size_t>(w1.cols()); }

  friend bool operator==(const MlpModel& a, const MlpModel& b) {
    return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2 && a.config == b.config &&
           a.loss_trace == b.loss_trace;
  }
};

/// Gradient tensors with the same shapes as the model parameters.
struct MlpGradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

/// He-uniform weights in [-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
MlpModel init_mlp(std::size_t n_features, const MlpTrainConfig& cfg, std::uint64_t seed);

/// Class probabilities for one row.
Eigen::Vector3d forward(const MlpModel& m, std::span<const double> x);
Matrix predict_proba(const MlpModel& m, const Matrix& X);

struct LossAndGradients {
  double loss = 0.0;
  MlpGradients grad;
};

/// Mean cross-entropy over the batch plus 0.5 * l2 * (|W1|^2 + |W2|^2), with
/// exact backpropagated gradients.
LossAndGradients loss_and_gradients(const MlpModel& m, const Matrix& X, std::span<const int> y,
                                    double l2_weight_decay = 0.0);

/// Minibatch Adam at a constant learning rate; rows are reshuffled every epoch
/// with a permutation derived from the seed.
MlpModel train_mlp(const Matrix& X, std::span<const int> y, const MlpTrainConfig& cfg);

}  // namespace frad
