#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ave/rng.hpp"

namespace ave::learn {

/// Action-value function: input -> hidden (ReLU) -> hidden (ReLU) -> outputs.
///
/// All parameters live in one flat buffer, ordered W1, b1, W2, b2, W3, b3
/// (weights column-major, shape out x in). Optimizers and the
/// finite-difference tests operate on that buffer directly.
class ValueApproximator {
 public:
  ValueApproximator() = default;
  /// He-uniform weights, zero biases.
  ValueApproximator(int input_dim, int hidden, int outputs, SeededRng& rng);

  int input_dim() const { return input_; }
  int hidden() const { return hidden_; }
  int outputs() const { return outputs_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  void set_parameters(std::span<const double> values);

  Eigen::VectorXd predict(std::span<const double> obs) const;
  /// Columns are observations; returns outputs x batch.
  Eigen::MatrixXd predict_batch(const Eigen::MatrixXd& obs) const;

  /// mean_b (Q(obs_b)[action_b] - target_b)^2
  double loss(const Eigen::MatrixXd& obs, std::span<const int> actions, const Eigen::VectorXd& targets) const;
  /// Same loss; writes d loss / d parameters into `grad` (resized to parameter_count()).
  double loss_and_gradient(const Eigen::MatrixXd& obs, std::span<const int> actions, const Eigen::VectorXd& targets,
                           std::vector<double>& grad) const;

  friend bool operator==(const ValueApproximator&, const ValueApproximator&) = default;

 private:
  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  struct Offsets {
    std::size_t w1, b1, w2, b2, w3, b3, total;
  };
  Offsets offsets() const;

  int input_ = 0;
  int hidden_ = 0;
  int outputs_ = 0;
  std::vector<double> params_;
};

/// Adam on the flat parameter buffer.
class Adam {
 public:
  explicit Adam(double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(std::span<double> params, std::span<const double> grad);
  std::int64_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace ave::learn
