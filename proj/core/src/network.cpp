#include "ave/learn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "ave/errors.hpp"

namespace ave::learn {

ValueApproximator::ValueApproximator(int input_dim, int hidden, int outputs, SeededRng& rng)
    : input_(input_dim), hidden_(hidden), outputs_(outputs) {
  if (input_dim < 1 || hidden < 1 || outputs < 1) throw ConfigError("network dimensions must be positive");
  const Offsets o = offsets();
  params_.assign(o.total, 0.0);
  auto fill = [&](std::size_t begin, std::size_t count, int fan_in) {
    const double limit = std::sqrt(6.0 / fan_in);
    for (std::size_t i = 0; i < count; ++i) params_[begin + i] = rng.uniform(-limit, limit);
  };
  fill(o.w1, o.b1 - o.w1, input_);
  fill(o.w2, o.b2 - o.w2, hidden_);
  fill(o.w3, o.b3 - o.w3, hidden_);
}

ValueApproximator::Offsets ValueApproximator::offsets() const {
  Offsets o{};
  const auto in = static_cast<std::size_t>(input_);
  const auto h = static_cast<std::size_t>(hidden_);
  const auto out = static_cast<std::size_t>(outputs_);
  o.w1 = 0;
  o.b1 = o.w1 + h * in;
  o.w2 = o.b1 + h;
  o.b2 = o.w2 + h * h;
  o.w3 = o.b2 + h;
  o.b3 = o.w3 + out * h;
  o.total = o.b3 + out;
  return o;
}

void ValueApproximator::set_parameters(std::span<const double> values) {
  if (values.size() != params_.size()) throw ContractViolation("parameter count mismatch");
  params_.assign(values.begin(), values.end());
}

Eigen::VectorXd ValueApproximator::predict(std::span<const double> obs) const {
  if (obs.size() != static_cast<std::size_t>(input_)) throw ContractViolation("observation size mismatch");
  Eigen::Map<const Eigen::MatrixXd> x(obs.data(), input_, 1);
  return predict_batch(x);
}

Eigen::MatrixXd ValueApproximator::predict_batch(const Eigen::MatrixXd& obs) const {
  if (obs.rows() != input_) throw ContractViolation("observation size mismatch");
  const Offsets o = offsets();
  const double* p = params_.data();
  ConstMatMap w1(p + o.w1, hidden_, input_), w2(p + o.w2, hidden_, hidden_), w3(p + o.w3, outputs_, hidden_);
  ConstVecMap b1(p + o.b1, hidden_), b2(p + o.b2, hidden_), b3(p + o.b3, outputs_);
  Eigen::MatrixXd h1 = ((w1 * obs).colwise() + b1).cwiseMax(0.0);
  Eigen::MatrixXd h2 = ((w2 * h1).colwise() + b2).cwiseMax(0.0);
  return (w3 * h2).colwise() + b3;
}

double ValueApproximator::loss(const Eigen::MatrixXd& obs, std::span<const int> actions,
                               const Eigen::VectorXd& targets) const {
  const Eigen::MatrixXd q = predict_batch(obs);
  const auto n = static_cast<Eigen::Index>(actions.size());
  if (q.cols() != n || targets.size() != n) throw ContractViolation("batch size mismatch");
  double sum = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    const double err = q(actions[static_cast<std::size_t>(b)], b) - targets(b);
    sum += err * err;
  }
  return sum / static_cast<double>(n);
}

double ValueApproximator::loss_and_gradient(const Eigen::MatrixXd& obs, std::span<const int> actions,
                                            const Eigen::VectorXd& targets, std::vector<double>& grad) const {
  const auto n = static_cast<Eigen::Index>(actions.size());
  if (obs.rows() != input_ || obs.cols() != n || targets.size() != n) throw ContractViolation("batch size mismatch");
  const Offsets o = offsets();
  const double* p = params_.data();
  ConstMatMap w1(p + o.w1, hidden_, input_), w2(p + o.w2, hidden_, hidden_), w3(p + o.w3, outputs_, hidden_);
  ConstVecMap b1(p + o.b1, hidden_), b2(p + o.b2, hidden_), b3(p + o.b3, outputs_);

  const Eigen::MatrixXd z1 = (w1 * obs).colwise() + b1;
  const Eigen::MatrixXd h1 = z1.cwiseMax(0.0);
  const Eigen::MatrixXd z2 = (w2 * h1).colwise() + b2;
  const Eigen::MatrixXd h2 = z2.cwiseMax(0.0);
  const Eigen::MatrixXd q = (w3 * h2).colwise() + b3;

  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(outputs_, n);
  double sum = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    const int a = actions[static_cast<std::size_t>(b)];
    if (a < 0 || a >= outputs_) throw ContractViolation("action index out of range");
    const double err = q(a, b) - targets(b);
    sum += err * err;
    dq(a, b) = 2.0 * err / static_cast<double>(n);
  }

  grad.assign(o.total, 0.0);
  double* g = grad.data();
  MatMap(g + o.w3, outputs_, hidden_) = dq * h2.transpose();
  Eigen::Map<Eigen::VectorXd>(g + o.b3, outputs_) = dq.rowwise().sum();
  const Eigen::MatrixXd dz2 = (w3.transpose() * dq).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  MatMap(g + o.w2, hidden_, hidden_) = dz2 * h1.transpose();
  Eigen::Map<Eigen::VectorXd>(g + o.b2, hidden_) = dz2.rowwise().sum();
  const Eigen::MatrixXd dz1 = (w2.transpose() * dz2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  MatMap(g + o.w1, hidden_, input_) = dz1 * obs.transpose();
  Eigen::Map<Eigen::VectorXd>(g + o.b1, hidden_) = dz1.rowwise().sum();
  return sum / static_cast<double>(n);
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) throw ContractViolation("gradient size mismatch");
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace ave::learn
