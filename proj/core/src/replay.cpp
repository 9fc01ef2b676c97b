#include "ave/learn/replay.hpp"

#include <algorithm>

#include "ave/errors.hpp"

namespace ave::learn {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim) : capacity_(capacity), obs_dim_(obs_dim) {
  if (capacity == 0 || obs_dim < 1) throw ConfigError("replay buffer needs positive capacity and obs_dim");
  const auto d = static_cast<std::size_t>(obs_dim);
  obs_.resize(capacity * d);
  next_obs_.resize(capacity * d);
  rewards_.resize(capacity);
  actions_.resize(capacity);
  done_.resize(capacity);
}

void ReplayBuffer::push(std::span<const double> obs, int action, double reward, std::span<const double> next_obs,
                        bool done) {
  const auto d = static_cast<std::size_t>(obs_dim_);
  if (obs.size() != d || next_obs.size() != d) throw ContractViolation("transition observation size mismatch");
  std::copy(obs.begin(), obs.end(), obs_.begin() + static_cast<std::ptrdiff_t>(head_ * d));
  std::copy(next_obs.begin(), next_obs.end(), next_obs_.begin() + static_cast<std::ptrdiff_t>(head_ * d));
  rewards_[head_] = reward;
  actions_[head_] = action;
  done_[head_] = done ? 1 : 0;
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

Batch ReplayBuffer::sample(std::size_t batch, SeededRng& rng) const {
  if (batch < 1 || batch > size_) throw ContractViolation("batch size must be in [1, buffer size]");
  std::vector<std::size_t> picked;
  picked.reserve(batch);
  for (std::size_t j = size_ - batch; j < size_; ++j) {
    const std::size_t t = rng.below(j + 1);
    if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
    else picked.push_back(j);
  }

  const auto d = static_cast<Eigen::Index>(obs_dim_);
  Batch b;
  b.obs.resize(d, static_cast<Eigen::Index>(batch));
  b.next_obs.resize(d, static_cast<Eigen::Index>(batch));
  b.rewards.resize(static_cast<Eigen::Index>(batch));
  b.actions.resize(batch);
  b.done.resize(batch);
  b.indices = picked;
  for (std::size_t k = 0; k < batch; ++k) {
    const std::size_t slot = picked[k];
    const auto col = static_cast<Eigen::Index>(k);
    b.obs.col(col) = Eigen::Map<const Eigen::VectorXd>(obs_.data() + slot * static_cast<std::size_t>(d), d);
    b.next_obs.col(col) = Eigen::Map<const Eigen::VectorXd>(next_obs_.data() + slot * static_cast<std::size_t>(d), d);
    b.rewards(col) = rewards_[slot];
    b.actions[k] = actions_[slot];
    b.done[k] = done_[slot];
  }
  return b;
}

}  // namespace ave::learn
