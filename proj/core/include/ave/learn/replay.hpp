#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ave/rng.hpp"

namespace ave::learn {

struct Batch {
  Eigen::MatrixXd obs;       // obs_dim x B
  std::vector<int> actions;  // B
  Eigen::VectorXd rewards;   // B
  Eigen::MatrixXd next_obs;  // obs_dim x B
  std::vector<std::uint8_t> done;
  std::vector<std::size_t> indices;  // slots the rows came from
  std::size_t size() const { return actions.size(); }
};

/// Fixed-capacity ring of (obs, action, reward, next_obs, done).
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim);

  void push(std::span<const double> obs, int action, double reward, std::span<const double> next_obs, bool done);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  int obs_dim() const { return obs_dim_; }

  /// `batch` distinct slots, uniformly at random (Floyd's algorithm).
  /// Requires 1 <= batch <= size().
  Batch sample(std::size_t batch, SeededRng& rng) const;

 private:
  std::size_t capacity_;
  int obs_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;
  std::vector<double> obs_, next_obs_, rewards_;
  std::vector<int> actions_;
  std::vector<std::uint8_t> done_;
};

}  // namespace ave::learn
