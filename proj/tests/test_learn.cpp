#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "ave/errors.hpp"
#include "ave/learn/copilot.hpp"
#include "ave/learn/dqn.hpp"

namespace ave::learn {
namespace {

ValueApproximator random_net(int in, int hidden, int out, std::uint64_t seed) {
  SeededRng rng(seed);
  ValueApproximator net(in, hidden, out, rng);
  std::vector<double> p(net.parameter_count());
  for (auto& v : p) v = rng.uniform() * 2.0 - 1.0;
  net.set_parameters(p);
  return net;
}

TEST(ValueApproximator, GradientMatchesCentralDifferences) {
  for (auto [in, hidden, out] : {std::tuple{3, 4, 2}, std::tuple{1, 2, 3}, std::tuple{5, 3, 1}}) {
    auto net = random_net(in, hidden, out, 17 + in);
    SeededRng rng(99);
    constexpr int kBatch = 4;
    Eigen::MatrixXd obs(in, kBatch);
    for (Eigen::Index i = 0; i < obs.size(); ++i) obs.data()[i] = rng.uniform() * 2 - 1;
    std::vector<int> acts(kBatch);
    for (auto& a : acts) a = rng.uniform_int(out);
    Eigen::VectorXd targets(kBatch);
    for (auto& t : targets) t = rng.uniform();

    std::vector<double> grad;
    net.loss_and_gradient(obs, acts, targets, grad);
    std::vector<double> p(net.parameters().begin(), net.parameters().end());
    constexpr double h = 1e-6;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double keep = p[k];
      p[k] = keep + h;
      net.set_parameters(p);
      const double up = net.loss(obs, acts, targets);
      p[k] = keep - h;
      net.set_parameters(p);
      const double down = net.loss(obs, acts, targets);
      p[k] = keep;
      net.set_parameters(p);
      const double fd = (up - down) / (2 * h);
      EXPECT_NEAR(grad[k], fd, 1e-4 * std::max(std::abs(fd), 1e-4)) << "param " << k;
    }
  }
}

TEST(ValueApproximator, PredictBatchMatchesSingle) {
  const auto net = random_net(4, 8, 3, 2);
  Eigen::MatrixXd obs = Eigen::MatrixXd::Random(4, 5);
  const auto batch = net.predict_batch(obs);
  for (int c = 0; c < 5; ++c) {
    std::vector<double> col(obs.col(c).data(), obs.col(c).data() + 4);
    EXPECT_TRUE(batch.col(c).isApprox(net.predict(col), 1e-12));
  }
}

TEST(TdTarget, DoneIgnoresBootstrap) {
  const auto net = random_net(2, 4, 3, 5);
  const std::vector<double> next{0.3, -0.2};
  EXPECT_EQ(td_target(1.5, next, true, net, 0.9), 1.5);
  const auto q = net.predict(next);
  EXPECT_NEAR(td_target(1.5, next, false, net, 0.9), 1.5 + 0.9 * q.maxCoeff(), 1e-12);
}

TEST(TrainStep, ConvergesOnTerminalTransition) {
  SeededRng rng(4);
  ValueApproximator q(8, 16, 6, rng);
  const ValueApproximator target = q;
  Adam adam(1e-3);
  ReplayBuffer buf(4, 8);
  const std::vector<double> obs{0.1, 0.2, -0.3, 0.4, 0.0, 0.5, -0.1, 0.2};
  buf.push(obs, 2, 1.0, obs, true);
  const auto batch = buf.sample(1, rng);
  double err = 1.0;
  for (int i = 0; i < 500 && err >= 1e-3; ++i) {
    train_step(q, target, batch, 0.99, adam);
    err = std::abs(q.predict(obs)[2] - 1.0);
  }
  EXPECT_LT(err, 1e-3);
}

TEST(ReplayBuffer, RingOverwritesOldest) {
  ReplayBuffer buf(3, 1);
  for (int i = 0; i < 5; ++i) {
    const std::vector<double> o{static_cast<double>(i)};
    buf.push(o, 0, i, o, false);
  }
  EXPECT_EQ(buf.size(), 3u);
  SeededRng rng(1);
  const auto b = buf.sample(3, rng);
  std::vector<double> rewards(b.rewards.data(), b.rewards.data() + 3);
  std::sort(rewards.begin(), rewards.end());
  EXPECT_EQ(rewards, (std::vector<double>{2, 3, 4}));
  EXPECT_THROW(buf.sample(4, rng), ContractViolation);
}

TEST(ReplayBuffer, SamplingIsUniform) {
  constexpr int kSlots = 50;
  ReplayBuffer buf(kSlots, 1);
  for (int i = 0; i < kSlots; ++i) {
    const std::vector<double> o{0.0};
    buf.push(o, 0, 0.0, o, false);
  }
  SeededRng rng(6);
  std::vector<int> counts(kSlots, 0);
  constexpr int kBatches = 10000, kBatch = 10;
  for (int i = 0; i < kBatches; ++i)
    for (auto idx : buf.sample(kBatch, rng).indices) ++counts[idx];
  const double n = kBatches * kBatch;
  const double p = 1.0 / kSlots;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_LT(std::abs(c - n * p), 3.5 * sigma);
}

TEST(Checkpoint, RoundTripAndCorruption) {
  const auto net = random_net(6, 5, 4, 8);
  auto bytes = encode_checkpoint(net);
  EXPECT_EQ(decode_checkpoint(bytes), net);

  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), IoError);
  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  EXPECT_ANY_THROW(decode_checkpoint(truncated));
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(decode_checkpoint(trailing), IoError);

  const auto path = std::filesystem::temp_directory_path() / "ave_test_ckpt.bin";
  save_checkpoint(path, net);
  EXPECT_EQ(load_checkpoint(path), net);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path), IoError);
}

TEST(AugmentedReward, AffineInCoefficient) {
  RewardSpec spec;
  for (double c : {0.0, 0.001, 0.5, 2.0}) {
    spec.c_emp = c;
    EXPECT_DOUBLE_EQ(augmented_reward(-3.0, 4.0, spec), -3.0 + 4.0 * c);
  }
  spec.c_emp = -1.0;
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(TrainSchedule, EpsilonDecaysLinearlyThenHolds) {
  TrainSchedule s;
  s.episodes = 100;
  s.epsilon_decay_fraction = 0.5;
  EXPECT_DOUBLE_EQ(s.epsilon(0), 1.0);
  EXPECT_DOUBLE_EQ(s.epsilon(25), 1.0 + (0.05 - 1.0) * 0.5);
  EXPECT_NEAR(s.epsilon(50), 0.05, 1e-12);
  EXPECT_NEAR(s.epsilon(99), 0.05, 1e-12);
  s.epsilon_decay_fraction = 0.0;
  EXPECT_DOUBLE_EQ(s.epsilon(0), 0.05);
}

TrainSchedule tiny_schedule() {
  TrainSchedule s;
  s.episodes = 3;
  s.max_steps = 60;
  s.learning_starts = 32;
  s.batch_size = 16;
  s.hidden = 8;
  s.target_sync_interval = 20;
  return s;
}

TEST(TrainCopilot, DeterministicForSeed) {
  const lander::LanderEnv env;
  RewardSpec reward;
  reward.emp_query.n_rollouts = 4;
  reward.emp_query.horizon = 5;
  const SimulatedPilot pilot({assist::PilotKind::sensor}, nullptr, env.params());
  const auto a = train_copilot(env, pilot, {}, reward, tiny_schedule(), SeededRng(3));
  const auto b = train_copilot(env, pilot, {}, reward, tiny_schedule(), SeededRng(3));
  EXPECT_EQ(a.net, b.net);
  ASSERT_EQ(a.curve.size(), 3u);
  for (std::size_t i = 0; i < a.curve.size(); ++i) EXPECT_EQ(a.curve[i].ret, b.curve[i].ret);
  EXPECT_FALSE(a.error.has_value());
}

TEST(TrainCopilot, ZeroCoefficientIgnoresBonusInReturns) {
  const lander::LanderEnv env;
  RewardSpec reward;
  reward.emp_query.n_rollouts = 4;
  reward.emp_query.horizon = 5;
  reward.c_emp = 0.0;
  const SimulatedPilot pilot({assist::PilotKind::noop}, nullptr, env.params());
  auto s = tiny_schedule();
  s.learning_starts = 100000;
  const auto r = train_copilot(env, pilot, {}, reward, s, SeededRng(1));
  for (const auto& e : r.curve) EXPECT_TRUE(std::isfinite(e.ret));
}

TEST(CopilotDecide, RecordsUserActionFirst) {
  SeededRng rng(1);
  const ValueApproximator q(lander::kCopilotObsDims, 8, 6, rng);
  lander::ActionMemory mem(lander::kMemorySlots);
  assist::CopilotConfig cfg;
  cfg.alpha = 1.0;
  const auto d = copilot_decide(q, lander::LanderState{}, mem, {4}, cfg);
  EXPECT_EQ(mem.size(), 1u);
  EXPECT_EQ(mem.items()[0].index, 4);
  EXPECT_EQ(d.intervention.executed.index, 4);
  EXPECT_EQ(d.obs[lander::kPhysicalDims + 4], 1.0);
}

}  // namespace
}  // namespace ave::learn
