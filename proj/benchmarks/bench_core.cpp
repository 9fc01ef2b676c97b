#include <benchmark/benchmark.h>

#include "ave/empowerment.hpp"
#include "ave/gridworld.hpp"
#include "ave/lander.hpp"
#include "ave/learn/dqn.hpp"

namespace {

using namespace ave;

void BM_BlahutArimotoIdentity(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) rows[i][i] = 1.0;
  const auto ch = emp::ChannelModel::from_matrix(rows);
  for (auto _ : st) benchmark::DoNotOptimize(emp::blahut_arimoto(ch).capacity);
}
BENCHMARK(BM_BlahutArimotoIdentity)->Arg(4)->Arg(32)->Arg(128);

void BM_GridExactEmpowerment(benchmark::State& st) {
  grid::GridScenario s;
  s.human = {2, 2};
  s.goal = {5, 5};
  emp::EmpowermentQuery q;
  q.horizon = static_cast<int>(st.range(0));
  const grid::HumanProbeEnv env(s);
  SeededRng rng(1);
  for (auto _ : st) benchmark::DoNotOptimize(emp::exact_empowerment(env, s.human, q, rng));
}
BENCHMARK(BM_GridExactEmpowerment)->DenseRange(1, 5);

void BM_LanderDiversityBonus(benchmark::State& st) {
  const lander::LanderEnv env;
  SeededRng rng(3);
  const auto s = lander::reset(env.params(), rng);
  const auto q = learn::RewardSpec::lander_bonus_query();
  for (auto _ : st) benchmark::DoNotOptimize(emp::diversity_bonus(env, s, q, rng));
}
BENCHMARK(BM_LanderDiversityBonus);

void BM_LanderStep(benchmark::State& st) {
  const lander::LanderEnv env;
  SeededRng rng(4);
  auto s = lander::reset(env.params(), rng);
  const auto start = s;
  for (auto _ : st) {
    auto out = env.step(s, ActionId{3});
    s = out.done ? start : out.next_state;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_LanderStep);

void BM_NetworkForward(benchmark::State& st) {
  SeededRng rng(5);
  const learn::ValueApproximator net(lander::kCopilotObsDims, 64, 6, rng);
  std::vector<double> obs(lander::kCopilotObsDims, 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(net.predict(obs));
}
BENCHMARK(BM_NetworkForward);

void BM_NetworkBackward(benchmark::State& st) {
  SeededRng rng(6);
  const learn::ValueApproximator net(lander::kCopilotObsDims, 64, 6, rng);
  const int batch = static_cast<int>(st.range(0));
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Random(lander::kCopilotObsDims, batch);
  std::vector<int> acts(batch);
  for (auto& a : acts) a = rng.uniform_int(6);
  const Eigen::VectorXd targets = Eigen::VectorXd::Random(batch);
  std::vector<double> grad;
  for (auto _ : st) benchmark::DoNotOptimize(net.loss_and_gradient(obs, acts, targets, grad));
}
BENCHMARK(BM_NetworkBackward)->Arg(1)->Arg(64);

void BM_SeededRngConstructAndDraw(benchmark::State& st) {
  std::uint64_t seed = 0;
  for (auto _ : st) {
    SeededRng r(++seed);
    benchmark::DoNotOptimize(r.next_u64());
  }
}
BENCHMARK(BM_SeededRngConstructAndDraw);

}  // namespace

BENCHMARK_MAIN();
