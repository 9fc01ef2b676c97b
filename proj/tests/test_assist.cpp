#include <gtest/gtest.h>

#include <limits>
#include <numeric>

#include "ave/assist.hpp"
#include "ave/errors.hpp"

namespace ave::assist {
namespace {

GridScenario open_grid(Cell human, Cell goal) {
  GridScenario s;
  s.human = human;
  s.goal = goal;
  return s;
}

TEST(BeliefUpdate, ShiftsTowardGoalsTheHumanApproaches) {
  const auto s = open_grid({2, 2}, {0, 2});
  const auto prior = GoalBelief::uniform({{0, 2}, {5, 2}});
  const auto post = belief_update(prior, s, {1, 2}, 2.0);
  EXPECT_FALSE(post.reset);
  // progress +1 toward (0,2), -1 toward (5,2): ratio e^(2*beta)
  EXPECT_NEAR(post.belief.probs[0] / post.belief.probs[1], std::exp(4.0), 1e-9);
  EXPECT_NEAR(std::accumulate(post.belief.probs.begin(), post.belief.probs.end(), 0.0), 1.0, 1e-12);
}

TEST(BeliefUpdate, ZeroBetaKeepsPrior) {
  const auto s = open_grid({2, 2}, {0, 2});
  const auto prior = GoalBelief::uniform({{0, 0}, {5, 5}, {0, 5}});
  EXPECT_EQ(belief_update(prior, s, {2, 3}, 0.0).belief.probs, prior.probs);
}

TEST(BeliefUpdate, ResetsWhenEveryLikelihoodVanishes) {
  const auto s = open_grid({2, 2}, {0, 2});
  GoalBelief b{{{0, 2}, {5, 2}}, {1.0, 0.0}};
  const auto post = belief_update(b, s, {3, 2}, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(post.reset);
  EXPECT_EQ(post.belief.probs, (std::vector<double>{0.5, 0.5}));
}

TEST(BeliefUpdate, IllegalObservationThrows) {
  const auto s = open_grid({2, 2}, {0, 2});
  EXPECT_THROW(belief_update(GoalBelief::uniform({{0, 2}}), s, {4, 4}, 1.0), ContractViolation);
}

TEST(OracleAction, ClearsTheRouteAndLetsTheHumanReachTheGoal) {
  for (int corner = 0; corner < 4; ++corner) {
    auto s = grid::corner_trap(6, 6, corner, {2, 3});
    for (int step = 0; step < 30 && s.human != s.goal; ++step) {
      s = grid::apply_agent_action(s, oracle_action(s, s.goal));
      s = grid::human_step(s);
    }
    EXPECT_EQ(s.human, s.goal) << corner;
  }
}

TEST(OracleAction, NoopWhenRouteIsClear) {
  const auto s = open_grid({0, 0}, {0, 4});
  EXPECT_EQ(oracle_action(s, s.goal), AgentAction::noop());
}

TEST(EmpowermentGreedy, FreesTrappedHuman) {
  const auto s = grid::corner_trap(6, 6, 0, {5, 5});
  emp::EmpowermentQuery q;
  q.horizon = 3;
  SeededRng rng(1);
  const auto choice = empowerment_greedy_choice(s, q, rng);
  EXPECT_NE(choice.action, AgentAction::noop());
  EXPECT_GT(choice.value, 0.0);
  EXPECT_EQ(choice.candidates.size(), choice.values.size());
}

TEST(CopilotIntervene, KeepsNearOptimalUserAction) {
  const std::vector<double> q{0.0, 1.0, 2.0, 3.0, 4.0, 10.0};
  CopilotConfig c;
  c.alpha = 0.3;
  // threshold = 10 - 0.3*10 = 7
  EXPECT_EQ(copilot_intervene({4}, q, c).executed.index, 5);
  EXPECT_TRUE(copilot_intervene({4}, q, c).intervened);
  EXPECT_FALSE(copilot_intervene({5}, q, c).intervened);
  c.alpha = 0.6;
  EXPECT_FALSE(copilot_intervene({4}, q, c).intervened);
}

TEST(CopilotIntervene, AlphaOneNeverIntervenes) {
  CopilotConfig c;
  c.alpha = 1.0;
  SeededRng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> q(6);
    for (auto& v : q) v = rng.uniform() * 20 - 10;
    const ActionId u{rng.uniform_int(6)};
    const auto r = copilot_intervene(u, q, c);
    ASSERT_FALSE(r.intervened);
    ASSERT_EQ(r.executed, u);
  }
}

TEST(CopilotIntervene, WrongWidthThrows) {
  const std::vector<double> q{1.0, 2.0};
  EXPECT_THROW(copilot_intervene({0}, q, CopilotConfig{}), ContractViolation);
}

TEST(Pilots, NoopAndSensorAndOptimal) {
  const lander::LanderParams p;
  lander::LanderState s;
  s.goal_x = 0.5;
  SeededRng rng(1);
  EXPECT_EQ(pilot_act({PilotKind::noop}, {3}, {0}, s, p, rng), lander::kAllOff);
  EXPECT_EQ(pilot_act({PilotKind::optimal}, {4}, {0}, s, p, rng).index, 4);
  // goal to the right: fire the right thruster
  EXPECT_EQ(pilot_act({PilotKind::sensor}, {3}, {0}, s, p, rng).index, 2);
  s.goal_x = -0.5;
  EXPECT_EQ(pilot_act({PilotKind::sensor}, {3}, {0}, s, p, rng).index, 1);
}

TEST(Pilots, NoisyReplacesWithADifferentAction) {
  const lander::LanderParams p;
  const lander::LanderState s;
  SeededRng rng(2);
  PilotConfig c{PilotKind::noisy};
  int changed = 0;
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) changed += pilot_act(c, {3}, {0}, s, p, rng).index != 3;
  const double sigma = std::sqrt(kDraws * c.noise_prob * (1 - c.noise_prob));
  EXPECT_LT(std::abs(changed - kDraws * c.noise_prob), 3 * sigma);
}

TEST(Pilots, LaggyRepeatsPreviousAction) {
  const lander::LanderParams p;
  const lander::LanderState s;
  SeededRng rng(3);
  PilotConfig c{PilotKind::laggy};
  int repeats = 0;
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) repeats += pilot_act(c, {3}, {1}, s, p, rng).index == 1;
  const double sigma = std::sqrt(kDraws * c.lag_prob * (1 - c.lag_prob));
  EXPECT_LT(std::abs(repeats - kDraws * c.lag_prob), 3 * sigma);
}

TEST(Pilots, ParseNames) {
  EXPECT_EQ(parse_pilot_kind("full"), PilotKind::optimal);
  EXPECT_EQ(parse_pilot_kind(to_string(PilotKind::sensor)), PilotKind::sensor);
  EXPECT_THROW(parse_pilot_kind("drunk"), ConfigError);
}

}  // namespace
}  // namespace ave::assist
