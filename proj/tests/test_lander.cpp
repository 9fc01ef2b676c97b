#include <gtest/gtest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "ave/errors.hpp"
#include "ave/lander.hpp"

namespace ave::lander {
namespace {

TEST(LanderAction, IndexTable) {
  const LanderAction table[] = {{false, Lateral::off}, {false, Lateral::left}, {false, Lateral::right},
                                {true, Lateral::off},  {true, Lateral::left},  {true, Lateral::right}};
  for (int i = 0; i < LanderAction::kCount; ++i) {
    EXPECT_EQ(LanderAction::from_id({i}), table[i]);
    EXPECT_EQ(table[i].id().index, i);
  }
  EXPECT_THROW(LanderAction::from_id({6}), ContractViolation);
  EXPECT_THROW(LanderAction::from_id({-1}), ContractViolation);
}

TEST(LanderAction, SharedKeyFixture) {
  std::ifstream in(std::string(AVE_FIXTURES_DIR) + "/action_table.json");
  ASSERT_TRUE(in);
  const auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j.at("key_states").size(), 8u);
  for (const auto& k : j.at("key_states")) {
    const bool left = k.at("left").get<bool>();
    const bool right = k.at("right").get<bool>();
    const Lateral lat = left == right ? Lateral::off : left ? Lateral::left : Lateral::right;
    EXPECT_EQ(LanderAction({k.at("up").get<bool>(), lat}).id().index, k.at("action").get<int>()) << k.dump();
  }
}

TEST(LanderStep, FreeFallAccelerates) {
  LanderParams p;
  LanderState s;
  s.y = 1.0;
  const auto out = lander_step(s, {}, p);
  EXPECT_LT(out.next_state.vy, 0.0);
  EXPECT_FALSE(out.done);
  EXPECT_EQ(out.next_state.step_count, 1);
}

TEST(LanderStep, MainEngineBeatsGravity) {
  LanderParams p;
  LanderState s;
  s.y = 1.0;
  const auto out = lander_step(s, {true, Lateral::off}, p);
  EXPECT_GT(out.next_state.vy, 0.0);
}

TEST(LanderStep, LateralThrustersPush) {
  LanderParams p;
  LanderState s;
  s.y = 1.0;
  EXPECT_GT(lander_step(s, {false, Lateral::right}, p).next_state.vx, 0.0);
  EXPECT_LT(lander_step(s, {false, Lateral::left}, p).next_state.vx, 0.0);
}

TEST(LanderStep, ThrowsAfterTermination) {
  LanderParams p;
  LanderState s;
  s.x = 1.5;
  EXPECT_THROW(lander_step(s, {}, p), ContractViolation);
}

TEST(ClassifyOutcome, Labels) {
  LanderParams p;
  LanderState s;
  s.y = 0.0;
  s.left_contact = s.right_contact = true;
  s.goal_x = 0.0;
  EXPECT_EQ(classify_outcome(s, p), Outcome::landed_at_goal);
  s.x = 0.5;
  EXPECT_EQ(classify_outcome(s, p), Outcome::landed_off_goal);
  s.vy = -1.0;
  EXPECT_EQ(classify_outcome(s, p), Outcome::crash);
  LanderState one_leg;
  one_leg.left_contact = true;
  EXPECT_EQ(classify_outcome(one_leg, p), Outcome::crash);
  LanderState out;
  out.x = -1.01;
  EXPECT_EQ(classify_outcome(out, p), Outcome::out_of_bounds);
  LanderState late;
  late.step_count = p.max_steps;
  EXPECT_EQ(classify_outcome(late, p), Outcome::timeout);
  EXPECT_EQ(classify_outcome(LanderState{}, p), std::nullopt);
}

TEST(LanderEpisode, UncontrolledFallCrashesOrTimesOut) {
  const LanderEnv env;
  SeededRng rng(4);
  for (int ep = 0; ep < 5; ++ep) {
    auto s = reset(env.params(), rng);
    StepOutcome<LanderState> out{s};
    while (!env.is_terminal(s)) {
      out = env.step(s, kAllOff);
      s = out.next_state;
    }
    EXPECT_TRUE(out.done);
    const auto o = classify_outcome(s, env.params());
    ASSERT_TRUE(o.has_value());
    EXPECT_NE(*o, Outcome::landed_at_goal);
  }
}

TEST(Reset, DeterministicAndWithinRanges) {
  const LanderParams p;
  SeededRng a(12), b(12);
  for (int i = 0; i < 20; ++i) {
    const auto s = reset(p, a);
    EXPECT_EQ(s, reset(p, b));
    EXPECT_DOUBLE_EQ(s.y, p.start_y);
    EXPECT_LE(std::abs(s.x), p.start_x_range);
    EXPECT_LE(std::abs(s.goal_x), p.goal_range);
  }
}

TEST(ActionMemory, NewestFirstBounded) {
  ActionMemory m(3);
  for (int i = 0; i < 5; ++i) m.push({i});
  ASSERT_EQ(m.size(), 3u);
  const auto items = m.items();
  EXPECT_EQ(items[0].index, 4);
  EXPECT_EQ(items[2].index, 2);
  m.clear();
  EXPECT_EQ(m.size(), 0u);
}

TEST(EncodeObservation, PilotSeesGoalCopilotDoesNot) {
  LanderState s;
  s.goal_x = 0.42;
  const auto pilot = encode_observation(s, Role::pilot, {});
  ASSERT_EQ(pilot.size(), static_cast<std::size_t>(kPilotObsDims));
  EXPECT_DOUBLE_EQ(pilot.back(), 0.42);

  const std::vector<ActionId> mem{{5}, {0}};
  const auto co = encode_observation(s, Role::copilot, mem);
  ASSERT_EQ(co.size(), static_cast<std::size_t>(kCopilotObsDims));
  for (double v : co) EXPECT_NE(v, 0.42);
  // slot 0 = action 5, slot 1 = action 0, slot 2 = null token
  EXPECT_EQ(co[kPhysicalDims + 5], 1.0);
  EXPECT_EQ(co[kPhysicalDims + kMemoryTokens + 0], 1.0);
  EXPECT_EQ(co[kPhysicalDims + 2 * kMemoryTokens + LanderAction::kCount], 1.0);
  double ones = 0;
  for (std::size_t i = kPhysicalDims; i < co.size(); ++i) ones += co[i];
  EXPECT_EQ(ones, kMemorySlots);
}

TEST(LanderEnv, SerializeRoundTrip) {
  const LanderEnv env;
  SeededRng rng(2);
  auto s = reset(env.params(), rng);
  s = env.step(s, {4}).next_state;
  const auto bytes = env.serialize(s);
  EXPECT_EQ(LanderEnv::deserialize(bytes), s);
  EXPECT_EQ(env.features(s, FeatureSelector::position), (std::vector<double>{s.x, s.y}));
}

TEST(LanderParams, Validate) {
  LanderParams p;
  p.start_y = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace ave::lander
