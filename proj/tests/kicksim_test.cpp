#include "kickrl/kicksim.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "kickrl/verify.hpp"

namespace kickrl {
namespace {

// Ball straight ahead on +X, rolling toward the robot.
SceneState HeadOnScene(double ball_x, double ball_speed) {
  SceneState s;
  s.robot = Pose2D(0, 0, 0);
  s.target = {3, 0};
  s.ball_pos = {ball_x, 0};
  s.ball_vel = {-ball_speed, 0};
  return s;
}

struct Episode {
  std::vector<StepOutcome> steps;
  double total = 0.0;
};

Episode Play(SceneState s, const std::vector<Action>& actions, const SimConfig& cfg) {
  Episode ep;
  ReturnAccumulator total;
  for (std::size_t i = 0; s.step_index < cfg.episode_steps; ++i) {
    ep.steps.push_back(step(s, actions[i % actions.size()], cfg));
    total.add(ep.steps.back().reward);
    s = ep.steps.back().next;
  }
  ep.total = total.total();
  return ep;
}

std::vector<Action> RandomActions(Rng& rng, int n) {
  std::vector<Action> a;
  for (int i = 0; i < n; ++i) a.push_back(action_from_index(static_cast<int>(rng.uniform_index(3))));
  return a;
}

TEST(Reset, BallSpawnsAtTwoMeters) {
  const SimConfig cfg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const SceneState s = reset(rng, cfg);
    EXPECT_NEAR((s.ball_pos - s.robot.position()).norm(), 2.0, 1e-9);
  }
}

TEST(Reset, RobotFacesTarget) {
  const SimConfig cfg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const SceneState s = reset(rng, cfg);
    EXPECT_NEAR(relative_heading(angle_of(s.target - s.robot.position()), s.robot.theta()), 0.0,
                1e-9);
    EXPECT_EQ(s.target, (Vec2{3.0, 0.0}));
    EXPECT_FALSE(s.contact_made);
    EXPECT_EQ(s.step_index, 0);
    EXPECT_EQ(s.robot_speed, 0.0);
  }
}

TEST(Reset, BallAimedInsideAimDiscWithSpeedInRange) {
  const SimConfig cfg;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed);
    const SceneState s = reset(rng, cfg);
    const double speed = s.ball_vel.norm();
    EXPECT_GE(speed, cfg.ball_speed_min - 1e-12);
    EXPECT_LE(speed, cfg.ball_speed_max + 1e-12);
    // Closest approach of the ball's line to the robot.
    const Vec2 u = (1.0 / speed) * s.ball_vel;
    const Vec2 rel = s.robot.position() - s.ball_pos;
    const double along = rel.dot(u);
    EXPECT_GT(along, 0.0);
    EXPECT_LE((rel - along * u).norm(), cfg.ball_aim_radius + 1e-9);
  }
}

TEST(Reset, SameSeedBitIdentical) {
  Rng a(42), b(42);
  EXPECT_EQ(reset(a, SimConfig{}), reset(b, SimConfig{}));
  EXPECT_EQ(a, b);
}

TEST(Step, StopKeepsRobotAndPaysPenalty) {
  SimConfig cfg;
  const SceneState s = HeadOnScene(1.9, 0.0);
  const StepOutcome out = step(s, Action::Stop, cfg);
  EXPECT_NEAR(out.next.robot.x(), s.robot.x(), 1e-12);
  EXPECT_NEAR(out.next.robot.y(), s.robot.y(), 1e-12);
  EXPECT_EQ(out.reward, -0.1);
  EXPECT_FALSE(out.first_contact);
  EXPECT_FALSE(out.contact_angle.has_value());
  EXPECT_FALSE(out.contact_speed.has_value());
}

TEST(Step, ForwardMovesFullSpeedTimesDt) {
  SimConfig cfg;
  cfg.dt = 0.05;
  const SceneState s = HeadOnScene(1.9, 0.0);
  const StepOutcome out = step(s, Action::Forward, cfg);
  EXPECT_NEAR(out.next.robot.x(), 0.1275, 1e-15);
  EXPECT_EQ(out.next.robot_speed, 2.55);
  EXPECT_EQ(step(s, Action::Backward, cfg).next.robot_speed, -2.55);
}

TEST(Step, ForwardAlongArbitraryHeading) {
  SimConfig cfg;
  SceneState s = HeadOnScene(1.9, 0.0);
  s.robot = Pose2D(1, 1, kPi / 3);
  const StepOutcome out = step(s, Action::Forward, cfg);
  EXPECT_NEAR((out.next.robot.position() - s.robot.position()).norm(), 0.1275, 1e-15);
  EXPECT_EQ(out.next.robot.theta(), s.robot.theta());
}

TEST(Step, HeadOnFullSpeedContactEarnsMaximumBonus) {
  SimConfig cfg;
  // Gap closes by 0.1275 + 0.05 per step; contact once gap <= 0.15.
  const SceneState s = HeadOnScene(0.3, 1.0);
  const StepOutcome out = step(s, Action::Forward, cfg);
  ASSERT_TRUE(out.first_contact);
  EXPECT_EQ(*out.contact_angle, 0.0);
  EXPECT_EQ(*out.contact_speed, 2.55);
  EXPECT_NEAR(out.reward, 12.996, 1e-12);
  EXPECT_TRUE(out.next.contact_made);
  // Re-launched away from the robot along +X at the closing speed.
  EXPECT_NEAR(out.next.ball_vel.x, 3.55, 1e-12);
  EXPECT_NEAR(out.next.ball_vel.y, 0.0, 1e-12);
}

TEST(Step, NoRewardAfterContact) {
  SimConfig cfg;
  const SceneState s = HeadOnScene(0.3, 1.0);
  SceneState cur = step(s, Action::Forward, cfg).next;
  while (cur.step_index < cfg.episode_steps) {
    const StepOutcome out = step(cur, Action::Backward, cfg);
    EXPECT_EQ(out.reward, 0.0);
    EXPECT_FALSE(out.first_contact);
    EXPECT_TRUE(out.next.contact_made);
    cur = out.next;
  }
}

TEST(Step, TerminalAfterEpisodeStepsAndThenError) {
  SimConfig cfg;
  SceneState s = HeadOnScene(1.9, 0.0);
  for (int i = 1; i <= cfg.episode_steps; ++i) {
    const StepOutcome out = step(s, Action::Stop, cfg);
    EXPECT_EQ(out.terminal, i == cfg.episode_steps);
    EXPECT_EQ(out.next.step_index, i);
    s = out.next;
  }
  EXPECT_THROW(step(s, Action::Stop, cfg), std::logic_error);
}

TEST(RewardOf, Examples) {
  EXPECT_EQ(reward_of(false, std::nullopt, std::nullopt, false), -0.1);
  EXPECT_EQ(reward_of(false, std::nullopt, std::nullopt, true), 0.0);
  EXPECT_NEAR(reward_of(true, 0.0, 2.55, false), 12.996, 1e-12);
  EXPECT_NEAR(reward_of(true, kPi / 2, 0.0, false), 0.0, 1e-15);
  EXPECT_NEAR(reward_of(true, kPi, 0.0, false), -3.0, 1e-15);
  EXPECT_THROW(reward_of(true, std::nullopt, 1.0, false), std::invalid_argument);
}

TEST(ContactAngle, Examples) {
  SceneState s;
  s.robot = Pose2D(0, 0, 0);
  s.target = {3, 0};
  s.ball_pos = {0.1, 0};
  EXPECT_EQ(contact_angle(s), 0.0);
  s.ball_pos = {-0.1, 0};
  EXPECT_NEAR(contact_angle(s), kPi, 1e-15);
  s.ball_pos = {0.1, 0.1};
  EXPECT_NEAR(contact_angle(s), kPi / 4, 1e-12);
  s.ball_pos = {0.1, -0.1};
  EXPECT_NEAR(contact_angle(s), kPi / 4, 1e-12);
}

TEST(Episode, NoContactReturnIsMinusFour) {
  SimConfig cfg;
  SceneState s = HeadOnScene(1.9, 0.0);
  s.ball_pos = {0, 1.9};  // parked to the side, out of reach
  EXPECT_EQ(Play(s, {Action::Forward, Action::Backward}, cfg).total, -4.0);
  EXPECT_EQ(Play(s, {Action::Stop}, cfg).total, -4.0);
}

TEST(Episode, ContactAtStepKReturn) {
  SimConfig cfg;
  // Ball at x0 rolling at 1 m/s; forward robot closes 0.1775 m per step.
  for (double x0 : {0.3, 0.8, 1.5, 2.0}) {
    const Episode ep = Play(HeadOnScene(x0, 1.0), {Action::Forward}, cfg);
    int k = 0;
    for (const auto& o : ep.steps) {
      if (o.first_contact) k = o.next.step_index;
    }
    ASSERT_GT(k, 0);
    EXPECT_NEAR(ep.total, -0.1 * (k - 1) + 12.996, 1e-9) << "x0 " << x0;
  }
}

TEST(Episode, InvariantsUnderRandomPlay) {
  SimConfig cfg;
  Rng env(11), pol(12);
  for (int e = 0; e < 500; ++e) {
    SceneState s = reset(env, cfg);
    const SceneState spawn = s;
    double total = 0.0;
    int contacts = 0;
    while (s.step_index < cfg.episode_steps) {
      const StepOutcome out = step(s, action_from_index(static_cast<int>(pol.uniform_index(3))), cfg);
      EXPECT_EQ(out.first_contact, out.contact_angle.has_value());
      EXPECT_EQ(out.first_contact, out.contact_speed.has_value());
      EXPECT_EQ(out.terminal, out.next.step_index == cfg.episode_steps);
      EXPECT_TRUE(!s.contact_made || out.next.contact_made);
      EXPECT_LE(out.reward, 12.996 + 1e-12);
      EXPECT_EQ(out.next.robot.theta(), spawn.robot.theta());
      EXPECT_NEAR(out.next.robot.y(), 0.0, 1e-12);
      const double v = out.next.robot_speed;
      EXPECT_TRUE(v == 2.55 || v == 0.0 || v == -2.55);
      contacts += out.first_contact;
      total += out.reward;
      s = out.next;
    }
    EXPECT_LE(contacts, 1);
    EXPECT_GE(total, -4.0 - 3.0 - 1e-9);
    if (contacts == 0) {
      EXPECT_NEAR(total, -4.0, 1e-12);
    }
  }
}

TEST(Episode, DeterministicGivenSeedAndActions) {
  SimConfig cfg;
  Rng a(99), b(99), acts(5);
  const auto actions = RandomActions(acts, 40);
  const Episode ea = Play(reset(a, cfg), actions, cfg);
  const Episode eb = Play(reset(b, cfg), actions, cfg);
  ASSERT_EQ(ea.steps.size(), eb.steps.size());
  for (std::size_t i = 0; i < ea.steps.size(); ++i) {
    EXPECT_EQ(ea.steps[i].next, eb.steps[i].next);
    EXPECT_EQ(ea.steps[i].reward, eb.steps[i].reward);
  }
}

TEST(Episode, CovariantUnderGlobalRigidMove) {
  SimConfig cfg;
  Rng env(21), acts(22), moves(23);
  for (int trial = 0; trial < 200; ++trial) {
    const SceneState s = reset(env, cfg);
    const Pose2D move = verify::random_pose(moves, 20.0);
    const auto actions = RandomActions(acts, 40);
    const Episode base = Play(s, actions, cfg);
    const Episode moved = Play(verify::transform_scene(move, s), actions, cfg);
    const Pose2D undo(invert(ctm_from_pose(move)).translation(), -move.theta());
    for (std::size_t i = 0; i < base.steps.size(); ++i) {
      const SceneState back = verify::transform_scene(undo, moved.steps[i].next);
      const SceneState& ref = base.steps[i].next;
      ASSERT_NEAR(back.robot.x(), ref.robot.x(), 1e-6);
      ASSERT_NEAR(back.robot.y(), ref.robot.y(), 1e-6);
      ASSERT_NEAR(wrap_angle(back.robot.theta() - ref.robot.theta()), 0.0, 1e-6);
      ASSERT_NEAR(back.ball_pos.x, ref.ball_pos.x, 1e-6);
      ASSERT_NEAR(back.ball_pos.y, ref.ball_pos.y, 1e-6);
      ASSERT_NEAR(back.ball_vel.x, ref.ball_vel.x, 1e-6);
      ASSERT_NEAR(back.ball_vel.y, ref.ball_vel.y, 1e-6);
      ASSERT_EQ(moved.steps[i].first_contact, base.steps[i].first_contact);
      ASSERT_NEAR(moved.steps[i].reward, base.steps[i].reward, 1e-6);
    }
  }
}

TEST(SimConfig, ValidateRejectsBadValues) {
  SimConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dt = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.ball_speed_min = 3;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.robot_radius = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ActionFromIndex, RejectsOutOfRange) {
  EXPECT_EQ(action_from_index(0), Action::Forward);
  EXPECT_EQ(action_from_index(2), Action::Backward);
  EXPECT_THROW(action_from_index(3), std::out_of_range);
  EXPECT_THROW(action_from_index(-1), std::out_of_range);
}

}  // namespace
}  // namespace kickrl
