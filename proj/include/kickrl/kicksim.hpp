#pragma once

// Standalone kinematic simulator of the kick-motion task.
//
// The robot drives along its heading line at one of three fixed speeds while
// a ball is launched toward it. Reward per step is
//   r_contact + r_theta + r_velocity
// where r_contact is -0.1 until the first contact and 0 afterwards, and the
// first contact step alone earns 3 cos(theta_contact) + 3.92 V_contact.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kickrl/frames.hpp"
#include "kickrl/rng.hpp"

namespace kickrl {

enum class Action : int { Forward = 0, Stop = 1, Backward = 2 };

inline constexpr int kActionCount = 3;

inline constexpr double kNoContactPenalty = -0.1;
inline constexpr double kAngleRewardGain = 3.0;
inline constexpr double kSpeedRewardGain = 3.92;

inline Action action_from_index(int i) {
  if (i < 0 || i >= kActionCount) {
    throw std::out_of_range("action index " + std::to_string(i));
  }
  return static_cast<Action>(i);
}

inline std::string_view action_name(Action a) {
  switch (a) {
    case Action::Forward: return "forward";
    case Action::Stop: return "stop";
    case Action::Backward: return "backward";
  }
  return "?";
}

struct SimConfig {
  double dt = 0.05;
  int episode_steps = 40;
  double robot_radius = 0.1;
  double ball_radius = 0.05;
  double spawn_distance = 2.0;
  double ball_speed_min = 1.0;
  double ball_speed_max = 2.0;
  double ball_aim_radius = 0.5;
  double forward_speed = 2.55;
  double kick_restitution = 1.0;
  double target_distance = 3.0;

  // Throws std::invalid_argument naming the first bad field.
  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("sim.") + what);
    };
    require(dt > 0.0, "dt must be > 0");
    require(episode_steps >= 1, "episode_steps must be >= 1");
    require(robot_radius > 0.0, "robot_radius must be > 0");
    require(ball_radius > 0.0, "ball_radius must be > 0");
    require(spawn_distance > 0.0, "spawn_distance must be > 0");
    require(ball_speed_min <= ball_speed_max,
            "ball_speed_min must be <= ball_speed_max");
    require(ball_aim_radius > 0.0, "ball_aim_radius must be > 0");
    require(forward_speed >= 0.0, "forward_speed must be >= 0");
    require(kick_restitution >= 0.0, "kick_restitution must be >= 0");
    require(target_distance > 0.0, "target_distance must be > 0");
  }

  double speed_of(Action a) const {
    switch (a) {
      case Action::Forward: return forward_speed;
      case Action::Stop: return 0.0;
      case Action::Backward: return -forward_speed;
    }
    return 0.0;
  }

  bool operator==(const SimConfig&) const = default;
};

struct SceneState {
  Pose2D robot;
  double robot_speed = 0.0;  // signed, along heading
  Vec2 ball_pos;
  Vec2 ball_vel;
  Vec2 target;
  bool contact_made = false;
  int step_index = 0;

  Vec2 robot_velocity() const { return robot_speed * robot.heading(); }

  bool operator==(const SceneState&) const = default;
};

struct StepOutcome {
  SceneState next;
  double reward = 0.0;
  bool first_contact = false;
  std::optional<double> contact_angle;
  std::optional<double> contact_speed;
  bool terminal = false;
};

// Draw order: spawn angle, aim point (rejection in the bounding square),
// ball speed.
inline SceneState reset(Rng& rng, const SimConfig& cfg) {
  SceneState s;
  s.target = {cfg.target_distance, 0.0};
  s.robot = Pose2D(0.0, 0.0, angle_of(s.target));

  const double spawn_angle = rng.uniform(0.0, kTwoPi);
  s.ball_pos = s.robot.position() +
               cfg.spawn_distance * unit_from_angle(spawn_angle);

  Vec2 aim;
  const double r = cfg.ball_aim_radius;
  do {
    aim = {rng.uniform(-r, r), rng.uniform(-r, r)};
  } while (aim.dot(aim) > r * r);
  aim = aim + s.robot.position();

  const double speed = rng.uniform(cfg.ball_speed_min, cfg.ball_speed_max);
  const Vec2 d = aim - s.ball_pos;
  s.ball_vel = (speed / d.norm()) * d;
  return s;
}

// Unsigned angle between robot->ball and robot->target, in [0, pi].
inline double contact_angle(const SceneState& s) {
  const Vec2 to_ball = s.ball_pos - s.robot.position();
  const Vec2 to_target = s.target - s.robot.position();
  return std::abs(wrap_angle(angle_of(to_ball) - angle_of(to_target)));
}

inline double reward_of(bool first_contact, std::optional<double> angle,
                        std::optional<double> speed,
                        bool contact_made_before) {
  if (first_contact) {
    if (!angle || !speed) {
      throw std::invalid_argument(
          "reward_of: first contact requires angle and speed");
    }
    return kAngleRewardGain * std::cos(*angle) + kSpeedRewardGain * *speed;
  }
  return contact_made_before ? 0.0 : kNoContactPenalty;
}

inline StepOutcome step(const SceneState& s, Action action,
                        const SimConfig& cfg) {
  if (s.step_index >= cfg.episode_steps) {
    throw std::logic_error("step called on a terminal scene (step_index " +
                           std::to_string(s.step_index) + ")");
  }

  StepOutcome out;
  SceneState& n = out.next;
  n = s;
  n.robot_speed = cfg.speed_of(action);
  n.robot = Pose2D(s.robot.position() + (n.robot_speed * cfg.dt) * s.robot.heading(),
                   s.robot.theta());
  n.ball_pos = s.ball_pos + cfg.dt * s.ball_vel;

  const Vec2 gap = n.ball_pos - n.robot.position();
  const bool touching = gap.norm() <= cfg.robot_radius + cfg.ball_radius;

  if (touching && !s.contact_made) {
    out.first_contact = true;
    out.contact_angle = contact_angle(n);
    out.contact_speed = std::abs(n.robot_speed);
    n.contact_made = true;

    // Re-launch along robot->ball with the closing speed.
    const double dist = gap.norm();
    if (dist > 0.0) {
      const Vec2 u = (1.0 / dist) * gap;
      const double closing = (n.robot_velocity() - s.ball_vel).dot(u);
      n.ball_vel = (cfg.kick_restitution * std::max(closing, 0.0)) * u;
    } else {
      n.ball_vel = {};
    }
  }

  out.reward = reward_of(out.first_contact, out.contact_angle,
                         out.contact_speed, s.contact_made);
  n.step_index = s.step_index + 1;
  out.terminal = n.step_index == cfg.episode_steps;
  return out;
}

// Episode return with penalty steps counted rather than summed, so a
// contact-free episode totals exactly episode_steps * kNoContactPenalty.
class ReturnAccumulator {
 public:
  void add(double reward) {
    if (reward == kNoContactPenalty) {
      ++penalty_steps_;
    } else {
      other_ += reward;
    }
  }
  double total() const { return kNoContactPenalty * penalty_steps_ + other_; }

 private:
  int penalty_steps_ = 0;
  double other_ = 0.0;
};

}  // namespace kickrl
