#pragma once

// Observation encodings of a kick-motion scene.
//
//   acs      [R_x, R_y, R_theta, B_x, B_y, V_Rx, V_Ry, V_Bx, V_By, theta]
//   rcs      [B_x', B_y', V_Rx', V_Bx', V_By', theta']   (robot frame)
//   rcs+N    rcs followed by N i.i.d. uniform [-1, 1] dummies
//
// theta is the direction of ball travel; it is 0 for a motionless ball.

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kickrl/frames.hpp"
#include "kickrl/kicksim.hpp"
#include "kickrl/rng.hpp"

namespace kickrl {

inline constexpr int kAcsWidth = 10;
inline constexpr int kRcsWidth = 6;

class Encoding {
 public:
  enum class Kind { Acs, Rcs, RcsPlus };

  static Encoding acs() { return Encoding(Kind::Acs, 0); }
  static Encoding rcs() { return Encoding(Kind::Rcs, 0); }
  static Encoding rcs_plus(int dummies) {
    if (dummies < 0) throw std::invalid_argument("negative dummy count");
    return dummies == 0 ? rcs() : Encoding(Kind::RcsPlus, dummies);
  }

  // Accepts "acs", "rcs" and "rcs+N".
  static Encoding parse(std::string_view name) {
    if (name == "acs") return acs();
    if (name == "rcs") return rcs();
    constexpr std::string_view prefix = "rcs+";
    if (name.starts_with(prefix) && name.size() > prefix.size()) {
      const std::string_view digits = name.substr(prefix.size());
      int n = 0;
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && n >= 0) {
        return rcs_plus(n);
      }
    }
    throw std::invalid_argument("unknown encoding '" + std::string(name) +
                                "' (expected acs, rcs or rcs+N)");
  }

  Kind kind() const { return kind_; }
  int dummies() const { return dummies_; }
  bool is_relative() const { return kind_ != Kind::Acs; }

  int width() const {
    return kind_ == Kind::Acs ? kAcsWidth : kRcsWidth + dummies_;
  }

  std::string name() const {
    switch (kind_) {
      case Kind::Acs: return "acs";
      case Kind::Rcs: return "rcs";
      case Kind::RcsPlus: return "rcs+" + std::to_string(dummies_);
    }
    return "?";
  }

  bool operator==(const Encoding&) const = default;

 private:
  Encoding(Kind k, int n) : kind_(k), dummies_(n) {}
  Kind kind_ = Kind::Rcs;
  int dummies_ = 0;
};

struct Observation {
  std::vector<double> values;
  Encoding encoding = Encoding::rcs();

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  bool is_valid() const {
    if (static_cast<int>(values.size()) != encoding.width()) return false;
    for (double v : values) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

inline double ball_direction(const SceneState& s) { return angle_of(s.ball_vel); }

inline Observation observe_acs(const SceneState& s) {
  const Vec2 vr = s.robot_velocity();
  return {{s.robot.x(), s.robot.y(), s.robot.theta(), s.ball_pos.x,
           s.ball_pos.y, vr.x, vr.y, s.ball_vel.x, s.ball_vel.y,
           ball_direction(s)},
          Encoding::acs()};
}

inline Observation observe_rcs(const SceneState& s) {
  const Vec2 b = to_robot_frame_point(s.robot, s.ball_pos);
  const Vec2 vb = to_robot_frame_vector(s.robot, s.ball_vel);
  const double vr = signed_speed_along_heading(s.robot, s.robot_velocity());
  const double th = relative_heading(ball_direction(s), s.robot.theta());
  return {{b.x, b.y, vr, vb.x, vb.y, th}, Encoding::rcs()};
}

// The four robot-frame quantities the rcs encoding drops:
// [R_x', R_y', R_theta', V_Ry']. All are zero for any scene.
inline std::array<double, 4> rcs_dropped_components(const SceneState& s) {
  const Vec2 p = to_robot_frame_point(s.robot, s.robot.position());
  const Vec2 v = to_robot_frame_vector(s.robot, s.robot_velocity());
  return {p.x, p.y, relative_heading(s.robot.theta(), s.robot.theta()), v.y};
}

// Appends n dummies drawn uniform on [-1, 1]. Input must be rcs-encoded.
inline Observation augment_dummies(Observation o, int n, Rng& rng) {
  if (o.encoding != Encoding::rcs()) {
    throw std::invalid_argument("augment_dummies expects an rcs observation, got " +
                                o.encoding.name());
  }
  if (n < 0) throw std::invalid_argument("negative dummy count");
  o.values.reserve(o.values.size() + static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) o.values.push_back(rng.uniform(-1.0, 1.0));
  o.encoding = Encoding::rcs_plus(n);
  return o;
}

// Builds the observation for any encoding. dummy_rng is only drawn from for
// rcs+N.
inline Observation observe(const SceneState& s, const Encoding& enc,
                           Rng& dummy_rng) {
  switch (enc.kind()) {
    case Encoding::Kind::Acs: return observe_acs(s);
    case Encoding::Kind::Rcs: return observe_rcs(s);
    case Encoding::Kind::RcsPlus:
      return augment_dummies(observe_rcs(s), enc.dummies(), dummy_rng);
  }
  throw std::logic_error("unhandled encoding");
}

}  // namespace kickrl
