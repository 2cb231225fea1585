#pragma once

// Planar rigid transforms between the field (absolute) frame and the
// robot-centered frame whose +X axis is the robot heading.
//
// Conventions: meters and radians, counterclockwise positive, heading 0
// along field +X, angles canonical in (-pi, pi].

#include <array>
#include <cmath>
#include <numbers>

namespace kickrl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps any finite angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }
  double norm() const { return std::hypot(x, y); }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

// Direction of v; 0 for the zero vector.
inline double angle_of(Vec2 v) {
  if (v.x == 0.0 && v.y == 0.0) return 0.0;
  return std::atan2(v.y, v.x);
}

// Position plus heading. The heading is wrapped on construction, so every
// Pose2D holds theta in (-pi, pi].
class Pose2D {
 public:
  Pose2D() = default;
  Pose2D(double x, double y, double theta)
      : x_(x), y_(y), theta_(wrap_angle(theta)) {}
  Pose2D(Vec2 position, double theta)
      : Pose2D(position.x, position.y, theta) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }
  Vec2 heading() const { return unit_from_angle(theta_); }

  bool is_finite() const {
    return std::isfinite(x_) && std::isfinite(y_) && std::isfinite(theta_);
  }

  friend bool operator==(const Pose2D&, const Pose2D&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

// 3x3 homogeneous transform, row-major.
struct TransformMatrix {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static TransformMatrix identity() { return {}; }

  double operator()(int r, int c) const { return m[3 * r + c]; }
  double& operator()(int r, int c) { return m[3 * r + c]; }

  Vec2 translation() const { return {m[2], m[5]}; }

  // M * [p; 1]
  Vec2 apply_point(Vec2 p) const {
    return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
  }

  // Rotation block only.
  Vec2 apply_vector(Vec2 v) const {
    return {m[0] * v.x + m[1] * v.y, m[3] * v.x + m[4] * v.y};
  }

  // Upper-left block orthonormal with determinant +1 and bottom row exactly
  // [0 0 1].
  bool is_rigid(double tol = 1e-9) const {
    if (m[6] != 0.0 || m[7] != 0.0 || m[8] != 1.0) return false;
    const double c0 = m[0] * m[0] + m[3] * m[3];
    const double c1 = m[1] * m[1] + m[4] * m[4];
    const double cross = m[0] * m[1] + m[3] * m[4];
    const double det = m[0] * m[4] - m[1] * m[3];
    return std::abs(c0 - 1.0) <= tol && std::abs(c1 - 1.0) <= tol &&
           std::abs(cross) <= tol && std::abs(det - 1.0) <= tol;
  }

  friend bool operator==(const TransformMatrix&,
                         const TransformMatrix&) = default;
};

inline TransformMatrix operator*(const TransformMatrix& a,
                                 const TransformMatrix& b) {
  TransformMatrix out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += a(r, k) * b(k, c);
      out(r, c) = acc;
    }
  }
  return out;
}

// Robot-to-field transform: [[cos t, -sin t, x], [sin t, cos t, y], [0, 0, 1]].
inline TransformMatrix ctm_from_pose(const Pose2D& pose) {
  const double c = std::cos(pose.theta());
  const double s = std::sin(pose.theta());
  return {{c, -s, pose.x(), s, c, pose.y(), 0.0, 0.0, 1.0}};
}

// Closed-form rigid inverse [[R^T, -R^T t], [0 0 1]]. Only valid for rigid m.
inline TransformMatrix invert(const TransformMatrix& m) {
  const double r00 = m(0, 0), r01 = m(0, 1), r10 = m(1, 0), r11 = m(1, 1);
  const double tx = m(0, 2), ty = m(1, 2);
  return {{r00, r10, -(r00 * tx + r10 * ty),  //
           r01, r11, -(r01 * tx + r11 * ty),  //
           0.0, 0.0, 1.0}};
}

// Field point expressed in the robot frame.
inline Vec2 to_robot_frame_point(const Pose2D& robot, Vec2 p) {
  return invert(ctm_from_pose(robot)).apply_point(p);
}

// Field direction or velocity expressed in the robot frame. Rotation only;
// the robot position never enters.
inline Vec2 to_robot_frame_vector(const Pose2D& robot, Vec2 v) {
  const double c = std::cos(robot.theta());
  const double s = std::sin(robot.theta());
  return {c * v.x + s * v.y, -s * v.x + c * v.y};
}

inline double relative_heading(double theta_ball, double theta_robot) {
  return wrap_angle(theta_ball - theta_robot);
}

// Robot speed along its own heading: +|v| forward, -|v| backward.
inline double signed_speed_along_heading(const Pose2D& robot, Vec2 v_robot) {
  return v_robot.dot(robot.heading());
}

}  // namespace kickrl
