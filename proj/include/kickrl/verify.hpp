#pragma once

// Randomized property checks for the frame transforms and observation
// encodings. Shared by the check-frames command and the test suites.
//
// The matrix inverse used here is a general adjugate/determinant inverse; it
// knows nothing about rigid structure, so it checks invert() independently.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "kickrl/frames.hpp"
#include "kickrl/kicksim.hpp"
#include "kickrl/numeric_text.hpp"
#include "kickrl/obs.hpp"
#include "kickrl/rng.hpp"

namespace kickrl::verify {

// Inverse of an arbitrary nonsingular 3x3 matrix by cofactors.
inline std::array<double, 9> general_inverse(const std::array<double, 9>& a) {
  auto at = [&](int r, int c) { return a[3 * r + c]; };
  std::array<double, 9> cof{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int r0 = (r + 1) % 3, r1 = (r + 2) % 3;
      const int c0 = (c + 1) % 3, c1 = (c + 2) % 3;
      cof[3 * r + c] = at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
    }
  }
  const double det = at(0, 0) * cof[0] + at(0, 1) * cof[1] + at(0, 2) * cof[2];
  std::array<double, 9> inv{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) inv[3 * r + c] = cof[3 * c + r] / det;
  }
  return inv;
}

inline Pose2D random_pose(Rng& rng, double extent = 10.0) {
  return {rng.uniform(-extent, extent), rng.uniform(-extent, extent),
          rng.uniform(-kPi, kPi)};
}

inline Vec2 random_vec(Rng& rng, double extent) {
  return {rng.uniform(-extent, extent), rng.uniform(-extent, extent)};
}

// Arbitrary scene, not necessarily reachable from reset(). Ball velocity is
// kept away from zero so its direction is well defined.
inline SceneState random_scene(Rng& rng) {
  SceneState s;
  s.robot = random_pose(rng, 5.0);
  const double speeds[] = {-2.55, 0.0, 2.55};
  s.robot_speed = speeds[rng.uniform_index(3)];
  s.ball_pos = s.robot.position() + random_vec(rng, 3.0);
  const double dir = rng.uniform(-kPi, kPi);
  s.ball_vel = rng.uniform(0.5, 3.0) * unit_from_angle(dir);
  s.target = random_vec(rng, 6.0);
  s.contact_made = rng.uniform() < 0.5;
  s.step_index = static_cast<int>(rng.uniform_index(40));
  return s;
}

// Same scene described in a field frame moved by `move` (applied as a
// robot-to-field style transform).
inline SceneState transform_scene(const Pose2D& move, const SceneState& s) {
  const TransformMatrix m = ctm_from_pose(move);
  SceneState t = s;
  t.robot = Pose2D(m.apply_point(s.robot.position()), s.robot.theta() + move.theta());
  t.ball_pos = m.apply_point(s.ball_pos);
  t.ball_vel = m.apply_vector(s.ball_vel);
  t.target = m.apply_point(s.target);
  return t;
}

// Transform that changes the field description noticeably.
inline Pose2D random_nontrivial_move(Rng& rng) {
  while (true) {
    const Pose2D p = random_pose(rng, 10.0);
    if (std::hypot(p.x(), p.y()) > 0.5 && std::abs(p.theta()) > 0.1) return p;
  }
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

template <typename Body>
PropertyResult timed(std::string name, Body body) {
  const auto t0 = std::chrono::steady_clock::now();
  PropertyResult r = body();
  r.name = std::move(name);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::string worst(double v) { return "worst " + format_double(v); }

}  // namespace detail

// invert(ctm_from_pose(P)) against the general inverse, per entry.
inline PropertyResult check_invert_oracle(std::uint64_t seed, int cases, double tol = 1e-10) {
  return detail::timed("invert matches general 3x3 inverse", [&] {
    Rng rng(seed);
    double w = 0.0;
    for (int i = 0; i < cases; ++i) {
      const TransformMatrix m = ctm_from_pose(random_pose(rng));
      const TransformMatrix inv = invert(m);
      const auto ref = general_inverse(m.m);
      for (int k = 0; k < 9; ++k) w = std::max(w, std::abs(inv.m[k] - ref[k]));
    }
    return PropertyResult{{}, w <= tol, detail::worst(w)};
  });
}

inline PropertyResult check_point_round_trip(std::uint64_t seed, int cases, double tol = 1e-9) {
  return detail::timed("point round trip through robot frame", [&] {
    Rng rng(seed);
    double w = 0.0;
    for (int i = 0; i < cases; ++i) {
      const Pose2D pose = random_pose(rng);
      const Vec2 p = random_vec(rng, 20.0);
      const Vec2 back = ctm_from_pose(pose).apply_point(to_robot_frame_point(pose, p));
      w = std::max({w, std::abs(back.x - p.x), std::abs(back.y - p.y)});
    }
    return PropertyResult{{}, w <= tol, detail::worst(w)};
  });
}

inline PropertyResult check_rigidity(std::uint64_t seed, int cases, double tol = 1e-9) {
  return detail::timed("robot-frame points preserve distances", [&] {
    Rng rng(seed);
    double w = 0.0;
    for (int i = 0; i < cases; ++i) {
      const Pose2D pose = random_pose(rng);
      const Vec2 a = random_vec(rng, 20.0), b = random_vec(rng, 20.0);
      const double d0 = (a - b).norm();
      const double d1 = (to_robot_frame_point(pose, a) - to_robot_frame_point(pose, b)).norm();
      w = std::max(w, std::abs(d0 - d1));
    }
    return PropertyResult{{}, w <= tol, detail::worst(w)};
  });
}

inline PropertyResult check_vector_transform(std::uint64_t seed, int cases) {
  return detail::timed("vector transform keeps norm, ignores translation", [&] {
    Rng rng(seed);
    double wn = 0.0;
    bool translation_free = true;
    for (int i = 0; i < cases; ++i) {
      const Pose2D pose = random_pose(rng);
      const Pose2D moved(rng.uniform(-50, 50), rng.uniform(-50, 50), pose.theta());
      const Vec2 v = random_vec(rng, 5.0);
      const Vec2 r = to_robot_frame_vector(pose, v);
      wn = std::max(wn, std::abs(r.norm() - v.norm()));
      translation_free = translation_free && (r == to_robot_frame_vector(moved, v));
    }
    const bool ok = wn <= 1e-12 && translation_free;
    return PropertyResult{{}, ok,
                          detail::worst(wn) + (translation_free ? "" : ", translation leaked")};
  });
}

inline PropertyResult check_own_position_is_origin(std::uint64_t seed, int cases,
                                                   double tol = 1e-12) {
  return detail::timed("robot position maps to robot-frame origin", [&] {
    Rng rng(seed);
    double w = 0.0;
    for (int i = 0; i < cases; ++i) {
      const Pose2D pose = random_pose(rng);
      const Vec2 o = invert(ctm_from_pose(pose)).apply_point(pose.position());
      w = std::max({w, std::abs(o.x), std::abs(o.y)});
    }
    return PropertyResult{{}, w <= tol, detail::worst(w)};
  });
}

inline PropertyResult check_wrap_idempotent(std::uint64_t seed, int cases) {
  return detail::timed("wrap_angle idempotent, range (-pi, pi]", [&] {
    Rng rng(seed);
    bool ok = true;
    for (int i = 0; i < cases && ok; ++i) {
      const double a = rng.uniform(-100.0, 100.0);
      const double w = wrap_angle(a);
      ok = wrap_angle(w) == w && w > -kPi && w <= kPi &&
           std::abs(std::remainder(a - w, kTwoPi)) < 1e-9;
    }
    return PropertyResult{{}, ok, ok ? "" : "violated"};
  });
}

// rcs unchanged under a global rigid move of the scene; acs changes.
inline PropertyResult check_rcs_frame_invariance(std::uint64_t seed, int cases,
                                                 double tol = 1e-6) {
  return detail::timed("rcs invariant under global rigid moves, acs not", [&] {
    Rng rng(seed);
    double w = 0.0;
    int acs_unchanged = 0;
    for (int i = 0; i < cases; ++i) {
      const SceneState s = random_scene(rng);
      const SceneState t = transform_scene(random_nontrivial_move(rng), s);
      std::vector<double> a = observe_rcs(s).values, b = observe_rcs(t).values;
      // theta' is an angle; compare modulo 2 pi.
      const double dth = std::abs(wrap_angle(a[5] - b[5]));
      a[5] = b[5] = 0.0;
      w = std::max({w, max_abs_diff(a, b), dth});
      if (max_abs_diff(observe_acs(s).values, observe_acs(t).values) <= tol) ++acs_unchanged;
    }
    const bool ok = w <= tol && acs_unchanged == 0;
    return PropertyResult{{}, ok,
                          detail::worst(w) + ", acs unchanged in " +
                              std::to_string(acs_unchanged) + " cases"};
  });
}

// Robot-frame R_x, R_y, R_theta and V_Ry are zero for every scene.
inline PropertyResult check_rcs_dropped_zero(std::uint64_t seed, int cases, double tol = 1e-9) {
  return detail::timed("dropped rcs components are zero", [&] {
    Rng rng(seed);
    double w = 0.0;
    for (int i = 0; i < cases; ++i) {
      for (double v : rcs_dropped_components(random_scene(rng))) w = std::max(w, std::abs(v));
    }
    return PropertyResult{{}, w <= tol, detail::worst(w)};
  });
}

inline std::vector<PropertyResult> run_frame_property_suite(std::uint64_t seed = 2024,
                                                            int cases = 1000) {
  return {
      check_invert_oracle(seed, cases),          check_point_round_trip(seed + 1, cases),
      check_rigidity(seed + 2, cases),           check_vector_transform(seed + 3, cases),
      check_own_position_is_origin(seed + 4, cases), check_wrap_idempotent(seed + 5, cases),
      check_rcs_frame_invariance(seed + 6, cases), check_rcs_dropped_zero(seed + 7, cases),
  };
}

}  // namespace kickrl::verify
