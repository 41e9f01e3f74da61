#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library code it is used to check: the DH
// chain is multiplied out with explicit 4x4 matrices, segment distance is
// found by sampling, and the S-curve duration comes from closed-form
// kinematics of the continuous-time profile.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "handover/adaptation.hpp"
#include "handover/geometry.hpp"
#include "handover/kinematics.hpp"
#include "handover/robot_model.hpp"

namespace handover::oracle {

inline std::string data_path(const std::string& relative) { return std::string(HANDOVER_TEST_DATA_DIR) + "/" + relative; }

// ---------------------------------------------------------------------------
// Kinematics

inline Eigen::Matrix4d rot_x(double a) {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T(1, 1) = std::cos(a);
  T(1, 2) = -std::sin(a);
  T(2, 1) = std::sin(a);
  T(2, 2) = std::cos(a);
  return T;
}

inline Eigen::Matrix4d rot_z(double a) {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T(0, 0) = std::cos(a);
  T(0, 1) = -std::sin(a);
  T(1, 0) = std::sin(a);
  T(1, 1) = std::cos(a);
  return T;
}

inline Eigen::Matrix4d trans_x(double a) {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T(0, 3) = a;
  return T;
}

inline Eigen::Matrix4d trans_z(double d) {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T(2, 3) = d;
  return T;
}

/// Tool transform by naive multiplication of the modified DH chain.
inline Eigen::Matrix4d naive_chain(const RobotModel& model, const JointVector& q) {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  for (int i = 0; i < model.dof(); ++i) {
    const JointSpec& j = model.joint(i);
    T = T * rot_x(j.alpha) * trans_x(j.a) * rot_z(q[i] + j.theta_offset) * trans_z(j.d);
  }
  const ToolSpec& tool = model.tool();
  return T * rot_x(tool.alpha) * trans_x(tool.a) * trans_z(tool.d);
}

inline Vec3 naive_position(const RobotModel& model, const JointVector& q) {
  return naive_chain(model, q).block<3, 1>(0, 3);
}

inline JointVector random_configuration(const RobotModel& model, std::mt19937_64& rng, double margin = 0.0) {
  JointVector q(model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    std::uniform_real_distribution<double> u(model.joint(i).q_min + margin, model.joint(i).q_max - margin);
    q[i] = u(rng);
  }
  return q;
}

/// Planar chain of unit links about parallel z axes, one capsule per link.
inline RobotModel planar_arm(int links, double length = 1.0) {
  std::vector<JointSpec> joints;
  std::vector<LinkCapsule> capsules;
  for (int i = 0; i < links; ++i) {
    JointSpec j;
    j.a = i == 0 ? 0.0 : length;
    joints.push_back(j);
    capsules.push_back(LinkCapsule{i + 1, Vec3::Zero(), Vec3(length, 0.0, 0.0), 0.05});
  }
  return RobotModel("planar-" + std::to_string(links), joints, ToolSpec{length, 0.0, 0.0}, capsules);
}

// ---------------------------------------------------------------------------
// Geometry

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

/// Segment-segment distance by dense sampling of the first segment (the
/// distance from a point to the second segment is convex along it) followed
/// by golden-section refinement inside the best sampling bracket.
inline double sampled_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2,
                                       int samples = 10000) {
  const auto f = [&](double s) { return point_segment_distance(p1 + s * (q1 - p1), p2, q2); };
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double v = f(static_cast<double>(k) / samples);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  double lo = std::max(0, best - 1) / static_cast<double>(samples);
  double hi = std::min(samples, best + 1) / static_cast<double>(samples);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min(best_value, f(0.5 * (lo + hi)));
}

/// Plain n x n parameter grid over both segments.
inline double grid_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const Vec3 x = p1 + (static_cast<double>(i) / n) * (q1 - p1);
    for (int k = 0; k <= n; ++k) {
      const Vec3 y = p2 + (static_cast<double>(k) / n) * (q2 - p2);
      best = std::min(best, (x - y).squaredNorm());
    }
  }
  return std::sqrt(best);
}

inline Capsule random_capsule(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> rad(0.01, 0.2);
  Capsule c;
  c.a = Vec3(pos(rng), pos(rng), pos(rng));
  c.b = Vec3(pos(rng), pos(rng), pos(rng));
  c.r = rad(rng);
  return c;
}

// ---------------------------------------------------------------------------
// Trajectories

/// Time of the continuous rest-to-rest seven-segment S-curve over distance
/// D with jerk j, acceleration a and velocity v limits.
inline double scurve_duration(double D, double v, double a, double j) {
  if (D <= 0.0) return 0.0;
  // Time to ramp from rest to speed vp (jerk up, optional constant
  // acceleration, jerk down).
  const auto ramp_time = [&](double vp) { return vp * j >= a * a ? a / j + vp / a : 2.0 * std::sqrt(vp / j); };
  const double ramp = ramp_time(v);
  // Accelerating to v and back covers v * ramp.
  if (v * ramp <= D) return 2.0 * ramp + (D - v * ramp) / v;
  // Peak velocity not reached: solve D = vp * ramp_time(vp).
  double vp = 0.5 * a * (-a / j + std::sqrt(a * a / (j * j) + 4.0 * D / a));
  if (vp * j < a * a) vp = std::cbrt(D * D * j / 4.0);
  return 2.0 * ramp_time(vp);
}

// ---------------------------------------------------------------------------
// Null-space search

struct NullSpaceSearch {
  double best_V = 0.0;
  double best_d = 0.0;
  int evaluated = 0;
};

/// Uniform samples of null-space coefficients in a ball of radius `radius`
/// around q_G, each projected back onto the position constraint; keeps the
/// best objective.
inline NullSpaceSearch brute_force_null_space(const RobotModel& model, const JointVector& q_G, const Vec3& p_goal,
                                              const CapsuleSet& env, double lambda_omega, int samples,
                                              double radius, std::uint64_t seed) {
  const Eigen::MatrixXd N = position_null_space(model, q_G);
  const Objective seed_obj = objective(model, q_G, env, q_G, lambda_omega);
  NullSpaceSearch out{seed_obj.V, seed_obj.d, 0};
  if (N.cols() == 0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd c(N.cols());
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = normal(rng);
    const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(c.size()));
    try {
      const JointVector q = icop_correct(model, q_G + N * (r * c.normalized()), p_goal);
      if (!model.within_limits(q)) continue;
      const Objective o = objective(model, q, env, q_G, lambda_omega);
      ++out.evaluated;
      if (o.V < out.best_V) {
        out.best_V = o.V;
        out.best_d = o.d;
      }
    } catch (const std::exception&) {
    }
  }
  return out;
}

}  // namespace handover::oracle
