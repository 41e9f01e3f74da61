#pragma once

#include <string>
#include <vector>

#include "handover/kinematics.hpp"
#include "handover/robot_model.hpp"

namespace handover {

/// Swept sphere: all points within `r` of segment [a, b]. a == b is a sphere.
struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double r = 0.05;
};

struct CapsuleSet {
  std::vector<Capsule> capsules;
  std::vector<std::string> labels;

  void add(const Capsule& c, std::string label) {
    capsules.push_back(c);
    labels.push_back(std::move(label));
  }
  std::size_t size() const { return capsules.size(); }
  bool empty() const { return capsules.empty(); }
};

struct SegmentDistance {
  double distance = 0.0;
  Vec3 point1 = Vec3::Zero();  // on segment 1
  Vec3 point2 = Vec3::Zero();  // on segment 2
  double s = 0.0;              // parameter of point1 along segment 1
  double t = 0.0;              // parameter of point2 along segment 2
};

SegmentDistance segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2);

/// Signed clearance; negative values are penetration depth.
double capsule_distance(const Capsule& c1, const Capsule& c2);

/// Robot capsule templates placed in the world by a forward-kinematics result.
std::vector<Capsule> robot_capsules(const RobotModel& model, const FkResult& fk);

struct MinDistance {
  double d = 0.0;
  int robot_capsule = -1;
  int env_capsule = -1;
};

/// Minimum clearance over every (robot capsule, environment capsule) pair.
/// Ties resolve to the lowest robot capsule index, then lowest env index.
MinDistance min_distance(const RobotModel& model, const JointVector& q, const CapsuleSet& env);
MinDistance min_distance(const RobotModel& model, const FkResult& fk, const CapsuleSet& env);

/// Clearance of a single (robot capsule, environment capsule) pair at q.
double pair_distance(const RobotModel& model, const JointVector& q, const CapsuleSet& env, int robot_capsule,
                     int env_capsule);

/// Central-difference gradient of the clearance of the pair that is active
/// at q (step 1e-6 rad). Holding the pair fixed yields the one-sided
/// subgradient of that pair where the closest pair would switch.
JointVector distance_gradient(const RobotModel& model, const JointVector& q, const CapsuleSet& env);

struct PairClearance {
  int robot_capsule = -1;
  int env_capsule = -1;
  double d = 0.0;
  JointVector grad;  // central difference, step 1e-6 rad
};

/// Clearance and gradient of every (robot capsule, environment capsule)
/// pair, robot-major. The ordering depends only on the model and the
/// environment, so entries can be compared across configurations.
std::vector<PairClearance> pair_clearances(const RobotModel& model, const JointVector& q, const CapsuleSet& env);

}  // namespace handover
