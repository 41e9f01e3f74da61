#pragma once

#include <cstdint>
#include <vector>

#include "handover/geometry.hpp"
#include "handover/kinematics.hpp"

namespace handover {

struct AdaptParams {
  double alpha = 0.05;         // null-space step, rad
  double lambda_omega = 1.0;   // orientation weight
  int max_iters = 300;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct Objective {
  double V = 0.0;
  double d = 0.0;
  double e_omega = 0.0;  // rad
};

/// V = -d(q, env) + lambda_omega * angle(R(q), R(q_ref)).
Objective objective(const RobotModel& model, const JointVector& q, const CapsuleSet& env, const JointVector& q_ref,
                    double lambda_omega);

enum class AdaptStatus {
  Optimized,
  NoNullSpace,   // position Jacobian has full row rank at the seed
  NoObstacles,   // empty environment, seed returned
};

struct AdaptResult {
  JointVector q_g;
  JointVector q_seed;  // IK solution the search started from
  double V = 0.0;
  double d = 0.0;
  double e_omega = 0.0;
  int iters_used = 0;
  double V_seed = 0.0;
  double d_seed = 0.0;
  AdaptStatus status = AdaptStatus::Optimized;
  std::vector<double> best_trace;  // best V after each iteration
};

/// Delivery-pose adaptation: keeps the tool position of `goal` fixed and
/// walks the position null space, re-projecting onto the position
/// constraint after every step, to maximise human clearance at a bounded
/// orientation cost. Throws Error(IKFailed) when the goal is unreachable.
AdaptResult user_adapt(const RobotModel& model, const Pose& goal, const CapsuleSet& env, const AdaptParams& params,
                       const JointVector& ik_seed);

inline AdaptResult user_adapt(const RobotModel& model, const Pose& goal, const CapsuleSet& env,
                              const AdaptParams& params = {}) {
  return user_adapt(model, goal, env, params, model.home());
}

}  // namespace handover
