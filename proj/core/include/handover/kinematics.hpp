#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "handover/robot_model.hpp"

namespace handover {

using Matrix6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Matrix3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// End-effector pose: position in metres plus unit quaternion orientation.
struct Pose {
  Vec3 p = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  static Pose from_transform(const Eigen::Isometry3d& T);
};

struct FkResult {
  Pose pose;
  /// frames[0] is the base, frames[i] joint i, frames[dof + 1] the tool.
  std::vector<Eigen::Isometry3d> frames;
};

FkResult forward_kinematics(const RobotModel& model, const JointVector& q);

Vec3 fk_position(const RobotModel& model, const JointVector& q);

/// Geometric Jacobian of the tool point: rows 0-2 linear velocity,
/// rows 3-5 angular velocity, both in the base frame.
Matrix6X jacobian(const RobotModel& model, const JointVector& q);

/// Linear-velocity Jacobian of a point fixed in frame `link` (given in that
/// frame's coordinates). Columns of joints beyond `link` are zero.
Matrix3X point_jacobian(const RobotModel& model, const FkResult& fk, int link, const Vec3& local_point);

/// Orthonormal basis (columns) of the null space of the 3 x dof position
/// Jacobian. Rank uses a 1e-8 relative singular-value threshold.
Eigen::MatrixXd position_null_space(const RobotModel& model, const JointVector& q);

/// Angle of the relative rotation between two orientations, in [0, pi].
double rotation_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

struct IkOptions {
  double damping = 1e-3;
  double step_clamp = 0.2;
  int max_iterations = 200;
  double position_tolerance = 1e-6;
  double orientation_tolerance = 1e-6;
  int restarts = 8;             ///< reseeded descents after a stalled one
  double restart_spread = 0.3;  ///< std. dev. of the reseeding scatter [rad]
};

/// Damped least-squares IK on the full pose, with the damping raised while a
/// step fails to reduce the error. A stalled descent is retried from
/// reproducibly scattered seeds. Throws ConvergenceError (NoConvergence)
/// carrying the smallest residual seen.
JointVector inverse_kinematics(const RobotModel& model, const Pose& target, const JointVector& q_seed,
                               const IkOptions& options = {});

struct IcopOptions {
  double damping = 1e-3;
  double step_clamp = 0.2;
  int max_iterations = 100;
  double tolerance = 1e-6;
};

/// Position-only correction: moves q by a minimal-norm damped least-squares
/// sequence until the tool point sits on p_goal.
JointVector icop_correct(const RobotModel& model, const JointVector& q, const Vec3& p_goal,
                         const IcopOptions& options = {});

}  // namespace handover
