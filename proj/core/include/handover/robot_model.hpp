#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace handover {

using Vec3 = Eigen::Vector3d;
using JointVector = Eigen::VectorXd;

/// One revolute joint in modified Denavit-Hartenberg form (Craig convention):
/// T_{i-1,i} = RotX(alpha) * TransX(a) * RotZ(theta + theta_offset) * TransZ(d).
struct JointSpec {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
  double q_min = -3.14159;
  double q_max = 3.14159;
  double v_max = 1.0;  // rad/s
  double a_max = 2.0;  // rad/s^2
  double j_max = 10.0; // rad/s^3
};

/// Capsule template rigidly attached to a link frame. link = 0 is the base
/// frame, link = i the frame of joint i, link = dof + 1 the tool frame.
struct LinkCapsule {
  int link = 0;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.05;
};

/// Fixed tool transform appended after the last joint frame, same
/// modified DH parameterisation without a joint variable.
struct ToolSpec {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
};

class RobotModel {
 public:
  RobotModel(std::string name, std::vector<JointSpec> joints, ToolSpec tool,
             std::vector<LinkCapsule> capsules, JointVector home = {});

  const std::string& name() const { return name_; }
  int dof() const { return static_cast<int>(joints_.size()); }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const JointSpec& joint(int i) const { return joints_[static_cast<std::size_t>(i)]; }
  const ToolSpec& tool() const { return tool_; }
  const std::vector<LinkCapsule>& capsules() const { return capsules_; }
  const JointVector& home() const { return home_; }

  /// Index of the tool frame in frame lists (dof + 1).
  int tool_link() const { return dof() + 1; }

  JointVector lower_limits() const;
  JointVector upper_limits() const;
  JointVector velocity_limits() const;
  JointVector acceleration_limits() const;
  JointVector jerk_limits() const;

  bool within_limits(const JointVector& q, double tol = 0.0) const;
  JointVector clamp_to_limits(const JointVector& q) const;

  /// Copy of this model with an extra capsule (e.g. a carried object).
  RobotModel with_capsule(const LinkCapsule& capsule) const;

 private:
  std::string name_;
  std::vector<JointSpec> joints_;
  ToolSpec tool_;
  std::vector<LinkCapsule> capsules_;
  JointVector home_;
};

/// Parses the JSON robot description (see README "Robot model files").
RobotModel parse_robot_model(std::string_view json_text);
RobotModel load_robot_model(const std::string& path);

/// Models compiled into the library: "fanuc-lrmate-200id7l-like" and
/// "kinova-gen3-like". Throws UnknownModel otherwise.
RobotModel bundled_model(std::string_view id);
std::vector<std::string> bundled_model_ids();

}  // namespace handover
