#pragma once

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "handover/geometry.hpp"
#include "handover/kinematics.hpp"

namespace handover {

namespace keypoint {
inline constexpr const char* kRightWrist = "right_wrist";
inline constexpr const char* kLeftWrist = "left_wrist";
inline constexpr const char* kRightElbow = "right_elbow";
inline constexpr const char* kLeftElbow = "left_elbow";
inline constexpr const char* kRightShoulder = "right_shoulder";
inline constexpr const char* kLeftShoulder = "left_shoulder";
inline constexpr const char* kHead = "head";
inline constexpr const char* kPelvis = "pelvis";
inline constexpr const char* kNeck = "neck";
}  // namespace keypoint

/// One timestamped skeleton detection. Absent keypoints are simply missing
/// from the map; a keypoint with confidence 0 counts as missing too.
struct SkeletonFrame {
  double t = 0.0;
  std::map<std::string, Vec3> keypoints;
  std::map<std::string, double> confidence;

  bool has(const std::string& name) const;
  /// Throws MissingKeypoint when absent.
  const Vec3& at(const std::string& name) const;
};

std::vector<SkeletonFrame> parse_skeleton_trajectory(std::istream& in);
std::vector<SkeletonFrame> load_skeleton_trajectory(const std::string& path);

struct UncertaintyEstimate {
  Vec3 sigma = Vec3::Zero();  // per-axis sample standard deviation, m
  int window = 0;             // frames actually used
  std::string keypoint;
};

struct KeypointStats {
  UncertaintyEstimate uncertainty;
  Vec3 mean = Vec3::Zero();
};

inline constexpr int kDefaultStatsWindow = 10;

/// Sample statistics (N - 1 denominator) of a keypoint over the last
/// `window` frames that contain it.
KeypointStats keypoint_stats(std::span<const SkeletonFrame> frames, const std::string& keypoint,
                             int window = kDefaultStatsWindow);

/// Frame whose keypoints are the windowed means of every keypoint present in
/// at least one of the last `window` frames. Timestamp of the newest frame.
SkeletonFrame mean_frame(std::span<const SkeletonFrame> frames, int window = kDefaultStatsWindow);

/// Where and how to deliver relative to the tracked hand.
struct DeliverySpec {
  std::string keypoint = keypoint::kRightWrist;
  Vec3 offset = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

Pose nominal_goal(const SkeletonFrame& frame, const DeliverySpec& spec);

struct GoalAdaptParams {
  Vec3 lambda = Vec3::Ones();
  Vec3 u_safe = Vec3::UnitX();

  /// Throws ConfigError unless lambda >= 0 and |u_safe| = 1 within 1e-9.
  void validate() const;
};

/// Pushes the goal away from the human by (lambda o sigma) o u_safe,
/// componentwise; orientation is passed through untouched.
Pose adapt_goal(const Pose& nominal, const UncertaintyEstimate& uncertainty, const GoalAdaptParams& params);

struct BodyModel {
  double torso_radius = 0.15;
  double head_radius = 0.12;
  double limb_radius = 0.06;
  double hand_length = 0.08;  // forearm capsules extend past the wrist
};

/// Nine-capsule body: torso, head, neck, upper arms, forearms with hands,
/// thighs. Thighs collapse onto the trunk when knees are not tracked.
CapsuleSet human_capsules(const SkeletonFrame& frame, const BodyModel& body = {});

}  // namespace handover
