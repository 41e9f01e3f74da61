#include "handover/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "handover/errors.hpp"

namespace handover {

bool SkeletonFrame::has(const std::string& name) const {
  const auto it = keypoints.find(name);
  if (it == keypoints.end()) return false;
  const auto c = confidence.find(name);
  return c == confidence.end() || c->second > 0.0;
}

const Vec3& SkeletonFrame::at(const std::string& name) const {
  if (!has(name)) {
    throw Error(ErrorKind::MissingKeypoint, "keypoint '" + name + "' missing in frame at t=" + std::to_string(t));
  }
  return keypoints.at(name);
}

std::vector<SkeletonFrame> parse_skeleton_trajectory(std::istream& in) {
  std::vector<SkeletonFrame> frames;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fail = [&](const std::string& why) {
      throw Error(ErrorKind::ParseError, "skeleton line " + std::to_string(line_no) + ": " + why);
    };
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(e.what());
    }
    if (!rec.is_object() || !rec.contains("t") || !rec["t"].is_number()) fail("record needs a numeric 't'");
    if (!rec.contains("keypoints") || !rec["keypoints"].is_object()) fail("record needs a 'keypoints' object");
    SkeletonFrame f;
    f.t = rec["t"].get<double>();
    for (const auto& [name, value] : rec["keypoints"].items()) {
      if (!value.is_array() || value.size() != 3 || !value[0].is_number() || !value[1].is_number() ||
          !value[2].is_number()) {
        fail("keypoint '" + name + "' must be [x, y, z]");
      }
      f.keypoints[name] = Vec3(value[0].get<double>(), value[1].get<double>(), value[2].get<double>());
      f.confidence[name] = 1.0;
    }
    if (rec.contains("confidence")) {
      for (const auto& [name, value] : rec["confidence"].items()) {
        if (!value.is_number()) fail("confidence of '" + name + "' must be a number");
        const double c = value.get<double>();
        if (c < 0.0 || c > 1.0) fail("confidence of '" + name + "' outside [0, 1]");
        if (f.keypoints.count(name)) f.confidence[name] = c;
      }
    }
    for (const auto& [name, p] : f.keypoints) {
      if (f.confidence[name] > 0.0 && !p.allFinite()) fail("keypoint '" + name + "' is not finite");
    }
    frames.push_back(std::move(f));
  }
  if (frames.empty()) throw Error(ErrorKind::EmptyTrajectory, "skeleton trajectory contains no frames");
  std::stable_sort(frames.begin(), frames.end(),
                   [](const SkeletonFrame& a, const SkeletonFrame& b) { return a.t < b.t; });
  return frames;
}

std::vector<SkeletonFrame> load_skeleton_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open skeleton trajectory '" + path + "'");
  return parse_skeleton_trajectory(in);
}

KeypointStats keypoint_stats(std::span<const SkeletonFrame> frames, const std::string& name, int window) {
  if (window < 2) {
    throw Error(ErrorKind::InsufficientFrames, "statistics window must be at least 2 frames, got " +
                                                   std::to_string(window));
  }
  std::vector<Vec3> samples;
  for (auto it = frames.rbegin(); it != frames.rend() && static_cast<int>(samples.size()) < window; ++it) {
    if (it->has(name)) samples.push_back(it->keypoints.at(name));
  }
  if (samples.size() < 2) {
    throw Error(ErrorKind::InsufficientFrames, "need at least 2 frames containing '" + name + "', found " +
                                                   std::to_string(samples.size()));
  }
  const double n = static_cast<double>(samples.size());
  // Shifted two-pass variance: offsets from the newest sample are exact for a
  // motionless keypoint, so its sigma is exactly zero.
  const Vec3 shift = samples.front();
  Vec3 mean = Vec3::Zero();
  for (const auto& s : samples) mean += s - shift;
  mean /= n;
  Vec3 sq = Vec3::Zero();
  for (const auto& s : samples) sq += ((s - shift) - mean).cwiseAbs2();
  KeypointStats out;
  out.mean = shift + mean;
  out.uncertainty.sigma = (sq / (n - 1.0)).cwiseSqrt();
  out.uncertainty.window = static_cast<int>(samples.size());
  out.uncertainty.keypoint = name;
  return out;
}

SkeletonFrame mean_frame(std::span<const SkeletonFrame> frames, int window) {
  if (frames.empty()) throw Error(ErrorKind::EmptyTrajectory, "no frames to average");
  const auto count = std::min<std::size_t>(frames.size(), static_cast<std::size_t>(std::max(window, 1)));
  const auto recent = frames.last(count);
  std::set<std::string> names;
  for (const auto& f : recent) {
    for (const auto& [name, p] : f.keypoints) {
      if (f.has(name)) names.insert(name);
    }
  }
  SkeletonFrame out;
  out.t = recent.back().t;
  for (const auto& name : names) {
    Vec3 sum = Vec3::Zero();
    int k = 0;
    for (const auto& f : recent) {
      if (f.has(name)) {
        sum += f.keypoints.at(name);
        ++k;
      }
    }
    out.keypoints[name] = sum / k;
    out.confidence[name] = 1.0;
  }
  return out;
}

Pose nominal_goal(const SkeletonFrame& frame, const DeliverySpec& spec) {
  Pose pose;
  pose.p = frame.at(spec.keypoint) + spec.offset;
  pose.orientation = spec.orientation.normalized();
  return pose;
}

void GoalAdaptParams::validate() const {
  if ((lambda.array() < 0.0).any() || !lambda.allFinite()) {
    throw Error(ErrorKind::ConfigError, "goal adaptation scalers must be non-negative");
  }
  if (std::abs(u_safe.norm() - 1.0) > 1e-9) {
    throw Error(ErrorKind::ConfigError, "u_safe must be a unit vector");
  }
}

Pose adapt_goal(const Pose& nominal, const UncertaintyEstimate& uncertainty, const GoalAdaptParams& params) {
  Pose out = nominal;
  out.p = nominal.p + params.lambda.cwiseProduct(uncertainty.sigma).cwiseProduct(params.u_safe);
  return out;
}

CapsuleSet human_capsules(const SkeletonFrame& frame, const BodyModel& body) {
  namespace kp = keypoint;
  const Vec3& rs = frame.at(kp::kRightShoulder);
  const Vec3& ls = frame.at(kp::kLeftShoulder);
  const Vec3& re = frame.at(kp::kRightElbow);
  const Vec3& le = frame.at(kp::kLeftElbow);
  const Vec3& rw = frame.at(kp::kRightWrist);
  const Vec3& lw = frame.at(kp::kLeftWrist);
  const Vec3& pelvis = frame.at(kp::kPelvis);

  const Vec3 neck = frame.has(kp::kNeck) ? frame.at(kp::kNeck) : Vec3(0.5 * (rs + ls));
  Vec3 up = neck - pelvis;
  up = up.norm() > 1e-9 ? Vec3(up.normalized()) : Vec3::UnitZ();
  const Vec3 head = frame.has(kp::kHead) ? frame.at(kp::kHead) : Vec3(neck + 0.2 * up);

  const auto with_hand = [&](const Vec3& elbow, const Vec3& wrist) {
    const Vec3 dir = wrist - elbow;
    const double len = dir.norm();
    return len > 1e-9 ? Vec3(wrist + body.hand_length * dir / len) : wrist;
  };
  const auto thigh = [&](const std::string& knee, const Vec3& shoulder) {
    const Vec3 hip = pelvis + 0.5 * (shoulder - neck);
    return frame.has(knee) ? Capsule{hip, frame.at(knee), body.limb_radius} : Capsule{pelvis, hip, body.limb_radius};
  };

  CapsuleSet set;
  set.add({neck, pelvis, body.torso_radius}, "torso");
  set.add({head, head, body.head_radius}, "head");
  set.add({neck, head, body.limb_radius}, "neck");
  set.add({rs, re, body.limb_radius}, "right_upper_arm");
  set.add({ls, le, body.limb_radius}, "left_upper_arm");
  set.add({re, with_hand(re, rw), body.limb_radius}, "right_forearm");
  set.add({le, with_hand(le, lw), body.limb_radius}, "left_forearm");
  set.add(thigh("right_knee", rs), "right_thigh");
  set.add(thigh("left_knee", ls), "left_thigh");
  return set;
}

}  // namespace handover
