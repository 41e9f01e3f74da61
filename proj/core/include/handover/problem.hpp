#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "handover/adaptation.hpp"

namespace handover {

/// A standalone delivery-pose adaptation problem as stored on disk:
///
///   {"model": "kinova-gen3-like",
///    "goal": {"position": [x, y, z], "orientation": [w, x, y, z]},
///    "seed_q": [...],                       // optional IK seed
///    "capsules": [{"a": [...], "b": [...], "radius": r, "label": "..."}]}
struct AdaptProblem {
  std::string model;
  Pose goal;
  std::optional<JointVector> seed_q;
  CapsuleSet env;
};

AdaptProblem parse_adapt_problem(const std::string& json_text);
/// Throws Error(ScenarioNotFound) when the file does not exist.
AdaptProblem load_adapt_problem(const std::filesystem::path& path);

/// Environment file: {"capsules": [...]} in the format above.
CapsuleSet parse_capsule_set(const std::string& json_text);
CapsuleSet load_capsule_set(const std::filesystem::path& path);

}  // namespace handover
