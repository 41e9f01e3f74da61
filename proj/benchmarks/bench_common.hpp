#pragma once

#include <random>
#include <string>

#include "handover/robot_model.hpp"

namespace handover::bench {

inline std::string data_path(const std::string& relative) {
  return std::string(HANDOVER_BENCH_DATA_DIR) + "/" + relative;
}

/// Uniform configuration inside the joint limits.
inline JointVector random_q(const RobotModel& model, std::mt19937_64& rng) {
  JointVector q(model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    std::uniform_real_distribution<double> u(model.joint(i).q_min, model.joint(i).q_max);
    q[i] = u(rng);
  }
  return q;
}

/// Range argument 0 selects a bundled model.
inline RobotModel model_arg(long index) { return bundled_model(bundled_model_ids().at(static_cast<std::size_t>(index))); }

}  // namespace handover::bench
