#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "handover/kinematics.hpp"

namespace handover {
namespace {

void BM_ForwardKinematics(benchmark::State& state) {
  const RobotModel model = bench::model_arg(state.range(0));
  std::mt19937_64 rng(1);
  const JointVector q = bench::random_q(model, rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward_kinematics(model, q));
  state.SetLabel(model.name());
}
BENCHMARK(BM_ForwardKinematics)->Arg(0)->Arg(1);

void BM_Jacobian(benchmark::State& state) {
  const RobotModel model = bench::model_arg(state.range(0));
  std::mt19937_64 rng(2);
  const JointVector q = bench::random_q(model, rng);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian(model, q));
  state.SetLabel(model.name());
}
BENCHMARK(BM_Jacobian)->Arg(0)->Arg(1);

// IK from a seed 0.1 rad away from a known solution.
void BM_InverseKinematics(benchmark::State& state) {
  const RobotModel model = bench::model_arg(state.range(0));
  const JointVector q_star = model.home();
  const Pose target = forward_kinematics(model, q_star).pose;
  const JointVector seed = model.clamp_to_limits(q_star + JointVector::Constant(model.dof(), 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(inverse_kinematics(model, target, seed));
  state.SetLabel(model.name());
}
BENCHMARK(BM_InverseKinematics)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace handover
