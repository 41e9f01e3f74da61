#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "handover/control.hpp"
#include "handover/perception.hpp"

namespace handover {
namespace {

struct FilterSetup {
  RobotModel model = bundled_model("kinova-gen3-like");
  CapsuleSet body;
  ControllerState state;
  JointVector nominal;

  FilterSetup() {
    body = human_capsules(load_skeleton_trajectory(bench::data_path("fixtures/tpose.jsonl")).front());
    state.q = model.home();
    state.qd = JointVector::Constant(model.dof(), 0.3);
    state.qdd = JointVector::Zero(model.dof());
    nominal = JointVector::Constant(model.dof(), 1.0);
  }
};

void BM_SsaFilter(benchmark::State& state) {
  const FilterSetup s;
  for (auto _ : state) benchmark::DoNotOptimize(ssa_filter(s.nominal, s.state, s.model, s.body, SafetyParams{}));
}
BENCHMARK(BM_SsaFilter)->Unit(benchmark::kMicrosecond);

void BM_JssaFilter(benchmark::State& state) {
  const FilterSetup s;
  for (auto _ : state) benchmark::DoNotOptimize(jssa_filter(s.nominal, s.state, s.model, s.body, SafetyParams{}));
}
BENCHMARK(BM_JssaFilter)->Unit(benchmark::kMicrosecond);

// Rest-to-rest plan between two random configurations at 125 Hz.
void BM_JpcPlan(benchmark::State& state) {
  const RobotModel model = bench::model_arg(state.range(0));
  const MotionLimits limits = MotionLimits::from_model(model);
  std::mt19937_64 rng(6);
  const JointVector a = bench::random_q(model, rng), b = bench::random_q(model, rng);
  for (auto _ : state) benchmark::DoNotOptimize(jpc_plan(ControllerState::at_rest(a), b, limits));
  state.SetLabel(model.name());
}
BENCHMARK(BM_JpcPlan)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace handover
