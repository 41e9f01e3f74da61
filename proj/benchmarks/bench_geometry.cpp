#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "handover/geometry.hpp"
#include "handover/perception.hpp"

namespace handover {
namespace {

void BM_CapsuleDistance(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::pair<Capsule, Capsule>> pairs;
  for (int k = 0; k < 256; ++k) {
    pairs.push_back({{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)), 0.05},
                     {Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)), 0.05}});
  }
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[k++ & 255];
    benchmark::DoNotOptimize(capsule_distance(a, b));
  }
}
BENCHMARK(BM_CapsuleDistance);

// Robot-to-body clearance and its gradient against a T-pose skeleton.
void BM_RobotHumanClearance(benchmark::State& state) {
  const RobotModel model = bench::model_arg(state.range(0));
  const CapsuleSet body = human_capsules(load_skeleton_trajectory(bench::data_path("fixtures/tpose.jsonl")).front());
  std::mt19937_64 rng(5);
  const JointVector q = bench::random_q(model, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pair_clearances(model, q, body));
  state.SetLabel(model.name());
}
BENCHMARK(BM_RobotHumanClearance)->Arg(0)->Arg(1);

}  // namespace
}  // namespace handover
