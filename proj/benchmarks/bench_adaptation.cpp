#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "handover/problem.hpp"

namespace handover {
namespace {

// Null-space delivery adaptation on the elbow-obstacle fixture.
void BM_UserAdaptElbow(benchmark::State& state) {
  const AdaptProblem problem = load_adapt_problem(bench::data_path("fixtures/elbow_obstacle.json"));
  const RobotModel model = bundled_model(problem.model);
  const JointVector seed = problem.seed_q.value_or(model.home());
  for (auto _ : state) benchmark::DoNotOptimize(user_adapt(model, problem.goal, problem.env, AdaptParams{}, seed));
}
BENCHMARK(BM_UserAdaptElbow)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace handover
