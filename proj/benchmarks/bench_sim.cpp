#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "handover/sim.hpp"

namespace handover {
namespace {

// A bundled scenario cut to its first few simulated seconds.
void BM_RunScenario(benchmark::State& state, const char* name) {
  ScenarioConfig config = load_scenario(bench::data_path(std::string("scenarios/") + name + ".json"));
  config.duration = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(config));
  state.SetItemsProcessed(state.iterations() * state.range(0) * config.rates.safety_hz);  // safety steps
}
BENCHMARK_CAPTURE(BM_RunScenario, jerk_pipeline, "fanuc_dark_near")->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunScenario, accel_pipeline, "kinova_dark_near")->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace handover
