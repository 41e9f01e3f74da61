// handover: command-line front end for the simulated handover stack.
//
//   handover run SCENARIO [--out DIR] [--seed N]
//   handover adapt (--problem FILE | --model ID --goal X Y Z [--orientation W X Y Z] [--env FILE]) [params]
//   handover stats TRAJECTORY [--keypoint NAME] [--window N]
//   handover models
//   handover validate SCENARIO
//
// Every failure prints one line "error[Kind]: message" to stderr and exits 1
// (usage errors exit 2).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "handover/errors.hpp"
#include "handover/problem.hpp"
#include "handover/sim.hpp"

namespace fs = std::filesystem;
using namespace handover;

namespace {

constexpr const char* kSchemaHelp = R"(File formats:
  scenario   JSON: robot | robot_file, pipeline (preplanned-jerk | feedback-accel),
             rates{command_hz, safety_hz, perception_hz}, skeleton (JSON-lines path,
             relative to the scenario), events[{kind, t}], duration, rng_seed,
             safety{d_min, k_v, k_a, eta}, object{position, orientation},
             delivery{keypoint, offset, orientation}, goal_adapt{lambda, u_safe}, ...
  skeleton   one JSON object per line: {"t": s, "keypoints": {name: [x, y, z]},
             "confidence": {name: c}}; '#' lines are comments
  problem    {"model", "goal": {"position", "orientation"}, "seed_q", "capsules"}
  env        {"capsules": [{"a": [..], "b": [..], "radius": r, "label": ".."}]}
Outputs of `run`: run.csv (t, stage, goal_id, min_distance, tracking_error, phi,
  filter_active, clamp_events, ee_x, ee_y, ee_z, q*, qd*, qdd*) and summary.json.)";

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string vec_str(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

int cmd_run(const std::string& path, const std::string& out_dir, std::optional<std::uint64_t> seed) {
  ScenarioConfig cfg = load_scenario(path);
  if (seed) cfg.rng_seed = *seed;
  const auto t0 = std::chrono::steady_clock::now();
  const RunLog log = run_scenario(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(out_dir);
  {
    std::ofstream csv(fs::path(out_dir) / "run.csv");
    write_run_table(log, csv);
  }
  {
    std::ofstream js(fs::path(out_dir) / "summary.json");
    js << run_summary_json(log);
  }
  const RunSummary s = summarize(log);
  std::cout << log.scenario << " [" << to_string(log.pipeline) << "] min_distance=" << fmt(s.min_distance, "%.4f")
            << " m (d_min " << fmt(log.d_min, "%.3f") << ") filter_rows=" << s.filter_rows
            << " clamp_events=" << s.clamp_events << " wall=" << fmt(wall, "%.2f") << " s\n  stages:";
  for (const auto& [stage, dur] : s.stage_durations) std::cout << ' ' << to_string(stage) << '=' << fmt(dur, "%.3f");
  std::cout << '\n';
  if (!log.complete) throw Error(ErrorKind::IncompleteLog, "run aborted: " + log.error);
  return 0;
}

struct AdaptArgs {
  std::string problem, model, env;
  std::vector<double> goal, orientation, seed_q;
  AdaptParams params;
};

int cmd_adapt(const AdaptArgs& a) {
  AdaptProblem p;
  if (!a.problem.empty()) {
    p = load_adapt_problem(a.problem);
  } else {
    if (a.model.empty() || a.goal.size() != 3) {
      throw Error(ErrorKind::ConfigError, "adapt needs --problem or --model with --goal X Y Z");
    }
    p.model = a.model;
    p.goal.p = Vec3(a.goal[0], a.goal[1], a.goal[2]);
  }
  if (!a.orientation.empty()) {
    if (a.orientation.size() != 4) throw Error(ErrorKind::ConfigError, "--orientation takes W X Y Z");
    p.goal.orientation =
        Eigen::Quaterniond(a.orientation[0], a.orientation[1], a.orientation[2], a.orientation[3]).normalized();
  }
  if (!a.env.empty()) p.env = load_capsule_set(a.env);
  if (!a.seed_q.empty()) p.seed_q = Eigen::Map<const Eigen::VectorXd>(a.seed_q.data(), a.seed_q.size());
  if (!a.model.empty()) p.model = a.model;

  const RobotModel model = bundled_model(p.model);
  a.params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const AdaptResult r = user_adapt(model, p.goal, p.env, a.params, p.seed_q.value_or(model.home()));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const Vec3 x = fk_position(model, r.q_g);
  std::cout << "model     " << model.name() << '\n'
            << "x_G       " << vec_str(p.goal.p) << '\n'
            << "q_G       " << vec_str(r.q_seed) << '\n'
            << "q_g       " << vec_str(r.q_g) << '\n';
  if (r.status == AdaptStatus::NoObstacles) {
    std::cout << "no obstacles; seed returned\n";
  } else {
    std::cout << "d_before  " << fmt(r.d_seed) << " m\n"
              << "d_after   " << fmt(r.d) << " m\n"
              << "V_before  " << fmt(r.V_seed) << '\n'
              << "V_after   " << fmt(r.V) << '\n'
              << "e_omega   " << fmt(r.e_omega) << " rad\n"
              << "iters     " << r.iters_used << '\n';
    if (r.status == AdaptStatus::NoNullSpace) std::cout << "no null space at the seed; seed returned\n";
  }
  std::cout << "pos_error " << fmt((x - p.goal.p).norm(), "%.3e") << " m\n"
            << "wall_time " << fmt(wall, "%.4f") << " s\n";
  return 0;
}

int cmd_stats(const std::string& path, const std::string& keypoint, int window) {
  const auto frames = load_skeleton_trajectory(path);
  const KeypointStats s = keypoint_stats(frames, keypoint, window);
  std::cout << "keypoint " << keypoint << ", window " << s.uncertainty.window << " frames\n"
            << "axis   sigma_cm    mean_m\n";
  const char* axes[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    std::cout << axes[i] << "    " << fmt(100.0 * s.uncertainty.sigma[i], "%9.4f") << "  "
              << fmt(s.mean[i], "%9.5f") << '\n';
  }
  return 0;
}

int cmd_models() {
  for (const auto& id : bundled_model_ids()) {
    const RobotModel m = bundled_model(id);
    std::cout << id << "  dof=" << m.dof() << " capsules=" << m.capsules().size() << '\n';
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  const ScenarioConfig cfg = load_scenario(path);
  validate_scenario(cfg);
  std::cout << "ok: " << cfg.name << " (" << cfg.model().name() << ", " << to_string(cfg.pipeline) << ", "
            << cfg.events.size() << " events, " << cfg.duration << " s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated safe human-robot handover stack"};
  app.footer(kSchemaHelp);
  app.require_subcommand(1);

  std::string scenario, out_dir = "out";
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Simulate a scenario and export run.csv and summary.json");
  run->add_option("scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Override the scenario RNG seed");

  AdaptArgs aa;
  auto* adapt = app.add_subcommand("adapt", "Run the delivery-pose adaptation on one goal");
  adapt->add_option("--problem", aa.problem, "Problem JSON (model, goal, seed_q, capsules)");
  adapt->add_option("--model", aa.model, "Bundled model id");
  adapt->add_option("--goal", aa.goal, "Goal position X Y Z (m)")->expected(3);
  adapt->add_option("--orientation", aa.orientation, "Goal orientation quaternion W X Y Z")->expected(4);
  adapt->add_option("--seed-q", aa.seed_q, "IK seed configuration (rad)")->expected(-1);
  adapt->add_option("--env", aa.env, "Environment capsule JSON");
  adapt->add_option("--alpha", aa.params.alpha, "Null-space step (rad)")->capture_default_str();
  adapt->add_option("--lambda-omega", aa.params.lambda_omega, "Orientation weight")->capture_default_str();
  adapt->add_option("--iters", aa.params.max_iters, "Iteration budget")->capture_default_str();
  adapt->add_option("--rng-seed", aa.params.rng_seed, "Random-walk seed")->capture_default_str();

  std::string traj, keypoint = "right_wrist";
  int window = kDefaultStatsWindow;
  auto* stats = app.add_subcommand("stats", "Per-axis keypoint standard deviation over the last N frames");
  stats->add_option("trajectory", traj, "Skeleton JSON-lines file")->required();
  stats->add_option("--keypoint", keypoint, "Keypoint name")->capture_default_str();
  stats->add_option("--window", window, "Frames in the window")->capture_default_str();

  auto* models = app.add_subcommand("models", "List bundled robot models");

  std::string vpath;
  auto* validate = app.add_subcommand("validate", "Check a scenario without simulating it");
  validate->add_option("scenario", vpath, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[Usage]: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (*run) return cmd_run(scenario, out_dir, seed);
    if (*adapt) return cmd_adapt(aa);
    if (*stats) return cmd_stats(traj, keypoint, window);
    if (*models) return cmd_models();
    if (*validate) return cmd_validate(vpath);
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
