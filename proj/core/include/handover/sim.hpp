#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "handover/control.hpp"
#include "handover/task.hpp"

namespace handover {

enum class Pipeline {
  PreplannedJerk,  // streamed jerk-bounded plan + jerk-level filter (FANUC-style)
  FeedbackAccel,   // low-rate PD + acceleration-level filter (Kinova-style)
};

std::string_view to_string(Pipeline p);

struct Rates {
  int command_hz = 125;
  int safety_hz = 1000;
  int perception_hz = 30;
};

struct CarriedObject {
  double length = 0.12;  // along the tool z axis, m
  double radius = 0.04;
};

struct ScenarioConfig {
  std::string name;
  std::string robot;                  // bundled model id
  std::filesystem::path robot_file;   // alternative to `robot`
  Pipeline pipeline = Pipeline::PreplannedJerk;
  Rates rates;
  std::filesystem::path skeleton;     // resolved against the scenario file
  std::vector<TaskEvent> events;
  SafetyParams safety;
  PdGains pd;
  std::optional<MotionLimits> limits;  // defaults to the model's limits
  TaskConfig task;                     // home_q empty = model home
  std::optional<JointVector> initial_q;
  CarriedObject carried;
  double duration = 20.0;
  std::uint64_t rng_seed = 0;
  double replan_threshold = 0.05;  // rad, jerk pipeline

  RobotModel model() const;
};

ScenarioConfig parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir = {});
/// Throws Error(ScenarioNotFound) when the file does not exist.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Schema and cross-reference checks without running anything. Throws
/// Error(ConfigError) naming the violated rule.
void validate_scenario(const ScenarioConfig& config);

struct LogRow {
  double t = 0.0;
  Stage stage = Stage::Idle;
  int goal_id = -1;
  double min_distance = 0.0;   // minimum over the safety steps of this command period
  double tracking_error = 0.0; // max joint error to the tracking reference
  double phi = 0.0;            // largest safety index seen by the filter this period
  bool filter_active = false;
  int clamp_events = 0;
  Vec3 ee = Vec3::Zero();
  JointVector q, qd, qdd;
};

struct GoalRecord {
  int id = 0;
  GoalKind kind = GoalKind::HomeConfiguration;
  double t = 0.0;
  JointVector q_g;
  Vec3 position = Vec3::Zero();  // tool position at q_g
  std::optional<double> d_seed;
  std::optional<double> d_adapted;
};

struct StageSpan {
  Stage stage = Stage::Idle;
  double start = 0.0;
  double end = 0.0;
};

struct RunLog {
  std::string scenario;
  Pipeline pipeline = Pipeline::PreplannedJerk;
  int dof = 0;
  double command_dt = 0.0;
  double d_min = 0.0;
  std::vector<LogRow> rows;
  std::vector<GoalRecord> goals;
  std::vector<StageSpan> timeline;
  std::vector<std::pair<double, double>> perception;  // (sim time, frame time) per consumed frame
  bool complete = true;
  std::string error;
};

struct RunSummary {
  double min_distance = 0.0;
  double min_distance_time = 0.0;
  double max_tracking_error = 0.0;
  int filter_rows = 0;
  int clamp_events = 0;
  std::map<Stage, double> stage_durations;
};

/// Recomputes the summary from the time series.
RunSummary summarize(const RunLog& log);

/// Fixed-step closed loop at the safety rate. Module errors abort the run;
/// the partial log is returned with complete = false and the error text.
RunLog run_scenario(const ScenarioConfig& config);

/// Column order: t, stage, goal_id, min_distance, tracking_error, phi,
/// filter_active, clamp_events, ee_x, ee_y, ee_z, q0.., qd0.., qdd0..
void write_run_table(const RunLog& log, std::ostream& out);
std::string run_summary_json(const RunLog& log);

struct RunComparison {
  std::vector<std::string> incomparable;       // stages present in only one run
  std::map<Stage, double> stage_duration_delta; // b - a
  double min_distance_max_gap = 0.0;
  std::vector<double> goal_position_delta;      // per matched goal, m
};

/// Throws Error(IncompleteLog) when either log is incomplete.
RunComparison compare_runs(const RunLog& a, const RunLog& b);

}  // namespace handover
