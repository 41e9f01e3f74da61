#include "handover/sim.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "handover/errors.hpp"

namespace handover {

namespace {

constexpr double kRestVelocity = 0.02;      // rad/s
constexpr double kRestAcceleration = 0.2;   // rad/s^2
constexpr std::size_t kRecentFrames = 64;

/// Replays a recorded trajectory on the simulation clock, looping it so a
/// short recording can cover a long scenario.
class SkeletonReplay {
 public:
  explicit SkeletonReplay(std::vector<SkeletonFrame> frames) : frames_(std::move(frames)) {
    const auto n = frames_.size();
    if (n >= 2) {
      const double span = frames_.back().t - frames_.front().t;
      period_ = span + span / static_cast<double>(n - 1);
    }
  }

  /// Appends every frame whose replay time lies in (last consumed, t].
  void advance(double t, std::vector<SkeletonFrame>& out) {
    while (true) {
      const auto n = frames_.size();
      const std::size_t cycle = next_ / n;
      if (cycle > 0 && period_ <= 0.0) return;  // single frame: hold it
      SkeletonFrame f = frames_[next_ % n];
      f.t += static_cast<double>(cycle) * period_;
      if (f.t > t + 1e-9) return;
      out.push_back(std::move(f));
      ++next_;
    }
  }

 private:
  std::vector<SkeletonFrame> frames_;
  double period_ = 0.0;
  std::size_t next_ = 0;
};

double max_abs(const JointVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool at_rest(const ControllerState& s) {
  return max_abs(s.qd) <= kRestVelocity && max_abs(s.qdd) <= kRestAcceleration;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::ordered_json joints_json(const JointVector& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& config)
      : cfg_(config), model_(config.model()), limits_(config.limits.value_or(MotionLimits::from_model(model_))),
        replay_(load_skeleton_trajectory(config.skeleton.string())) {
    if (cfg_.task.home_q.size() == 0) cfg_.task.home_q = model_.home();
    carried_model_ = model_.with_capsule(
        LinkCapsule{model_.tool_link(), Vec3::Zero(), Vec3(0.0, 0.0, cfg_.carried.length), cfg_.carried.radius});
    const JointVector q0 = cfg_.initial_q.value_or(cfg_.task.home_q);
    state_ = ControllerState::at_rest(q0, 0.0);
    q_goal_ = q0;
    tracker_ = JerkTracker(jpc_plan(state_, q0, limits_, cfg_.rates.command_hz));
    held_ = JointVector::Zero(model_.dof());

    log_.scenario = cfg_.name;
    log_.pipeline = cfg_.pipeline;
    log_.dof = model_.dof();
    log_.command_dt = 1.0 / cfg_.rates.command_hz;
    log_.d_min = cfg_.safety.d_min;
    log_.timeline.push_back(StageSpan{Stage::Idle, 0.0, 0.0});
  }

  RunLog run() {
    const std::int64_t safety_hz = cfg_.rates.safety_hz;
    const std::int64_t steps = std::llround(cfg_.duration * static_cast<double>(safety_hz));
    const std::int64_t sub = safety_hz / cfg_.rates.command_hz;
    const double dt = 1.0 / static_cast<double>(safety_hz);
    try {
      for (std::int64_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(safety_hz);
        const std::int64_t p = cfg_.rates.perception_hz;
        if (k == 0 || (k * p) / safety_hz != ((k - 1) * p) / safety_hz) perceive(t);
        update_task(t);
        if (k % sub == 0) track(t);
        const double d = env_.empty() ? std::numeric_limits<double>::infinity()
                                      : min_distance(active_model(), state_.q, env_).d;
        auto& row = log_.rows.back();
        row.min_distance = std::min(row.min_distance, d);
        const JointVector cmd = safe_command(dt, row);
        const auto step = integrate_step(state_, cmd, kind(), dt, limits_);
        state_ = step.state;
        row.clamp_events += step.velocity_clamps + step.acceleration_clamps;
      }
      if (!env_.empty() && !log_.rows.empty()) {
        auto& row = log_.rows.back();
        row.min_distance = std::min(row.min_distance, min_distance(active_model(), state_.q, env_).d);
      }
    } catch (const Error& e) {
      log_.complete = false;
      log_.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    log_.timeline.back().end = state_.t;
    return std::move(log_);
  }

 private:
  CommandKind kind() const {
    return cfg_.pipeline == Pipeline::PreplannedJerk ? CommandKind::Jerk : CommandKind::Acceleration;
  }

  const RobotModel& active_model() const { return task_.object_attached ? carried_model_ : model_; }

  void perceive(double t) {
    const auto before = recent_.size();
    replay_.advance(t, recent_);
    for (auto i = before; i < recent_.size(); ++i) log_.perception.emplace_back(t, recent_[i].t);
    if (recent_.size() > kRecentFrames) {
      recent_.erase(recent_.begin(), recent_.end() - static_cast<std::ptrdiff_t>(kRecentFrames));
    }
    if (recent_.size() > before) env_ = human_capsules(recent_.back(), cfg_.task.body);
  }

  bool motion_complete() const {
    return max_abs(q_goal_ - state_.q) <= cfg_.task.completion_tolerance;
  }

  void update_task(double t) {
    if (next_event_ >= cfg_.events.size()) return;
    const TaskEvent& ev = cfg_.events[next_event_];
    if (ev.t > t + 1e-12 || !motion_complete()) return;
    const Transition tr = step_stage(task_, ev, cfg_.task.return_required);
    ++next_event_;
    if (tr.next.stage != task_.stage) {
      log_.timeline.back().end = t;
      log_.timeline.push_back(StageSpan{tr.next.stage, t, t});
    }
    task_ = tr.next;
    if (!tr.request) return;

    TaskConfig tc = cfg_.task;
    tc.adapt.rng_seed = cfg_.rng_seed + static_cast<std::uint64_t>(log_.goals.size());
    const ResolvedGoal goal = resolve_goal(*tr.request, recent_, active_model(), tc, state_.q);
    GoalRecord rec;
    rec.id = static_cast<int>(log_.goals.size());
    rec.kind = goal.kind;
    rec.t = t;
    rec.q_g = goal.q_g;
    rec.position = fk_position(model_, goal.q_g);
    if (goal.adaptation && goal.adaptation->status != AdaptStatus::NoObstacles) {
      rec.d_seed = goal.adaptation->d_seed;
      rec.d_adapted = goal.adaptation->d;
    }
    log_.goals.push_back(rec);
    q_goal_ = goal.q_g;
    replan_pending_ = true;
  }

  void track(double t) {
    LogRow row;
    row.t = t;
    row.stage = task_.stage;
    row.goal_id = log_.goals.empty() ? -1 : log_.goals.back().id;
    row.min_distance = std::numeric_limits<double>::infinity();
    row.phi = -std::numeric_limits<double>::infinity();
    row.ee = fk_position(model_, state_.q);
    row.q = state_.q;
    row.qd = state_.qd;
    row.qdd = state_.qdd;

    if (cfg_.pipeline == Pipeline::FeedbackAccel) {
      row.tracking_error = max_abs(q_goal_ - state_.q);
      held_ = pd_acceleration(state_, q_goal_, cfg_.pd, limits_.a_max);
    } else {
      if (!replan_pending_ && max_abs(tracker_.reference().q - state_.q) > cfg_.replan_threshold) {
        replan_pending_ = true;
      }
      if (replan_pending_ && at_rest(state_)) {
        tracker_ = JerkTracker(jpc_plan(state_, q_goal_, limits_, cfg_.rates.command_hz));
        replan_pending_ = false;
      }
      row.tracking_error = max_abs(tracker_.reference().q - state_.q);
      held_ = replan_pending_ ? brake_jerk(state_, limits_, 1.0 / cfg_.rates.command_hz)
                              : tracker_.command(state_, limits_);
    }
    log_.rows.push_back(std::move(row));
  }

  JointVector safe_command(double dt, LogRow& row) {
    if (env_.empty()) return held_;
    const DistanceField field = robot_distance_field(active_model(), env_);
    try {
      const FilterResult fr = cfg_.pipeline == Pipeline::PreplannedJerk
                                  ? jssa_filter(held_, state_, field, cfg_.safety, limits_.j_max)
                                  : ssa_filter(held_, state_, field, cfg_.safety, limits_.a_max);
      row.filter_active = row.filter_active || fr.intervened;
      row.phi = std::max(row.phi, fr.index.phi);
      return fr.command;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InfeasibleSafeControl) throw;
      row.filter_active = true;
      return cfg_.pipeline == Pipeline::PreplannedJerk ? brake_jerk(state_, limits_, dt)
                                                       : brake_acceleration(state_, limits_, dt);
    }
  }

  ScenarioConfig cfg_;
  RobotModel model_;
  RobotModel carried_model_ = model_;
  MotionLimits limits_;
  SkeletonReplay replay_;
  std::vector<SkeletonFrame> recent_;
  CapsuleSet env_;
  ControllerState state_;
  TaskState task_;
  std::size_t next_event_ = 0;
  JointVector q_goal_;
  JerkTracker tracker_;
  bool replan_pending_ = false;
  JointVector held_;
  RunLog log_;
};

}  // namespace

RunLog run_scenario(const ScenarioConfig& config) {
  validate_scenario(config);
  return Simulation(config).run();
}

RunSummary summarize(const RunLog& log) {
  RunSummary s;
  s.min_distance = std::numeric_limits<double>::infinity();
  for (const auto& r : log.rows) {
    if (r.min_distance < s.min_distance) {
      s.min_distance = r.min_distance;
      s.min_distance_time = r.t;
    }
    s.max_tracking_error = std::max(s.max_tracking_error, r.tracking_error);
    s.filter_rows += r.filter_active ? 1 : 0;
    s.clamp_events += r.clamp_events;
  }
  for (const auto& span : log.timeline) s.stage_durations[span.stage] += span.end - span.start;
  return s;
}

void write_run_table(const RunLog& log, std::ostream& out) {
  out << "t,stage,goal_id,min_distance,tracking_error,phi,filter_active,clamp_events,ee_x,ee_y,ee_z";
  for (const char* prefix : {"q", "qd", "qdd"}) {
    for (int i = 0; i < log.dof; ++i) out << ',' << prefix << i;
  }
  out << '\n';
  for (const auto& r : log.rows) {
    out << num(r.t) << ',' << to_string(r.stage) << ',' << r.goal_id << ',' << num(r.min_distance) << ','
        << num(r.tracking_error) << ',' << num(r.phi) << ',' << (r.filter_active ? 1 : 0) << ',' << r.clamp_events << ','
        << num(r.ee.x()) << ',' << num(r.ee.y()) << ',' << num(r.ee.z());
    for (const JointVector* v : {&r.q, &r.qd, &r.qdd}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) out << ',' << num((*v)[i]);
    }
    out << '\n';
  }
}

std::string run_summary_json(const RunLog& log) {
  using nlohmann::ordered_json;
  const RunSummary s = summarize(log);
  ordered_json j;
  j["scenario"] = log.scenario;
  j["pipeline"] = std::string(to_string(log.pipeline));
  j["complete"] = log.complete;
  if (!log.complete) j["error"] = log.error;
  j["d_min"] = log.d_min;
  j["min_distance"] = s.min_distance;
  j["min_distance_time"] = s.min_distance_time;
  j["safe"] = s.min_distance >= log.d_min - 1e-6;
  j["max_tracking_error"] = s.max_tracking_error;
  j["filter_rows"] = s.filter_rows;
  j["clamp_events"] = s.clamp_events;
  j["step_order"] = {"perception", "task", "tracking", "safety", "integrate"};
  ordered_json durations = ordered_json::object();
  for (const auto& [stage, dur] : s.stage_durations) durations[std::string(to_string(stage))] = dur;
  j["stage_durations"] = durations;
  auto timeline = ordered_json::array();
  for (const auto& span : log.timeline) {
    timeline.push_back({{"stage", std::string(to_string(span.stage))}, {"start", span.start}, {"end", span.end}});
  }
  j["timeline"] = timeline;
  auto goals = ordered_json::array();
  for (const auto& g : log.goals) {
    ordered_json gj;
    gj["id"] = g.id;
    gj["kind"] = std::string(to_string(g.kind));
    gj["t"] = g.t;
    gj["q_g"] = joints_json(g.q_g);
    gj["position"] = {g.position.x(), g.position.y(), g.position.z()};
    if (g.d_seed) gj["d_seed"] = *g.d_seed;
    if (g.d_adapted) gj["d_adapted"] = *g.d_adapted;
    goals.push_back(gj);
  }
  j["goals"] = goals;
  return j.dump(2) + "\n";
}

RunComparison compare_runs(const RunLog& a, const RunLog& b) {
  if (!a.complete || !b.complete) {
    throw Error(ErrorKind::IncompleteLog, "cannot compare incomplete run logs ('" + a.scenario + "', '" +
                                              b.scenario + "')");
  }
  RunComparison out;
  const RunSummary sa = summarize(a), sb = summarize(b);
  for (const auto& [stage, dur] : sa.stage_durations) {
    if (!sb.stage_durations.count(stage)) {
      out.incomparable.push_back(std::string(to_string(stage)));
    } else {
      out.stage_duration_delta[stage] = sb.stage_durations.at(stage) - dur;
    }
  }
  for (const auto& [stage, dur] : sb.stage_durations) {
    if (!sa.stage_durations.count(stage)) out.incomparable.push_back(std::string(to_string(stage)));
  }
  // Profiles may be sampled at different rates: compare b held at a's stamps.
  std::size_t j = 0;
  for (const auto& ra : a.rows) {
    if (b.rows.empty()) break;
    while (j + 1 < b.rows.size() && b.rows[j + 1].t <= ra.t + 1e-12) ++j;
    const double gap = std::abs(ra.min_distance - b.rows[j].min_distance);
    if (std::isfinite(gap)) out.min_distance_max_gap = std::max(out.min_distance_max_gap, gap);
  }
  const std::size_t ng = std::min(a.goals.size(), b.goals.size());
  for (std::size_t i = 0; i < ng; ++i) {
    if (a.goals[i].kind != b.goals[i].kind) {
      out.incomparable.push_back("goal " + std::to_string(i));
      continue;
    }
    out.goal_position_delta.push_back((a.goals[i].position - b.goals[i].position).norm());
  }
  if (a.goals.size() != b.goals.size()) out.incomparable.push_back("goal count");
  return out;
}

}  // namespace handover
