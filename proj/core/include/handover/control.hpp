#pragma once

#include <functional>
#include <vector>

#include "handover/geometry.hpp"
#include "handover/robot_model.hpp"

namespace handover {

struct MotionLimits {
  JointVector v_max;
  JointVector a_max;
  JointVector j_max;

  static MotionLimits from_model(const RobotModel& model);
  int dof() const { return static_cast<int>(v_max.size()); }
  /// Throws Error(InvalidLimits) on size mismatch or non-positive entries.
  void validate() const;
};

struct ControllerState {
  JointVector q;
  JointVector qd;
  JointVector qdd;
  double t = 0.0;

  static ControllerState at_rest(const JointVector& q, double t = 0.0);
  int dof() const { return static_cast<int>(q.size()); }
};

// ---------------------------------------------------------------------------
// Jerk-bounded position planning

/// Straight-line, time-synchronised S-curve on a fixed sample grid. Jerk is
/// constant over each sample period, so samples[k + 1] is the exact integral
/// of samples[k] under jerk[k]. Ramps may end in a fractional jerk sample, so
/// the duration stays within one period of the continuous-time optimum.
struct JpcPlan {
  double dt = 0.0;
  int n_jerk = 0;   // full-jerk samples per acceleration ramp
  int n_accel = 0;  // samples at peak acceleration
  std::vector<JointVector> jerk;
  std::vector<ControllerState> samples;  // samples.size() == jerk.size() + 1

  double duration() const { return dt * static_cast<double>(jerk.size()); }
  bool empty() const { return jerk.empty(); }
};

/// Plans a rest-to-rest move from start.q to q_goal. Velocity and
/// acceleration of `start` are not part of the plan; the streaming tracker
/// absorbs them through feedback.
JpcPlan jpc_plan(const ControllerState& start, const JointVector& q_goal, const MotionLimits& limits,
                 double rate_hz = 125.0);

/// Streams a JpcPlan: the nominal jerk at each command tick is the planned
/// jerk plus state feedback toward the planned sample.
class JerkTracker {
 public:
  JerkTracker() = default;
  JerkTracker(JpcPlan plan, double feedback_pole = 6.0);

  /// Jerk for the next command period; advances the reference by one sample.
  JointVector command(const ControllerState& state, const MotionLimits& limits);
  const ControllerState& reference() const;
  bool finished() const { return index_ >= plan_.jerk.size(); }
  bool has_plan() const { return !plan_.samples.empty(); }
  const JpcPlan& plan() const { return plan_; }

 private:
  JpcPlan plan_;
  std::size_t index_ = 0;
  double pole_ = 6.0;
};

// ---------------------------------------------------------------------------
// Acceleration-level tracking

struct PdGains {
  double kp = 4.0;  // 1/s^2
  double kd = 4.0;  // 1/s
};

/// u = kp (q_ref - q) - kd qd, clamped componentwise to +-a_max.
JointVector pd_acceleration(const ControllerState& state, const JointVector& q_ref, const PdGains& gains,
                            const JointVector& a_max);

// ---------------------------------------------------------------------------
// Safety index and safe set filters

struct SafetyParams {
  double d_min = 0.10;  // m
  double k_v = 1.0;     // s
  double k_a = 0.2;     // s^2, jerk order only
  double eta = 5.0;     // 1/s

  void validate() const;
};

enum class SafetyOrder { Acceleration, Jerk };

/// Clearance of one monitored pair and its joint-space gradient.
struct DistanceSample {
  double d = 0.0;
  JointVector grad;
};

/// Clearances of every monitored pair as a function of configuration. The
/// number and order of entries must not depend on q.
using DistanceField = std::function<std::vector<DistanceSample>(const JointVector&)>;

/// pair_clearances of a robot against a fixed environment.
DistanceField robot_distance_field(const RobotModel& model, const CapsuleSet& env);

struct SafetyIndex {
  double phi = 0.0;
  double d = 0.0;       // clearance of the critical pair
  double d_dot = 0.0;
  double d_ddot = 0.0;  // jerk order only
  JointVector grad;     // dd/dq of the critical pair
  int pair = -1;        // index into the field's entries
};

/// Per pair: phi_i = d_min - d_i - k_v d_i' (acceleration order), minus
/// k_a d_i'' at jerk order, with d_i' = grad_i . qd and d_i'' a central
/// difference of d_i' along the current motion. The index is the largest
/// phi_i (the critical pair), which stays continuous when the closest pair
/// changes. For a single pair this is d_min - d - k_v d' (- k_a d'').
/// phi > 0 flags an unsafe tendency.
SafetyIndex safety_index(const DistanceField& field, const ControllerState& state, const SafetyParams& params,
                         SafetyOrder order);
SafetyIndex safety_index(const RobotModel& model, const ControllerState& state, const CapsuleSet& env,
                         const SafetyParams& params, SafetyOrder order);

struct FilterResult {
  JointVector command;
  bool intervened = false;
  SafetyIndex index;     // critical pair
  int active_pairs = 0;  // pairs with phi_i >= 0, each contributing a constraint
};

/// Minimum-norm change of `nominal` satisfying row . u <= bound.
JointVector project_halfspace(const JointVector& nominal, const JointVector& row, double bound);

/// Minimum-norm change of `nominal` satisfying row . u <= bound and
/// |u_i| <= limit_i. Equals clamp(project_halfspace(...)) whenever that point
/// already lies in the box; when the two constraints cannot both hold, the
/// command that pushes hardest along -row within the box.
JointVector project_halfspace_box(const JointVector& nominal, const JointVector& row, double bound,
                                  const JointVector& limit);

/// Acceleration-level filter: identity while phi < 0. Otherwise every pair
/// with phi_i >= 0 contributes phi_i' <= -eta phi_i; a single such pair is
/// handled by the closed-form projection, several by the exact
/// minimum-norm solution of the stacked constraints, all within |u| <= a_max.
/// Throws Error(InfeasibleSafeControl) when the constraint row vanishes.
FilterResult ssa_filter(const JointVector& u_nom, const ControllerState& state, const DistanceField& field,
                        const SafetyParams& params, const JointVector& a_max);
FilterResult ssa_filter(const JointVector& u_nom, const ControllerState& state, const RobotModel& model,
                        const CapsuleSet& env, const SafetyParams& params);

/// Jerk-level counterpart of ssa_filter, bounded by j_max.
FilterResult jssa_filter(const JointVector& j_nom, const ControllerState& state, const DistanceField& field,
                         const SafetyParams& params, const JointVector& j_max);
FilterResult jssa_filter(const JointVector& j_nom, const ControllerState& state, const RobotModel& model,
                         const CapsuleSet& env, const SafetyParams& params);

/// Maximum braking commands, used when a filter reports infeasibility.
JointVector brake_acceleration(const ControllerState& state, const MotionLimits& limits, double dt);
JointVector brake_jerk(const ControllerState& state, const MotionLimits& limits, double dt);

// ---------------------------------------------------------------------------
// Plant integration

enum class CommandKind { Jerk, Acceleration };

struct StepResult {
  ControllerState state;
  int velocity_clamps = 0;
  int acceleration_clamps = 0;
};

/// Exact integration of a command held constant over dt, followed by
/// clamping of velocity (and acceleration) to the limits.
StepResult integrate_step(const ControllerState& state, const JointVector& command, CommandKind kind, double dt,
                          const MotionLimits& limits);

}  // namespace handover
