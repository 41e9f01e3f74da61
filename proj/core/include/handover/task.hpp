#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "handover/adaptation.hpp"
#include "handover/perception.hpp"

namespace handover {

enum class Stage { Idle, Reach, Deliver, Return, Home };

enum class EventKind { HumanRequests, ObjectGrasped, HumanTookObject, HumanReturnedObject, ObjectPlaced, AtHome };

struct TaskEvent {
  EventKind kind = EventKind::HumanRequests;
  double t = 0.0;
};

/// What a stage needs the motion stack to reach.
enum class GoalKind { ObjectPose, Delivery, ObjectHome, HomeConfiguration };

struct TaskState {
  Stage stage = Stage::Idle;
  bool object_attached = false;
  bool awaiting_return = false;  // in Deliver, object handed over, waiting for it back
};

struct Transition {
  TaskState next;
  std::optional<GoalKind> request;  // set exactly when a motion stage is entered
};

/// Handover state machine: Idle -> Reach -> Deliver -> Return -> Home -> Idle,
/// with Return skipped when the human keeps the object. Throws
/// Error(IllegalTransition) for events the current stage cannot accept.
Transition step_stage(const TaskState& current, const TaskEvent& event, bool return_required);

std::string_view to_string(Stage stage);
std::string_view to_string(EventKind kind);
std::string_view to_string(GoalKind kind);
EventKind parse_event_kind(std::string_view name);

struct TaskConfig {
  Pose object_pose;          // where the object is picked and returned
  JointVector home_q;        // home configuration
  DeliverySpec delivery;
  GoalAdaptParams goal_adapt;
  AdaptParams adapt;
  BodyModel body;
  int stats_window = kDefaultStatsWindow;
  bool return_required = true;
  bool adapt_to_user = true;  // run the null-space adaptation for deliveries
  double completion_tolerance = 0.01;  // rad, per joint
};

struct ResolvedGoal {
  GoalKind kind = GoalKind::HomeConfiguration;
  JointVector q_g;
  std::optional<Pose> nominal;  // delivery pose before uncertainty push
  std::optional<Pose> x_G;      // Cartesian goal handed to IK
  std::optional<UncertaintyEstimate> uncertainty;
  std::optional<AdaptResult> adaptation;
};

/// Turns a goal request into a joint goal. Deliveries run the windowed
/// statistics, the uncertainty push and the null-space adaptation; object
/// goals run IK seeded from q_current; home is read from the config.
ResolvedGoal resolve_goal(GoalKind request, std::span<const SkeletonFrame> recent, const RobotModel& model,
                          const TaskConfig& config, const JointVector& q_current);

}  // namespace handover
