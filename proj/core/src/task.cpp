#include "handover/task.hpp"

#include <string>

#include "handover/errors.hpp"

namespace handover {

namespace {

[[noreturn]] void illegal(const TaskState& s, const TaskEvent& e) {
  throw Error(ErrorKind::IllegalTransition, "event " + std::string(to_string(e.kind)) + " at t=" +
                                                std::to_string(e.t) + " is not accepted in stage " +
                                                std::string(to_string(s.stage)));
}

}  // namespace

Transition step_stage(const TaskState& current, const TaskEvent& event, bool return_required) {
  Transition out;
  out.next = current;
  switch (current.stage) {
    case Stage::Idle:
      if (event.kind != EventKind::HumanRequests) illegal(current, event);
      out.next.stage = Stage::Reach;
      out.request = GoalKind::ObjectPose;
      break;
    case Stage::Reach:
      if (event.kind != EventKind::ObjectGrasped) illegal(current, event);
      out.next.stage = Stage::Deliver;
      out.next.object_attached = true;
      out.request = GoalKind::Delivery;
      break;
    case Stage::Deliver:
      if (!current.awaiting_return && event.kind == EventKind::HumanTookObject) {
        out.next.object_attached = false;
        if (return_required) {
          out.next.awaiting_return = true;
        } else {
          out.next.stage = Stage::Home;
          out.request = GoalKind::HomeConfiguration;
        }
      } else if (current.awaiting_return && event.kind == EventKind::HumanReturnedObject) {
        out.next.stage = Stage::Return;
        out.next.awaiting_return = false;
        out.next.object_attached = true;
        out.request = GoalKind::ObjectHome;
      } else {
        illegal(current, event);
      }
      break;
    case Stage::Return:
      if (event.kind != EventKind::ObjectPlaced) illegal(current, event);
      out.next.stage = Stage::Home;
      out.next.object_attached = false;
      out.request = GoalKind::HomeConfiguration;
      break;
    case Stage::Home:
      if (event.kind != EventKind::AtHome) illegal(current, event);
      out.next.stage = Stage::Idle;
      break;
  }
  return out;
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Idle: return "Idle";
    case Stage::Reach: return "Reach";
    case Stage::Deliver: return "Deliver";
    case Stage::Return: return "Return";
    case Stage::Home: return "Home";
  }
  return "?";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::HumanRequests: return "HumanRequests";
    case EventKind::ObjectGrasped: return "ObjectGrasped";
    case EventKind::HumanTookObject: return "HumanTookObject";
    case EventKind::HumanReturnedObject: return "HumanReturnedObject";
    case EventKind::ObjectPlaced: return "ObjectPlaced";
    case EventKind::AtHome: return "AtHome";
  }
  return "?";
}

std::string_view to_string(GoalKind kind) {
  switch (kind) {
    case GoalKind::ObjectPose: return "ObjectPose";
    case GoalKind::Delivery: return "Delivery";
    case GoalKind::ObjectHome: return "ObjectHome";
    case GoalKind::HomeConfiguration: return "HomeConfiguration";
  }
  return "?";
}

EventKind parse_event_kind(std::string_view name) {
  for (auto k : {EventKind::HumanRequests, EventKind::ObjectGrasped, EventKind::HumanTookObject,
                 EventKind::HumanReturnedObject, EventKind::ObjectPlaced, EventKind::AtHome}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::ConfigError, "unknown task event '" + std::string(name) + "'");
}

ResolvedGoal resolve_goal(GoalKind request, std::span<const SkeletonFrame> recent, const RobotModel& model,
                          const TaskConfig& config, const JointVector& q_current) {
  ResolvedGoal out;
  out.kind = request;
  switch (request) {
    case GoalKind::HomeConfiguration:
      out.q_g = config.home_q;
      return out;
    case GoalKind::ObjectPose:
    case GoalKind::ObjectHome:
      out.x_G = config.object_pose;
      try {
        out.q_g = inverse_kinematics(model, config.object_pose, q_current);
      } catch (const ConvergenceError& e) {
        throw ConvergenceError(ErrorKind::IKFailed, std::string("object goal: ") + e.what(), e.residual());
      }
      return out;
    case GoalKind::Delivery:
      break;
  }

  // The nominal goal comes first so an absent wrist reports MissingKeypoint
  // rather than a short statistics window.
  const SkeletonFrame expected = mean_frame(recent, config.stats_window);
  out.nominal = nominal_goal(expected, config.delivery);
  const auto stats = keypoint_stats(recent, config.delivery.keypoint, config.stats_window);
  out.uncertainty = stats.uncertainty;
  out.x_G = adapt_goal(*out.nominal, stats.uncertainty, config.goal_adapt);
  const CapsuleSet env = config.adapt_to_user ? human_capsules(expected, config.body) : CapsuleSet{};
  out.adaptation = user_adapt(model, *out.x_G, env, config.adapt, q_current);
  out.q_g = out.adaptation->q_g;
  return out;
}

}  // namespace handover
