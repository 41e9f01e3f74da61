#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "handover/errors.hpp"
#include "handover/problem.hpp"
#include "handover/sim.hpp"

namespace handover {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

Vec3 vec3_of(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) config_error("'" + key + "' must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

/// Quaternions are written [w, x, y, z].
Eigen::Quaterniond quat_of(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 4) config_error("'" + key + "' must be a quaternion [w, x, y, z]");
  Eigen::Quaterniond q(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
  if (q.norm() < 1e-12) config_error("'" + key + "' is a zero quaternion");
  return q.normalized();
}

JointVector joints_of(const json& j, const std::string& key) {
  if (!j.is_array()) config_error("'" + key + "' must be an array");
  JointVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

/// A limit may be one scalar for every joint or a per-joint array.
JointVector limit_of(const json& j, int dof, const std::string& key) {
  if (j.is_number()) return JointVector::Constant(dof, j.get<double>());
  JointVector v = joints_of(j, key);
  if (v.size() != dof) config_error("'" + key + "' has " + std::to_string(v.size()) + " entries, expected " +
                                    std::to_string(dof));
  return v;
}

Pipeline pipeline_of(const std::string& s) {
  if (s == "preplanned-jerk") return Pipeline::PreplannedJerk;
  if (s == "feedback-accel") return Pipeline::FeedbackAccel;
  config_error("unknown pipeline '" + s + "' (expected preplanned-jerk or feedback-accel)");
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ScenarioNotFound, std::string(what) + " not found: '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
  }
}

CapsuleSet capsules_of(const json& arr) {
  CapsuleSet env;
  for (const auto& c : arr) {
    const double r = c.at("radius").get<double>();
    if (!(r > 0.0)) config_error("capsule radius must be positive");
    env.add(Capsule{vec3_of(c.at("a"), "a"), vec3_of(c.at("b"), "b"), r},
            c.value("label", "capsule" + std::to_string(env.size())));
  }
  return env;
}

}  // namespace

AdaptProblem parse_adapt_problem(const std::string& json_text) {
  const json doc = parse_json(json_text, "adapt problem");
  AdaptProblem p;
  try {
    p.model = doc.at("model").get<std::string>();
    const auto& g = doc.at("goal");
    p.goal.p = vec3_of(g.at("position"), "goal.position");
    if (g.contains("orientation")) p.goal.orientation = quat_of(g["orientation"], "goal.orientation");
    if (doc.contains("seed_q")) p.seed_q = joints_of(doc["seed_q"], "seed_q");
    p.env = capsules_of(doc.value("capsules", json::array()));
  } catch (const json::exception& e) {
    config_error(std::string("adapt problem: ") + e.what());
  }
  return p;
}

AdaptProblem load_adapt_problem(const std::filesystem::path& path) {
  return parse_adapt_problem(read_file(path, "adapt problem"));
}

CapsuleSet parse_capsule_set(const std::string& json_text) {
  const json doc = parse_json(json_text, "environment");
  try {
    return capsules_of(doc.at("capsules"));
  } catch (const json::exception& e) {
    config_error(std::string("environment: ") + e.what());
  }
}

CapsuleSet load_capsule_set(const std::filesystem::path& path) {
  return parse_capsule_set(read_file(path, "environment"));
}

std::string_view to_string(Pipeline p) {
  return p == Pipeline::PreplannedJerk ? "preplanned-jerk" : "feedback-accel";
}

RobotModel ScenarioConfig::model() const {
  if (!robot_file.empty()) return load_robot_model(robot_file.string());
  return bundled_model(robot);
}

ScenarioConfig parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(json_text, "scenario");
  ScenarioConfig c;
  try {
    c.name = doc.value("name", std::string("unnamed"));
    if (doc.contains("robot_file")) {
      c.robot_file = base_dir / doc["robot_file"].get<std::string>();
    } else {
      c.robot = doc.at("robot").get<std::string>();
    }
    c.pipeline = pipeline_of(doc.value("pipeline", std::string("preplanned-jerk")));
    if (c.pipeline == Pipeline::FeedbackAccel) c.rates = Rates{30, 120, 30};
    if (doc.contains("rates")) {
      const auto& r = doc["rates"];
      c.rates.command_hz = r.value("command_hz", c.rates.command_hz);
      c.rates.safety_hz = r.value("safety_hz", c.rates.safety_hz);
      c.rates.perception_hz = r.value("perception_hz", c.rates.perception_hz);
    }
    c.skeleton = base_dir / doc.at("skeleton").get<std::string>();
    for (const auto& e : doc.value("events", json::array())) {
      c.events.push_back(TaskEvent{parse_event_kind(e.at("kind").get<std::string>()), e.at("t").get<double>()});
    }
    if (doc.contains("safety")) {
      const auto& s = doc["safety"];
      c.safety.d_min = s.value("d_min", c.safety.d_min);
      c.safety.k_v = s.value("k_v", c.safety.k_v);
      c.safety.k_a = s.value("k_a", c.safety.k_a);
      c.safety.eta = s.value("eta", c.safety.eta);
    }
    if (doc.contains("pd")) {
      c.pd.kp = doc["pd"].value("kp", c.pd.kp);
      c.pd.kd = doc["pd"].value("kd", c.pd.kd);
    }
    if (doc.contains("goal_adapt")) {
      const auto& g = doc["goal_adapt"];
      if (g.contains("lambda")) c.task.goal_adapt.lambda = vec3_of(g["lambda"], "goal_adapt.lambda");
      if (g.contains("u_safe")) c.task.goal_adapt.u_safe = vec3_of(g["u_safe"], "goal_adapt.u_safe");
    }
    if (doc.contains("adapt")) {
      const auto& a = doc["adapt"];
      c.task.adapt.alpha = a.value("alpha", c.task.adapt.alpha);
      c.task.adapt.lambda_omega = a.value("lambda_omega", c.task.adapt.lambda_omega);
      c.task.adapt.max_iters = a.value("max_iters", c.task.adapt.max_iters);
    }
    c.task.adapt_to_user = doc.value("adapt_to_user", true);
    if (doc.contains("object")) {
      const auto& o = doc["object"];
      c.task.object_pose.p = vec3_of(o.at("position"), "object.position");
      if (o.contains("orientation")) c.task.object_pose.orientation = quat_of(o["orientation"], "object.orientation");
    }
    if (doc.contains("delivery")) {
      const auto& d = doc["delivery"];
      c.task.delivery.keypoint = d.value("keypoint", c.task.delivery.keypoint);
      if (d.contains("offset")) c.task.delivery.offset = vec3_of(d["offset"], "delivery.offset");
      if (d.contains("orientation")) c.task.delivery.orientation = quat_of(d["orientation"], "delivery.orientation");
    }
    if (doc.contains("body")) {
      const auto& b = doc["body"];
      c.task.body.torso_radius = b.value("torso_radius", c.task.body.torso_radius);
      c.task.body.head_radius = b.value("head_radius", c.task.body.head_radius);
      c.task.body.limb_radius = b.value("limb_radius", c.task.body.limb_radius);
      c.task.body.hand_length = b.value("hand_length", c.task.body.hand_length);
    }
    if (doc.contains("carried_object")) {
      c.carried.length = doc["carried_object"].value("length", c.carried.length);
      c.carried.radius = doc["carried_object"].value("radius", c.carried.radius);
    }
    if (doc.contains("home")) c.task.home_q = joints_of(doc["home"], "home");
    if (doc.contains("initial_q")) c.initial_q = joints_of(doc["initial_q"], "initial_q");
    c.task.return_required = doc.value("return_required", true);
    c.task.completion_tolerance = doc.value("completion_tolerance", c.task.completion_tolerance);
    c.task.stats_window = doc.value("stats_window", c.task.stats_window);
    c.duration = doc.at("duration").get<double>();
    c.rng_seed = doc.value("rng_seed", std::uint64_t{0});
    c.replan_threshold = doc.value("replan_threshold", c.replan_threshold);

    if (doc.contains("limits")) {
      const RobotModel m = c.model();
      MotionLimits lim = MotionLimits::from_model(m);
      const auto& l = doc["limits"];
      if (l.contains("v_max")) lim.v_max = limit_of(l["v_max"], m.dof(), "limits.v_max");
      if (l.contains("a_max")) lim.a_max = limit_of(l["a_max"], m.dof(), "limits.a_max");
      if (l.contains("j_max")) lim.j_max = limit_of(l["j_max"], m.dof(), "limits.j_max");
      c.limits = lim;
    }
  } catch (const json::exception& e) {
    config_error(std::string("scenario: ") + e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path, "scenario"), path.parent_path());
}

void validate_scenario(const ScenarioConfig& c) {
  const auto& r = c.rates;
  if (r.command_hz <= 0 || r.safety_hz <= 0 || r.perception_hz <= 0) config_error("rates must be positive");
  if (r.safety_hz < r.command_hz) {
    config_error("invariant violated: safety rate (" + std::to_string(r.safety_hz) +
                 " Hz) must be >= command rate (" + std::to_string(r.command_hz) + " Hz)");
  }
  if (r.safety_hz % r.command_hz != 0) config_error("safety rate must be an integer multiple of the command rate");
  if (!(c.duration > 0.0)) config_error("duration must be positive");
  RobotModel model = [&] {
    try {
      return c.model();
    } catch (const Error& e) {
      config_error(std::string("robot: ") + e.what());
    }
  }();
  if (!std::filesystem::exists(c.skeleton)) {
    config_error("skeleton trajectory not found: '" + c.skeleton.string() + "'");
  }
  for (std::size_t i = 1; i < c.events.size(); ++i) {
    if (c.events[i].t < c.events[i - 1].t) config_error("event script timestamps must be non-decreasing");
  }
  // Replay the script through the state machine to catch ordering bugs early.
  TaskState st;
  for (const auto& e : c.events) {
    try {
      st = step_stage(st, e, c.task.return_required).next;
    } catch (const Error& e2) {
      config_error(std::string("event script: ") + e2.what());
    }
  }
  c.safety.validate();
  c.task.goal_adapt.validate();
  c.task.adapt.validate();
  if (c.limits) {
    c.limits->validate();
    if (c.limits->dof() != model.dof()) config_error("limit overrides do not match the robot dof");
  }
  if (c.task.home_q.size() != 0 && c.task.home_q.size() != model.dof()) config_error("home has the wrong length");
  if (c.initial_q && c.initial_q->size() != model.dof()) config_error("initial_q has the wrong length");
  if (c.task.stats_window < 2) config_error("stats_window must be at least 2");
  if (!(c.carried.radius > 0.0) || c.carried.length < 0.0) config_error("carried object dimensions invalid");
}

}  // namespace handover
