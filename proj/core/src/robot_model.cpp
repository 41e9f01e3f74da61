#include "handover/robot_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "handover/errors.hpp"

namespace handover {

namespace detail {
extern const std::string_view kFanucModelJson;
extern const std::string_view kKinovaModelJson;
}  // namespace detail

namespace {

constexpr std::string_view kFanucId = "fanuc-lrmate-200id7l-like";
constexpr std::string_view kKinovaId = "kinova-gen3-like";

void check_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidModel, what + " must be strictly positive");
  }
}

Vec3 read_vec3(const nlohmann::json& j, const char* key) {
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 3) {
    throw Error(ErrorKind::InvalidModel, std::string("'") + key + "' must be a 3-element array");
  }
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

}  // namespace

RobotModel::RobotModel(std::string name, std::vector<JointSpec> joints, ToolSpec tool,
                       std::vector<LinkCapsule> capsules, JointVector home)
    : name_(std::move(name)), joints_(std::move(joints)), tool_(tool), capsules_(std::move(capsules)),
      home_(std::move(home)) {
  if (joints_.empty()) {
    throw Error(ErrorKind::InvalidModel, "model '" + name_ + "' needs at least one joint");
  }
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const auto& j = joints_[i];
    const std::string tag = "joint " + std::to_string(i + 1);
    check_positive(j.v_max, tag + " v_max");
    check_positive(j.a_max, tag + " a_max");
    check_positive(j.j_max, tag + " j_max");
    if (!(j.q_min < j.q_max)) {
      throw Error(ErrorKind::InvalidModel, tag + ": lower position limit must be below upper");
    }
  }
  for (const auto& c : capsules_) {
    check_positive(c.radius, "capsule radius");
    if (c.link < 0 || c.link > dof() + 1) {
      throw Error(ErrorKind::InvalidModel, "capsule attached to unknown link " + std::to_string(c.link));
    }
  }
  if (home_.size() == 0) {
    home_ = clamp_to_limits(JointVector::Zero(dof()));
  } else if (home_.size() != dof()) {
    throw Error(ErrorKind::DimensionMismatch, "home configuration length does not match dof");
  }
}

JointVector RobotModel::lower_limits() const {
  JointVector v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joint(i).q_min;
  return v;
}

JointVector RobotModel::upper_limits() const {
  JointVector v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joint(i).q_max;
  return v;
}

JointVector RobotModel::velocity_limits() const {
  JointVector v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joint(i).v_max;
  return v;
}

JointVector RobotModel::acceleration_limits() const {
  JointVector v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joint(i).a_max;
  return v;
}

JointVector RobotModel::jerk_limits() const {
  JointVector v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joint(i).j_max;
  return v;
}

bool RobotModel::within_limits(const JointVector& q, double tol) const {
  if (q.size() != dof()) return false;
  for (int i = 0; i < dof(); ++i) {
    if (!std::isfinite(q[i]) || q[i] < joint(i).q_min - tol || q[i] > joint(i).q_max + tol) return false;
  }
  return true;
}

JointVector RobotModel::clamp_to_limits(const JointVector& q) const {
  return q.cwiseMax(lower_limits()).cwiseMin(upper_limits());
}

RobotModel RobotModel::with_capsule(const LinkCapsule& capsule) const {
  auto caps = capsules_;
  caps.push_back(capsule);
  return RobotModel(name_, joints_, tool_, std::move(caps), home_);
}

RobotModel parse_robot_model(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("robot model: ") + e.what());
  }
  try {
    std::vector<JointSpec> joints;
    for (const auto& jj : doc.at("joints")) {
      JointSpec j;
      j.a = jj.value("a", 0.0);
      j.alpha = jj.value("alpha", 0.0);
      j.d = jj.value("d", 0.0);
      j.theta_offset = jj.value("theta_offset", 0.0);
      j.q_min = jj.at("q_min").get<double>();
      j.q_max = jj.at("q_max").get<double>();
      j.v_max = jj.at("v_max").get<double>();
      j.a_max = jj.at("a_max").get<double>();
      j.j_max = jj.at("j_max").get<double>();
      joints.push_back(j);
    }
    ToolSpec tool;
    if (doc.contains("tool")) {
      const auto& t = doc["tool"];
      tool.a = t.value("a", 0.0);
      tool.alpha = t.value("alpha", 0.0);
      tool.d = t.value("d", 0.0);
    }
    std::vector<LinkCapsule> capsules;
    for (const auto& cj : doc.value("capsules", nlohmann::json::array())) {
      LinkCapsule c;
      c.link = cj.at("link").get<int>();
      c.a = read_vec3(cj, "a");
      c.b = read_vec3(cj, "b");
      c.radius = cj.at("radius").get<double>();
      capsules.push_back(c);
    }
    JointVector home;
    if (doc.contains("home")) {
      const auto h = doc["home"].get<std::vector<double>>();
      home = Eigen::Map<const JointVector>(h.data(), static_cast<Eigen::Index>(h.size()));
    }
    return RobotModel(doc.at("name").get<std::string>(), std::move(joints), tool, std::move(capsules),
                      std::move(home));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidModel, std::string("robot model: ") + e.what());
  }
}

RobotModel load_robot_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::UnknownModel, "cannot open robot model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_robot_model(ss.str());
}

RobotModel bundled_model(std::string_view id) {
  if (id == kFanucId) return parse_robot_model(detail::kFanucModelJson);
  if (id == kKinovaId) return parse_robot_model(detail::kKinovaModelJson);
  throw Error(ErrorKind::UnknownModel, "unknown robot model '" + std::string(id) + "'");
}

std::vector<std::string> bundled_model_ids() { return {std::string(kFanucId), std::string(kKinovaId)}; }

}  // namespace handover
