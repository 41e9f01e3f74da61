#include "handover/geometry.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace handover {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

auto capsule_key(const Capsule& c) {
  return std::make_tuple(c.a.x(), c.a.y(), c.a.z(), c.b.x(), c.b.y(), c.b.z(), c.r);
}

Capsule place(const LinkCapsule& tmpl, const FkResult& fk) {
  const auto& F = fk.frames[static_cast<std::size_t>(tmpl.link)];
  return Capsule{F * tmpl.a, F * tmpl.b, tmpl.radius};
}

}  // namespace

SegmentDistance segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  // Closest points of two segments (Ericson, Real-Time Collision Detection 5.1.9).
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double kEps = 1e-24;

  double s = 0.0, t = 0.0;
  if (a <= kEps && e <= kEps) {
    s = t = 0.0;
  } else if (a <= kEps) {
    s = 0.0;
    t = clamp01(f / e);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      t = 0.0;
      s = clamp01(-c / a);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      // Parallel segments: any s works, start from the endpoint.
      s = denom > 1e-14 * a * e ? clamp01((b * f - c * e) / denom) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = clamp01(-c / a);
      } else if (t > 1.0) {
        t = 1.0;
        s = clamp01((b - c) / a);
      }
    }
  }
  SegmentDistance out;
  out.s = s;
  out.t = t;
  out.point1 = p1 + s * d1;
  out.point2 = p2 + t * d2;
  out.distance = (out.point1 - out.point2).norm();
  return out;
}

double capsule_distance(const Capsule& c1, const Capsule& c2) {
  // Evaluate in a canonical argument order so the result is bitwise symmetric.
  const bool swap = capsule_key(c2) < capsule_key(c1);
  const Capsule& x = swap ? c2 : c1;
  const Capsule& y = swap ? c1 : c2;
  return segment_distance(x.a, x.b, y.a, y.b).distance - x.r - y.r;
}

std::vector<Capsule> robot_capsules(const RobotModel& model, const FkResult& fk) {
  std::vector<Capsule> out;
  out.reserve(model.capsules().size());
  for (const auto& c : model.capsules()) out.push_back(place(c, fk));
  return out;
}

MinDistance min_distance(const RobotModel& model, const FkResult& fk, const CapsuleSet& env) {
  MinDistance best;
  best.d = std::numeric_limits<double>::infinity();
  const auto robot = robot_capsules(model, fk);
  for (std::size_t i = 0; i < robot.size(); ++i) {
    for (std::size_t k = 0; k < env.capsules.size(); ++k) {
      const double d = capsule_distance(robot[i], env.capsules[k]);
      if (d < best.d) {
        best.d = d;
        best.robot_capsule = static_cast<int>(i);
        best.env_capsule = static_cast<int>(k);
      }
    }
  }
  return best;
}

MinDistance min_distance(const RobotModel& model, const JointVector& q, const CapsuleSet& env) {
  return min_distance(model, forward_kinematics(model, q), env);
}

double pair_distance(const RobotModel& model, const JointVector& q, const CapsuleSet& env, int robot_capsule,
                     int env_capsule) {
  const auto fk = forward_kinematics(model, q);
  const auto& tmpl = model.capsules()[static_cast<std::size_t>(robot_capsule)];
  return capsule_distance(place(tmpl, fk), env.capsules[static_cast<std::size_t>(env_capsule)]);
}

JointVector distance_gradient(const RobotModel& model, const JointVector& q, const CapsuleSet& env) {
  const int n = model.dof();
  JointVector grad = JointVector::Zero(n);
  const auto active = min_distance(model, q, env);
  if (active.robot_capsule < 0) return grad;
  constexpr double h = 1e-6;
  JointVector qp = q, qm = q;
  for (int i = 0; i < n; ++i) {
    qp[i] = q[i] + h;
    qm[i] = q[i] - h;
    grad[i] = (pair_distance(model, qp, env, active.robot_capsule, active.env_capsule) -
               pair_distance(model, qm, env, active.robot_capsule, active.env_capsule)) /
              (2.0 * h);
    qp[i] = q[i];
    qm[i] = q[i];
  }
  return grad;
}

std::vector<PairClearance> pair_clearances(const RobotModel& model, const JointVector& q, const CapsuleSet& env) {
  const int n = model.dof();
  const std::size_t ne = env.capsules.size();
  const auto distances = [&](const JointVector& qq) {
    const auto robot = robot_capsules(model, forward_kinematics(model, qq));
    std::vector<double> out;
    out.reserve(robot.size() * ne);
    for (const auto& rc : robot) {
      for (const auto& ec : env.capsules) out.push_back(capsule_distance(rc, ec));
    }
    return out;
  };
  const auto here = distances(q);
  std::vector<PairClearance> out(here.size());
  for (std::size_t k = 0; k < here.size(); ++k) {
    out[k].robot_capsule = static_cast<int>(k / ne);
    out[k].env_capsule = static_cast<int>(k % ne);
    out[k].d = here[k];
    out[k].grad = JointVector::Zero(n);
  }
  constexpr double h = 1e-6;
  JointVector qp = q, qm = q;
  for (int i = 0; i < n; ++i) {
    qp[i] = q[i] + h;
    qm[i] = q[i] - h;
    const auto dp = distances(qp);
    const auto dm = distances(qm);
    for (std::size_t k = 0; k < here.size(); ++k) out[k].grad[i] = (dp[k] - dm[k]) / (2.0 * h);
    qp[i] = q[i];
    qm[i] = q[i];
  }
  return out;
}

}  // namespace handover
