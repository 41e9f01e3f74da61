#include "handover/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/SVD>

#include "handover/errors.hpp"

namespace handover {

namespace {

Eigen::Isometry3d dh_transform(double a, double alpha, double theta, double d) {
  // RotX(alpha) * TransX(a) * RotZ(theta) * TransZ(d), written out.
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double ct = std::cos(theta), st = std::sin(theta);
  Eigen::Isometry3d T;
  T.matrix() << ct, -st, 0.0, a,
                st * ca, ct * ca, -sa, -sa * d,
                st * sa, ct * sa, ca, ca * d,
                0.0, 0.0, 0.0, 1.0;
  return T;
}

void require_dof(const RobotModel& model, const JointVector& q) {
  if (q.size() != model.dof()) {
    throw Error(ErrorKind::DimensionMismatch, "joint vector has " + std::to_string(q.size()) +
                                                  " entries, model '" + model.name() + "' has " +
                                                  std::to_string(model.dof()) + " joints");
  }
}

/// Rotation vector taking `current` to `target`, expressed in the base frame.
Vec3 orientation_error(const Eigen::Quaterniond& target, const Eigen::Quaterniond& current) {
  Eigen::Quaterniond rel = target * current.conjugate();
  if (rel.w() < 0.0) rel.coeffs() = -rel.coeffs();
  const Eigen::AngleAxisd aa(rel.normalized());
  return aa.angle() * aa.axis();
}

Eigen::VectorXd damped_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& err, double damping,
                            double clamp) {
  Eigen::MatrixXd JJt = J * J.transpose();
  JJt.diagonal().array() += damping * damping;
  Eigen::VectorXd dq = J.transpose() * JJt.ldlt().solve(err);
  const double peak = dq.cwiseAbs().maxCoeff();
  if (peak > clamp) dq *= clamp / peak;
  return dq;
}

}  // namespace

Pose Pose::from_transform(const Eigen::Isometry3d& T) {
  Pose pose;
  pose.p = T.translation();
  pose.orientation = Eigen::Quaterniond(T.rotation()).normalized();
  return pose;
}

FkResult forward_kinematics(const RobotModel& model, const JointVector& q) {
  require_dof(model, q);
  FkResult out;
  out.frames.reserve(static_cast<std::size_t>(model.dof()) + 2);
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  out.frames.push_back(T);
  for (int i = 0; i < model.dof(); ++i) {
    const auto& j = model.joint(i);
    T = T * dh_transform(j.a, j.alpha, q[i] + j.theta_offset, j.d);
    out.frames.push_back(T);
  }
  const auto& tool = model.tool();
  T = T * dh_transform(tool.a, tool.alpha, 0.0, tool.d);
  out.frames.push_back(T);
  out.pose = Pose::from_transform(T);
  return out;
}

Vec3 fk_position(const RobotModel& model, const JointVector& q) {
  return forward_kinematics(model, q).frames.back().translation();
}

Matrix3X point_jacobian(const RobotModel& model, const FkResult& fk, int link, const Vec3& local_point) {
  const int n = model.dof();
  Matrix3X J = Matrix3X::Zero(3, n);
  const Vec3 p = fk.frames[static_cast<std::size_t>(link)] * local_point;
  const int driven = std::min(link, n);
  for (int i = 0; i < driven; ++i) {
    const auto& F = fk.frames[static_cast<std::size_t>(i) + 1];
    const Vec3 z = F.linear().col(2);
    J.col(i) = z.cross(p - F.translation());
  }
  return J;
}

Matrix6X jacobian(const RobotModel& model, const JointVector& q) {
  const auto fk = forward_kinematics(model, q);
  const int n = model.dof();
  Matrix6X J(6, n);
  const Vec3 p = fk.frames.back().translation();
  for (int i = 0; i < n; ++i) {
    const auto& F = fk.frames[static_cast<std::size_t>(i) + 1];
    const Vec3 z = F.linear().col(2);
    J.block<3, 1>(0, i) = z.cross(p - F.translation());
    J.block<3, 1>(3, i) = z;
  }
  return J;
}

Eigen::MatrixXd position_null_space(const RobotModel& model, const JointVector& q) {
  const Eigen::MatrixXd Jp = jacobian(model, q).topRows<3>();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jp, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (smax > 0.0 && s[i] > 1e-8 * smax) ++rank;
  }
  const int n = model.dof();
  return svd.matrixV().rightCols(n - rank);
}

double rotation_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  // atan2 form stays accurate near zero, where acos loses half the digits.
  const Eigen::Quaterniond rel = a.normalized().conjugate() * b.normalized();
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

// One damped least-squares descent from q_seed. Returns true when the
// tolerances are met; q, pos_err and rot_err hold the final iterate.
static bool dls_descent(const RobotModel& model, const Pose& target, const JointVector& q_seed, const IkOptions& options,
                 JointVector& q_out, double& pos_err, double& rot_err) {
  JointVector q = model.clamp_to_limits(q_seed);
  const auto pose_error = [&](const JointVector& at) {
    const Pose pose = forward_kinematics(model, at).pose;
    Eigen::Matrix<double, 6, 1> e;
    e.head<3>() = target.p - pose.p;
    e.tail<3>() = orientation_error(target.orientation, pose.orientation);
    return e;
  };
  Eigen::Matrix<double, 6, 1> err = pose_error(q);
  double damping = options.damping;
  pos_err = rot_err = 0.0;
  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    pos_err = err.head<3>().norm();
    rot_err = err.tail<3>().norm();
    if (pos_err <= 1e-3 * options.position_tolerance && rot_err <= 1e-3 * options.orientation_tolerance) {
      q_out = q;
      return true;
    }
    if (iter == options.max_iterations) break;
    const Eigen::MatrixXd J = jacobian(model, q);
    // Levenberg-Marquardt schedule around the nominal damping: near a
    // singularity a lightly damped step overshoots, so the damping grows
    // until the pose error shrinks and relaxes again after each success.
    JointVector next = q;
    Eigen::Matrix<double, 6, 1> next_err = err;
    for (int attempt = 0; attempt < 12; ++attempt, damping *= 10.0) {
      next = model.clamp_to_limits(q + damped_step(J, err, damping, options.step_clamp));
      next_err = pose_error(next);
      if (next_err.norm() < err.norm()) break;
    }
    damping = std::max(options.damping, damping / 100.0);
    if (next_err.norm() >= err.norm() || (next - q).norm() < 1e-15) break;
    q = next;
    err = next_err;
  }
  q_out = q;
  return pos_err <= options.position_tolerance && rot_err <= options.orientation_tolerance;
}

JointVector inverse_kinematics(const RobotModel& model, const Pose& target, const JointVector& q_seed,
                               const IkOptions& options) {
  require_dof(model, q_seed);
  JointVector q;
  double pos_err = 0.0, rot_err = 0.0;
  if (dls_descent(model, target, q_seed, options, q, pos_err, rot_err)) return q;
  // A descent can stall in a local minimum of the pose error or crawl near
  // a singularity. Restart from seeds scattered around the caller's seed;
  // the generator is fixed so results stay reproducible.
  std::mt19937_64 rng(0x1c0ffee);
  std::normal_distribution<double> scatter(0.0, 1.0);
  double best = pos_err + rot_err;
  for (int restart = 1; restart <= options.restarts; ++restart) {
    JointVector seed = q_seed;
    for (Eigen::Index i = 0; i < seed.size(); ++i) seed[i] += options.restart_spread * scatter(rng);
    JointVector candidate;
    double p = 0.0, r = 0.0;
    if (dls_descent(model, target, seed, options, candidate, p, r)) return candidate;
    if (p + r < best) {
      best = p + r;
      pos_err = p;
      rot_err = r;
    }
  }
  throw ConvergenceError(ErrorKind::NoConvergence,
                         "inverse kinematics did not converge (position residual " + std::to_string(pos_err) +
                             " m, orientation residual " + std::to_string(rot_err) + " rad)",
                         pos_err + rot_err);
}

JointVector icop_correct(const RobotModel& model, const JointVector& q_start, const Vec3& p_goal,
                         const IcopOptions& options) {
  require_dof(model, q_start);
  JointVector q = q_start;
  double err_norm = 0.0;
  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const Eigen::Vector3d err = p_goal - fk_position(model, q);
    err_norm = err.norm();
    if (err_norm <= 1e-3 * options.tolerance) return q;
    if (iter == options.max_iterations) break;
    const Eigen::MatrixXd Jp = jacobian(model, q).topRows<3>();
    const JointVector dq = damped_step(Jp, err, options.damping, options.step_clamp);
    const JointVector next = model.clamp_to_limits(q + dq);
    if ((next - q).norm() < 1e-15) break;
    q = next;
  }
  if (err_norm <= options.tolerance) return q;
  throw ConvergenceError(ErrorKind::NoConvergence,
                         "position correction did not converge (residual " + std::to_string(err_norm) + " m)",
                         err_norm);
}

}  // namespace handover
