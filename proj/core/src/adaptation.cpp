#include "handover/adaptation.hpp"

#include <random>

#include "handover/errors.hpp"

namespace handover {

void AdaptParams::validate() const {
  if (!(alpha > 0.0)) throw Error(ErrorKind::ConfigError, "adaptation step alpha must be positive");
  if (!(lambda_omega >= 0.0)) throw Error(ErrorKind::ConfigError, "orientation weight must be non-negative");
  if (max_iters < 1) throw Error(ErrorKind::ConfigError, "adaptation needs at least one iteration");
}

Objective objective(const RobotModel& model, const JointVector& q, const CapsuleSet& env, const JointVector& q_ref,
                    double lambda_omega) {
  const auto fk = forward_kinematics(model, q);
  const auto fk_ref = forward_kinematics(model, q_ref);
  Objective out;
  out.d = min_distance(model, fk, env).d;
  out.e_omega = rotation_angle(fk.pose.orientation, fk_ref.pose.orientation);
  out.V = -out.d + lambda_omega * out.e_omega;
  return out;
}

AdaptResult user_adapt(const RobotModel& model, const Pose& goal, const CapsuleSet& env, const AdaptParams& params,
                       const JointVector& ik_seed) {
  params.validate();
  JointVector q_G;
  try {
    q_G = inverse_kinematics(model, goal, ik_seed);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(ErrorKind::IKFailed, std::string("delivery goal: ") + e.what(), e.residual());
  }

  AdaptResult result;
  result.q_seed = q_G;
  result.q_g = q_G;
  if (env.empty()) {
    result.status = AdaptStatus::NoObstacles;
    return result;
  }
  const Objective seed = objective(model, q_G, env, q_G, params.lambda_omega);
  result.V = result.V_seed = seed.V;
  result.d = result.d_seed = seed.d;
  result.e_omega = seed.e_omega;
  if (position_null_space(model, q_G).cols() == 0) {
    result.status = AdaptStatus::NoNullSpace;
    return result;
  }

  // Best value starts at the seed's objective rather than +inf so the
  // returned configuration is never worse than the IK solution. Every
  // perturbation starts from the incumbent joint goal q_g.
  std::mt19937_64 rng(params.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  result.best_trace.reserve(static_cast<std::size_t>(params.max_iters));
  Eigen::MatrixXd basis = position_null_space(model, result.q_g);
  for (int it = 0; it < params.max_iters; ++it) {
    ++result.iters_used;
    if (basis.cols() > 0) {
      Eigen::VectorXd coeff(basis.cols());
      for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff[k] = normal(rng);
      const JointVector dq = basis * coeff.normalized();
      try {
        const JointVector candidate = icop_correct(model, result.q_g + params.alpha * dq, goal.p);
        if (model.within_limits(candidate)) {
          const Objective obj = objective(model, candidate, env, q_G, params.lambda_omega);
          if (obj.V < result.V) {
            result.V = obj.V;
            result.d = obj.d;
            result.e_omega = obj.e_omega;
            result.q_g = candidate;
            basis = position_null_space(model, result.q_g);
          }
        }
      } catch (const ConvergenceError&) {
        // Discarded candidate; the iteration still counts.
      }
    }
    result.best_trace.push_back(result.V);
  }
  return result;
}

}  // namespace handover
