#include "handover/control.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "handover/errors.hpp"

namespace handover {

namespace {

// Time step of the finite differences taken along the current motion.
constexpr double kMotionStep = 1e-3;

ControllerState propagate(const ControllerState& s, double tau, CommandKind kind) {
  ControllerState out = s;
  if (kind == CommandKind::Jerk) {
    out.q = s.q + tau * s.qd + 0.5 * tau * tau * s.qdd;
    out.qd = s.qd + tau * s.qdd;
  } else {
    out.q = s.q + tau * s.qd;
  }
  out.t = s.t + tau;
  return out;
}

/// phi_i of every pair, given the field evaluated at s and (jerk order)
/// at s propagated by +-kMotionStep.
std::vector<SafetyIndex> pair_indices(const DistanceField& field, const ControllerState& s, const SafetyParams& params,
                                      SafetyOrder order) {
  const auto here = field(s.q);
  std::vector<SafetyIndex> out(here.size());
  for (std::size_t k = 0; k < here.size(); ++k) {
    out[k].d = here[k].d;
    out[k].grad = here[k].grad;
    out[k].d_dot = here[k].grad.dot(s.qd);
    out[k].phi = params.d_min - out[k].d - params.k_v * out[k].d_dot;
    out[k].pair = static_cast<int>(k);
  }
  if (order == SafetyOrder::Jerk) {
    const auto fwd = propagate(s, kMotionStep, CommandKind::Jerk);
    const auto bwd = propagate(s, -kMotionStep, CommandKind::Jerk);
    const auto f = field(fwd.q);
    const auto b = field(bwd.q);
    if (f.size() != here.size() || b.size() != here.size()) {
      throw Error(ErrorKind::DimensionMismatch, "distance field changed its pair count with q");
    }
    for (std::size_t k = 0; k < here.size(); ++k) {
      out[k].d_ddot = (f[k].grad.dot(fwd.qd) - b[k].grad.dot(bwd.qd)) / (2.0 * kMotionStep);
      out[k].phi -= params.k_a * out[k].d_ddot;
    }
  }
  return out;
}

SafetyIndex critical(const std::vector<SafetyIndex>& all) {
  SafetyIndex best;
  best.phi = -std::numeric_limits<double>::infinity();
  best.d = std::numeric_limits<double>::infinity();
  for (const auto& s : all) {
    if (s.phi > best.phi) best = s;
  }
  return best;
}

JointVector clamp_abs(const JointVector& v, const JointVector& limit) { return v.cwiseMax(-limit).cwiseMin(limit); }

/// Minimum-norm point of {A u <= c, |u| <= limit} closest to `nominal`
/// (Hildreth's dual coordinate ascent; box rows included explicitly).
JointVector project_polytope(const JointVector& nominal, const std::vector<JointVector>& rows,
                             const std::vector<double>& bounds, const JointVector& limit) {
  const auto n = nominal.size();
  const std::size_t m = rows.size();
  std::vector<double> lambda(m, 0.0);
  JointVector box_lambda = JointVector::Zero(n);  // signed: + upper, - lower
  JointVector u = nominal;
  constexpr int kSweeps = 5000;
  constexpr double kTol = 1e-12;
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double viol = rows[i].dot(u) - bounds[i];
      const double next = std::max(0.0, lambda[i] + viol / rows[i].squaredNorm());
      u -= (next - lambda[i]) * rows[i];
      lambda[i] = next;
      worst = std::max(worst, viol);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      // Upper and lower bound rows share one signed multiplier.
      const double up = std::max(0.0, box_lambda[j]);
      const double lo = std::max(0.0, -box_lambda[j]);
      const double next_up = std::max(0.0, up + (u[j] - limit[j]));
      u[j] -= next_up - up;
      const double next_lo = std::max(0.0, lo + (-limit[j] - u[j]));
      u[j] += next_lo - lo;
      box_lambda[j] = next_up - next_lo;
      worst = std::max({worst, u[j] - limit[j], -limit[j] - u[j]});
    }
    if (worst <= kTol) break;
  }
  return clamp_abs(u, limit);
}

FilterResult filter(const JointVector& nominal, const ControllerState& state, const DistanceField& field,
                    const SafetyParams& params, SafetyOrder order, const JointVector& limit) {
  FilterResult out;
  const auto here = pair_indices(field, state, params, order);
  out.index = critical(here);
  out.command = nominal;
  if (out.index.pair < 0 || out.index.phi < 0.0) return out;

  // phi_i' = L_i + row_i . u for every pair with phi_i >= 0, with L_i the
  // drift of phi_i under a zero command.
  const CommandKind kind = order == SafetyOrder::Jerk ? CommandKind::Jerk : CommandKind::Acceleration;
  ControllerState fwd = propagate(state, kMotionStep, kind);
  ControllerState bwd = propagate(state, -kMotionStep, kind);
  if (kind == CommandKind::Acceleration) {
    fwd.qdd.setZero();
    bwd.qdd.setZero();
  }
  const auto ahead = pair_indices(field, fwd, params, order);
  const auto behind = pair_indices(field, bwd, params, order);
  const double gain = order == SafetyOrder::Jerk ? params.k_a : params.k_v;

  std::vector<JointVector> rows;
  std::vector<double> bounds;
  bool violated = false;
  for (std::size_t k = 0; k < here.size(); ++k) {
    if (here[k].phi < 0.0) continue;
    const JointVector row = -gain * here[k].grad;
    if (row.squaredNorm() < 1e-20) {
      if (static_cast<int>(k) != out.index.pair) continue;
      throw Error(ErrorKind::InfeasibleSafeControl,
                  "safety constraint degenerate (zero clearance gradient) at phi=" + std::to_string(here[k].phi));
    }
    const double drift = (ahead[k].phi - behind[k].phi) / (2.0 * kMotionStep);
    const double bound = -params.eta * here[k].phi - drift;
    violated = violated || row.dot(nominal) > bound;
    rows.push_back(row);
    bounds.push_back(bound);
  }
  out.active_pairs = static_cast<int>(rows.size());
  if (!violated) return out;
  out.command = rows.size() == 1 ? project_halfspace_box(nominal, rows[0], bounds[0], limit)
                                 : project_polytope(nominal, rows, bounds, limit);
  out.intervened = true;
  return out;
}

// ---------------------------------------------------------------------------
// Rest-to-rest profiles of a unit path parameter on a fixed sample grid.
//
// Jerk is constant over each sample, so the acceleration samples a_0..a_N
// define the whole profile: jerk_k = (a_{k+1} - a_k) / dt, and velocity and
// position follow by exact integration. Profiles are antisymmetric
// (a_{N-k} = -a_k), which makes the final velocity and acceleration exactly
// zero; the remaining freedom is chosen so the final position is exactly 1.

struct UnitLimits {
  double v, a, j;
};

struct GridProfile {
  std::vector<double> a;  // a_0 .. a_N, a_0 = a_N = 0
  int n_ramp = 0;         // full-jerk samples per acceleration ramp
  int n_hold = 0;         // samples held at peak acceleration
};

// Exact integration of the piecewise-linear acceleration from rest.
void integrate_unit(const std::vector<double>& a, double dt, std::vector<double>& v, double& q) {
  v.assign(a.size(), 0.0);
  q = 0.0;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    q += dt * v[k] + dt * dt * (a[k] / 3.0 + a[k + 1] / 6.0);
    v[k + 1] = v[k] + 0.5 * dt * (a[k] + a[k + 1]);
  }
}

// Acceleration samples of the family
//   0, s, 2s, .., n s, alpha (x hold+1), alpha - beta, alpha - beta - s, ..,
//   alpha - beta - down s = rho, then -rho, +rho, .. up to the midpoint,
// completed antisymmetrically. Ramps run at full slope s; alpha and beta
// absorb the fractional steps at the top of each ramp, and the alternating
// residual keeps the grid velocity constant while cruising. A nonzero
// `zero_gap` puts a zero that many samples after rho (right after it, or
// after the first -rho); the zero flips the alternation's phase at the
// midpoint and shifts the cruise velocity by half a residual step. Returns false if the first half does not fit in N samples.
bool family_samples(int N, int n, int hold, int down, int zero_gap, double s, double alpha, double beta,
                    std::vector<double>& a) {
  const int half = N / 2;
  if (n + hold + down + 2 + zero_gap > half) return false;
  a.assign(static_cast<std::size_t>(N) + 1, 0.0);
  int k = 0;
  for (int i = 1; i <= n; ++i) a[++k] = i * s;
  for (int i = 0; i <= hold; ++i) a[++k] = alpha;
  for (int i = 0; i <= down; ++i) a[++k] = alpha - beta - i * s;
  const double rho = a[k];
  const int zero_at = zero_gap > 0 ? k + zero_gap : -1;
  double sign = -1.0;
  while (k < half) {
    if (++k == zero_at) {
      a[k] = 0.0;
      continue;
    }
    a[k] = sign * rho;
    sign = -sign;
  }
  for (int i = 0; i <= half; ++i) a[N - i] = -a[i];
  if (N % 2 == 0) a[half] = 0.0;
  return true;
}

// Tries one (n, hold, down) structure for an N-sample move. The samples are
// affine in (alpha, beta); the position constraint q_N = 1 fixes alpha as a
// function of beta, and every sample bound becomes an interval on beta.
bool try_family(const UnitLimits& lim, double dt, int N, int n, int hold, int down, int zero_gap,
                std::vector<double>& out) {
  const double s = lim.j * dt;
  std::vector<double> base, with_alpha, with_beta;
  if (!family_samples(N, n, hold, down, zero_gap, s, 0.0, 0.0, base)) return false;
  family_samples(N, n, hold, down, zero_gap, s, 1.0, 0.0, with_alpha);
  family_samples(N, n, hold, down, zero_gap, s, 0.0, 1.0, with_beta);
  std::vector<double> ea(base.size()), eb(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    ea[k] = with_alpha[k] - base[k];
    eb[k] = with_beta[k] - base[k];
  }
  std::vector<double> v0, va, vb;
  double q0 = 0.0, qa = 0.0, qb = 0.0;
  integrate_unit(base, dt, v0, q0);
  integrate_unit(ea, dt, va, qa);
  integrate_unit(eb, dt, vb, qb);
  if (std::abs(qa) < 1e-300) return false;
  // alpha = c0 + c1 * beta
  const double c0 = (1.0 - q0) / qa, c1 = -qb / qa;

  double lo = 0.0, hi = s;  // beta is a partial step
  bool ok = true;
  // Constraint g0 + g1 * beta >= 0.
  const auto require = [&](double g0, double g1) {
    if (std::abs(g1) < 1e-300) {
      if (g0 < 0.0) ok = false;
    } else if (g1 > 0.0) {
      lo = std::max(lo, -g0 / g1);
    } else {
      hi = std::min(hi, -g0 / g1);
    }
  };
  // Sample value x = x0 + xa * alpha + xb * beta, bounded by |x| <= bound.
  // The 1e-12 slack absorbs rounding in the ramp samples; the caller's
  // limits already carry a larger margin.
  const auto bounded = [&](double x0, double xa, double xb, double limit) {
    const double bound = limit * (1.0 + 1e-12);
    const double g0 = x0 + xa * c0, g1 = xa * c1 + xb;
    require(bound - g0, -g1);
    require(bound + g0, g1);
  };
  for (std::size_t k = 0; k < base.size() && ok; ++k) {
    bounded(base[k], ea[k], eb[k], lim.a);
    bounded(v0[k], va[k], vb[k], lim.v);
    if (k + 1 < base.size()) {
      bounded(base[k + 1] - base[k], ea[k + 1] - ea[k], eb[k + 1] - eb[k], s);
    }
  }
  if (!ok || lo > hi) return false;
  const double beta = 0.5 * (lo + hi);
  family_samples(N, n, hold, down, zero_gap, s, c0 + c1 * beta, beta, out);
  return true;
}

// Continuous-time seven-segment solution for a unit move.
struct ContinuousScurve {
  double tj, ta, tv;
  double total() const { return 4.0 * tj + 2.0 * ta + tv; }
};

ContinuousScurve continuous_scurve(const UnitLimits& lim) {
  ContinuousScurve c{};
  if (lim.v * lim.j >= lim.a * lim.a) {
    c.tj = lim.a / lim.j;
    c.ta = lim.v / lim.a - c.tj;
  } else {
    c.tj = std::sqrt(lim.v / lim.j);
    c.ta = 0.0;
  }
  const double cruise_free = lim.v * (2.0 * c.tj + c.ta);
  if (cruise_free <= 1.0) {
    c.tv = (1.0 - cruise_free) / lim.v;
    return c;
  }
  c.tv = 0.0;
  c.tj = lim.a / lim.j;
  c.ta = 0.5 * (-3.0 * c.tj + std::sqrt(c.tj * c.tj + 4.0 / lim.a));
  if (c.ta < 0.0) {
    c.tj = std::cbrt(1.0 / (2.0 * lim.j));
    c.ta = 0.0;
  }
  return c;
}

// Whole-sample seven-segment profile: always feasible, used only when the
// fractional family finds nothing near the continuous solution.
GridProfile whole_sample_profile(const UnitLimits& lim, double dt) {
  const ContinuousScurve c = continuous_scurve(lim);
  const int nj_max = static_cast<int>(std::ceil(c.tj / dt)) + 3;
  const int na_max = static_cast<int>(std::ceil(std::max(c.ta, lim.v / lim.a) / dt)) + 3;
  long best = std::numeric_limits<long>::max();
  int bj = 1, ba = 0, bv = 0;
  for (int nj = 1; nj <= nj_max; ++nj) {
    const double tj = nj * dt;
    for (int na = 0; na <= na_max; ++na) {
      const double ta = na * dt;
      const double span =
          std::max({2.0 * tj + ta, 1.0 / (lim.j * tj * (tj + ta)), 1.0 / (lim.a * (tj + ta)), 1.0 / lim.v});
      const int nv = std::max(0, static_cast<int>(std::ceil((span - 2.0 * tj - ta) / dt - 1e-9)));
      const long total = 4L * nj + 2L * na + nv;
      if (total < best) {
        best = total;
        bj = nj;
        ba = na;
        bv = nv;
      }
    }
  }
  const double tj = bj * dt, ta = ba * dt, tv = bv * dt;
  const double peak = 1.0 / (tj * (tj + ta) * (2.0 * tj + ta + tv));
  GridProfile p;
  p.n_ramp = bj;
  p.n_hold = ba;
  p.a.push_back(0.0);
  const std::array<std::pair<int, double>, 7> segments{
      {{bj, 1.0}, {ba, 0.0}, {bj, -1.0}, {bv, 0.0}, {bj, -1.0}, {ba, 0.0}, {bj, 1.0}}};
  for (const auto& [count, sign] : segments) {
    for (int k = 0; k < count; ++k) p.a.push_back(p.a.back() + sign * peak * dt);
  }
  p.a.back() = 0.0;
  return p;
}

GridProfile unit_grid_profile(const UnitLimits& lim, double dt) {
  const ContinuousScurve c = continuous_scurve(lim);
  const int N0 = std::max(2, static_cast<int>(std::ceil(c.total() / dt - 1e-9)));
  // The discrete optimum sits next to the continuous segment lengths; a
  // small window around them is searched, shortest N first.
  const int nj = static_cast<int>(std::floor(c.tj / dt));
  const int na = static_cast<int>(std::floor(c.ta / dt));
  GridProfile p;
  for (int N = N0; N <= N0 + 2; ++N) {
    for (int n = std::max(0, nj - 2); n <= nj + 2; ++n) {
      for (int hold = std::max(0, na - 3); hold <= na + 3; ++hold) {
        for (int down = std::max(0, n - 1); down <= n + 1; ++down) {
          for (const int zero_gap : {0, 1, 2}) {
            if (try_family(lim, dt, N, n, hold, down, zero_gap, p.a)) {
              p.n_ramp = n;
              p.n_hold = hold + 1;
              return p;
            }
          }
        }
      }
    }
  }
  return whole_sample_profile(lim, dt);
}

}  // namespace

MotionLimits MotionLimits::from_model(const RobotModel& model) {
  return MotionLimits{model.velocity_limits(), model.acceleration_limits(), model.jerk_limits()};
}

void MotionLimits::validate() const {
  if (a_max.size() != v_max.size() || j_max.size() != v_max.size() || v_max.size() == 0) {
    throw Error(ErrorKind::InvalidLimits, "motion limit vectors must be non-empty and of equal length");
  }
  const auto positive = [](const JointVector& v) { return v.allFinite() && (v.array() > 0.0).all(); };
  if (!positive(v_max) || !positive(a_max) || !positive(j_max)) {
    throw Error(ErrorKind::InvalidLimits, "motion limits must be strictly positive");
  }
}

ControllerState ControllerState::at_rest(const JointVector& q, double t) {
  return ControllerState{q, JointVector::Zero(q.size()), JointVector::Zero(q.size()), t};
}

JpcPlan jpc_plan(const ControllerState& start, const JointVector& q_goal, const MotionLimits& limits,
                 double rate_hz) {
  limits.validate();
  if (!(rate_hz > 0.0)) throw Error(ErrorKind::InvalidLimits, "plan rate must be positive");
  if (start.q.size() != limits.dof() || q_goal.size() != limits.dof()) {
    throw Error(ErrorKind::DimensionMismatch, "plan endpoints do not match the limit dimension");
  }
  const int n = limits.dof();
  JpcPlan plan;
  plan.dt = 1.0 / rate_hz;
  const double dt = plan.dt;
  plan.samples.push_back(ControllerState::at_rest(start.q, start.t));

  const JointVector disp = q_goal - start.q;
  if (disp.cwiseAbs().maxCoeff() <= 1e-12) return plan;

  // Straight line in joint space: every joint follows disp_i * s(t) with a
  // unit path parameter s, whose limits are the tightest joint's, shrunk by
  // a relative 1e-9 so rounding in the per-joint scaling stays inside.
  UnitLimits unit{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(disp[i]);
    if (d == 0.0) continue;
    unit.v = std::min(unit.v, limits.v_max[i] / d);
    unit.a = std::min(unit.a, limits.a_max[i] / d);
    unit.j = std::min(unit.j, limits.j_max[i] / d);
  }
  const double shrink = 1.0 - 1e-9;
  unit = UnitLimits{unit.v * shrink, unit.a * shrink, unit.j * shrink};

  const GridProfile profile = unit_grid_profile(unit, dt);
  plan.n_jerk = profile.n_ramp;
  plan.n_accel = profile.n_hold;

  const std::size_t steps = profile.a.size() - 1;
  plan.jerk.reserve(steps);
  plan.samples.reserve(steps + 1);
  for (std::size_t k = 0; k < steps; ++k) {
    const JointVector j = disp * ((profile.a[k + 1] - profile.a[k]) / dt);
    const auto& s = plan.samples.back();
    ControllerState next;
    next.q = s.q + dt * s.qd + 0.5 * dt * dt * s.qdd + dt * dt * dt / 6.0 * j;
    next.qd = s.qd + dt * s.qdd + 0.5 * dt * dt * j;
    next.qdd = s.qdd + dt * j;
    next.t = start.t + static_cast<double>(k + 1) * dt;
    plan.jerk.push_back(j);
    plan.samples.push_back(std::move(next));
  }
  return plan;
}

JerkTracker::JerkTracker(JpcPlan plan, double feedback_pole) : plan_(std::move(plan)), pole_(feedback_pole) {}

const ControllerState& JerkTracker::reference() const {
  return plan_.samples[std::min(index_, plan_.samples.size() - 1)];
}

JointVector JerkTracker::command(const ControllerState& state, const MotionLimits& limits) {
  const ControllerState& ref = reference();
  JointVector j = index_ < plan_.jerk.size() ? plan_.jerk[index_] : JointVector::Zero(state.dof());
  const double p = pole_;
  j += p * p * p * (ref.q - state.q) + 3.0 * p * p * (ref.qd - state.qd) + 3.0 * p * (ref.qdd - state.qdd);
  if (index_ < plan_.jerk.size()) ++index_;
  return clamp_abs(j, limits.j_max);
}

JointVector pd_acceleration(const ControllerState& state, const JointVector& q_ref, const PdGains& gains,
                            const JointVector& a_max) {
  const JointVector u = gains.kp * (q_ref - state.q) - gains.kd * state.qd;
  return clamp_abs(u, a_max);
}

void SafetyParams::validate() const {
  if (!(d_min > 0.0)) throw Error(ErrorKind::ConfigError, "safety margin d_min must be positive");
  if (!(k_v >= 0.0) || !(k_a >= 0.0)) throw Error(ErrorKind::ConfigError, "safety gains must be non-negative");
  if (!(eta > 0.0)) throw Error(ErrorKind::ConfigError, "safety decay rate eta must be positive");
}

DistanceField robot_distance_field(const RobotModel& model, const CapsuleSet& env) {
  return [model, env](const JointVector& q) {
    const auto pairs = pair_clearances(model, q, env);
    std::vector<DistanceSample> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(DistanceSample{p.d, p.grad});
    return out;
  };
}

SafetyIndex safety_index(const DistanceField& field, const ControllerState& state, const SafetyParams& params,
                         SafetyOrder order) {
  return critical(pair_indices(field, state, params, order));
}

SafetyIndex safety_index(const RobotModel& model, const ControllerState& state, const CapsuleSet& env,
                         const SafetyParams& params, SafetyOrder order) {
  return safety_index(robot_distance_field(model, env), state, params, order);
}

JointVector project_halfspace(const JointVector& nominal, const JointVector& row, double bound) {
  const double excess = row.dot(nominal) - bound;
  if (excess <= 0.0) return nominal;
  return nominal - (excess / row.squaredNorm()) * row;
}

JointVector project_halfspace_box(const JointVector& nominal, const JointVector& row, double bound,
                                  const JointVector& limit) {
  // KKT: u(mu) = clamp(nominal - mu row); row . u(mu) is non-increasing and
  // piecewise linear in mu, so walk its breakpoints to the smallest feasible mu.
  const auto at = [&](double mu) { return clamp_abs(nominal - mu * row, limit); };
  if (row.dot(at(0.0)) <= bound) return at(0.0);
  std::vector<double> breaks;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (row[i] == 0.0) continue;
    for (const double edge : {limit[i], -limit[i]}) {
      const double mu = (nominal[i] - edge) / row[i];
      if (mu > 0.0) breaks.push_back(mu);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  double lo = 0.0;
  double h_lo = row.dot(at(lo));
  for (const double hi : breaks) {
    const double h_hi = row.dot(at(hi));
    if (h_hi <= bound) {
      // Linear on [lo, hi]; interpolate, then guard against round-off.
      const double mu = h_lo == h_hi ? hi : lo + (h_lo - bound) / (h_lo - h_hi) * (hi - lo);
      return at(std::min(hi, std::max(lo, mu)));
    }
    lo = hi;
    h_lo = h_hi;
  }
  // Past the last breakpoint every joint that can help is saturated.
  return at(breaks.empty() ? 0.0 : breaks.back());
}

FilterResult ssa_filter(const JointVector& u_nom, const ControllerState& state, const DistanceField& field,
                        const SafetyParams& params, const JointVector& a_max) {
  return filter(u_nom, state, field, params, SafetyOrder::Acceleration, a_max);
}

FilterResult ssa_filter(const JointVector& u_nom, const ControllerState& state, const RobotModel& model,
                        const CapsuleSet& env, const SafetyParams& params) {
  return ssa_filter(u_nom, state, robot_distance_field(model, env), params, model.acceleration_limits());
}

FilterResult jssa_filter(const JointVector& j_nom, const ControllerState& state, const DistanceField& field,
                         const SafetyParams& params, const JointVector& j_max) {
  return filter(j_nom, state, field, params, SafetyOrder::Jerk, j_max);
}

FilterResult jssa_filter(const JointVector& j_nom, const ControllerState& state, const RobotModel& model,
                         const CapsuleSet& env, const SafetyParams& params) {
  return jssa_filter(j_nom, state, robot_distance_field(model, env), params, model.jerk_limits());
}

JointVector brake_acceleration(const ControllerState& state, const MotionLimits& limits, double dt) {
  return clamp_abs(-state.qd / dt, limits.a_max);
}

JointVector brake_jerk(const ControllerState& state, const MotionLimits& limits, double dt) {
  const JointVector tau = (limits.a_max.array() / limits.j_max.array()).max(dt);
  const JointVector target = clamp_abs(-state.qd.cwiseQuotient(tau), limits.a_max);
  return clamp_abs((target - state.qdd) / dt, limits.j_max);
}

StepResult integrate_step(const ControllerState& state, const JointVector& command, CommandKind kind, double dt,
                          const MotionLimits& limits) {
  StepResult out;
  ControllerState& s = out.state;
  if (kind == CommandKind::Jerk) {
    s.q = state.q + dt * state.qd + 0.5 * dt * dt * state.qdd + dt * dt * dt / 6.0 * command;
    s.qd = state.qd + dt * state.qdd + 0.5 * dt * dt * command;
    s.qdd = state.qdd + dt * command;
  } else {
    s.q = state.q + dt * state.qd + 0.5 * dt * dt * command;
    s.qd = state.qd + dt * command;
    s.qdd = command;
  }
  s.t = state.t + dt;
  for (int i = 0; i < s.dof(); ++i) {
    if (std::abs(s.qdd[i]) > limits.a_max[i]) {
      s.qdd[i] = std::copysign(limits.a_max[i], s.qdd[i]);
      ++out.acceleration_clamps;
    }
    if (std::abs(s.qd[i]) > limits.v_max[i]) {
      s.qd[i] = std::copysign(limits.v_max[i], s.qd[i]);
      ++out.velocity_clamps;
    }
  }
  return out;
}

}  // namespace handover
