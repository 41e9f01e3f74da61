#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "handover/geometry.hpp"
#include "support/oracles.hpp"

namespace handover {
namespace {

// ---------------------------- segment distance --------------------------------

TEST(SegmentDistance, ParallelOffset) {
  const auto r = segment_distance(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0));
  EXPECT_NEAR(r.distance, 1.0, 1e-15);
}

TEST(SegmentDistance, CrossingSkewSegments) {
  const Vec3 p1(0, 0, 0), q1(1, 0, 0), p2(0.5, -0.5, 0.3), q2(0.5, 0.5, 0.3);
  const auto r = segment_distance(p1, q1, p2, q2);
  EXPECT_NEAR(r.distance, 0.3, 1e-15);
  EXPECT_NEAR(oracle::sampled_segment_distance(p1, q1, p2, q2), 0.3, 1e-9);
  EXPECT_LE((r.point1 - Vec3(0.5, 0, 0)).norm(), 1e-15);
  EXPECT_LE((r.point2 - Vec3(0.5, 0, 0.3)).norm(), 1e-15);
}

TEST(SegmentDistance, IdenticalSegments) {
  const auto r = segment_distance(Vec3(0, 0, 0), Vec3(1, 2, 3), Vec3(0, 0, 0), Vec3(1, 2, 3));
  EXPECT_EQ(r.distance, 0.0);
}

TEST(SegmentDistance, DegenerateSegmentsArePoints) {
  const auto r = segment_distance(Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(3, 4, 0), Vec3(3, 4, 0));
  EXPECT_NEAR(r.distance, 5.0, 1e-15);
}

TEST(SegmentDistance, WitnessPointsRealizeDistance) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const Capsule c1 = oracle::random_capsule(rng), c2 = oracle::random_capsule(rng);
    const auto r = segment_distance(c1.a, c1.b, c2.a, c2.b);
    EXPECT_NEAR((r.point1 - r.point2).norm(), r.distance, 1e-12);
    EXPECT_LE((c1.a + r.s * (c1.b - c1.a) - r.point1).norm(), 1e-12);
    EXPECT_LE((c2.a + r.t * (c2.b - c2.a) - r.point2).norm(), 1e-12);
    EXPECT_GE(r.s, 0.0);
    EXPECT_LE(r.s, 1.0);
    EXPECT_GE(r.t, 0.0);
    EXPECT_LE(r.t, 1.0);
  }
}

// ---------------------------- capsule distance --------------------------------

TEST(CapsuleDistance, TwoSpheres) {
  const Capsule a{Vec3(0, 0, 0), Vec3(0, 0, 0), 0.2};
  const Capsule b{Vec3(1, 0, 0), Vec3(1, 0, 0), 0.3};
  EXPECT_NEAR(capsule_distance(a, b), 0.5, 1e-15);
}

TEST(CapsuleDistance, OverlapIsNegativePenetration) {
  const Capsule a{Vec3(0, 0, 0), Vec3(1, 0, 0), 0.1};
  const Capsule b{Vec3(0, 0.15, 0), Vec3(1, 0.15, 0), 0.1};
  EXPECT_NEAR(capsule_distance(a, b), -0.05, 1e-15);
}

TEST(CapsuleDistance, FullParameterGridOracle) {
  std::mt19937_64 rng(22);
  const Capsule c1 = oracle::random_capsule(rng), c2 = oracle::random_capsule(rng);
  const double grid = oracle::grid_segment_distance(c1.a, c1.b, c2.a, c2.b, 10000) - c1.r - c2.r;
  EXPECT_NEAR(capsule_distance(c1, c2), grid, 1e-4);
}

TEST(CapsuleDistance, MatchesSamplingOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const Capsule c1 = oracle::random_capsule(rng), c2 = oracle::random_capsule(rng);
    const double expected = oracle::sampled_segment_distance(c1.a, c1.b, c2.a, c2.b) - c1.r - c2.r;
    EXPECT_NEAR(capsule_distance(c1, c2), expected, 1e-4) << "pair " << trial;
  }
}

TEST(CapsuleDistance, SymmetryAndTranslationInvariance) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Capsule c1 = oracle::random_capsule(rng), c2 = oracle::random_capsule(rng);
    const double d = capsule_distance(c1, c2);
    EXPECT_EQ(d, capsule_distance(c2, c1));
    const Vec3 t(shift(rng), shift(rng), shift(rng));
    const Capsule m1{c1.a + t, c1.b + t, c1.r}, m2{c2.a + t, c2.b + t, c2.r};
    EXPECT_NEAR(capsule_distance(m1, m2), d, 1e-12);
  }
}

// ------------------------------ min distance ----------------------------------

TEST(MinDistance, FarSphereMatchesCenterCalculation) {
  const RobotModel arm = oracle::planar_arm(2);
  CapsuleSet env;
  env.add(Capsule{Vec3(100, 0, 0), Vec3(100, 0, 0), 0.3}, "sphere");
  const JointVector q = Eigen::Vector2d::Zero();
  // The second link capsule ends at the tool point (2, 0, 0).
  const double expected = (Vec3(100, 0, 0) - oracle::naive_position(arm, q)).norm() - 0.3 - 0.05;
  const auto md = min_distance(arm, q, env);
  EXPECT_NEAR(md.d, expected, 1e-6);
  EXPECT_EQ(md.robot_capsule, 1);
  EXPECT_EQ(md.env_capsule, 0);
}

TEST(MinDistance, CoincidentCapsuleIsPenetrating) {
  const RobotModel kinova = bundled_model("kinova-gen3-like");
  const JointVector q = kinova.home();
  const auto placed = robot_capsules(kinova, forward_kinematics(kinova, q));
  CapsuleSet env;
  env.add(placed[2], "copy");
  EXPECT_LT(min_distance(kinova, q, env).d, 0.0);
}

TEST(MinDistance, BoundedByEveryPairAndOrderInvariant) {
  const RobotModel fanuc = bundled_model("fanuc-lrmate-200id7l-like");
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    CapsuleSet env;
    for (int k = 0; k < 6; ++k) {
      Capsule c = oracle::random_capsule(rng);
      c.a += Vec3(0.6, 0, 0.4);
      c.b += Vec3(0.6, 0, 0.4);
      env.add(c, "c" + std::to_string(k));
    }
    const JointVector q = oracle::random_configuration(fanuc, rng);
    const auto fk = forward_kinematics(fanuc, q);
    const auto md = min_distance(fanuc, fk, env);
    const auto robot = robot_capsules(fanuc, fk);
    double scan = std::numeric_limits<double>::infinity();
    for (const auto& r : robot) {
      for (const auto& e : env.capsules) {
        EXPECT_LE(md.d, capsule_distance(r, e));
        scan = std::min(scan, capsule_distance(r, e));
      }
    }
    EXPECT_EQ(md.d, scan);

    std::vector<std::size_t> order(env.size());
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);
    CapsuleSet shuffled;
    for (auto i : order) shuffled.add(env.capsules[i], env.labels[i]);
    EXPECT_EQ(min_distance(fanuc, fk, shuffled).d, md.d);
  }
}

TEST(MinDistance, TieBreaksToLowestIndices) {
  const RobotModel arm = oracle::planar_arm(2);
  CapsuleSet env;
  // Equidistant from both link capsules' shared joint point (1, 0, 0).
  env.add(Capsule{Vec3(1, 0, 1), Vec3(1, 0, 1), 0.1}, "a");
  env.add(Capsule{Vec3(1, 0, 1), Vec3(1, 0, 1), 0.1}, "b");
  const auto md = min_distance(arm, Eigen::Vector2d::Zero(), env);
  EXPECT_EQ(md.robot_capsule, 0);
  EXPECT_EQ(md.env_capsule, 0);
}

// --------------------------- distance gradient --------------------------------

TEST(DistanceGradient, PointSphereAnalyticCase) {
  // One-link arm of length 1 along x; a sphere straight ahead of the tip at
  // angle 0.3 rad. Turning joint 1 toward the sphere reduces clearance.
  const RobotModel arm = oracle::planar_arm(1);
  CapsuleSet env;
  const double angle = 0.3;
  const Vec3 center(2.0 * std::cos(angle), 2.0 * std::sin(angle), 0.0);
  env.add(Capsule{center, center, 0.1}, "sphere");
  const JointVector q = JointVector::Zero(1);
  const JointVector g = distance_gradient(arm, q, env);
  // d(q) = |c - (cos q, sin q, 0)| - r_sphere - r_link; analytic derivative:
  const Vec3 tip(1.0, 0.0, 0.0);
  const Vec3 dtip(0.0, 1.0, 0.0);
  const double expected = -(center - tip).normalized().dot(dtip);
  EXPECT_LT(g[0], 0.0);
  EXPECT_NEAR(g[0], expected, 1e-6);
}

TEST(DistanceGradient, TangentialMotionHasZeroComponent) {
  // Sphere on the joint axis above the base: rotating joint 1 is tangential.
  const RobotModel arm = oracle::planar_arm(2);
  CapsuleSet env;
  env.add(Capsule{Vec3(0, 0, 1), Vec3(0, 0, 1), 0.1}, "above");
  const JointVector g = distance_gradient(arm, Eigen::Vector2d(0.4, 0.8), env);
  EXPECT_NEAR(g[0], 0.0, 1e-4);
}

TEST(DistanceGradient, AscentDirectionIncreasesClearance) {
  const RobotModel kinova = bundled_model("kinova-gen3-like");
  std::mt19937_64 rng(26);
  CapsuleSet env;
  env.add(Capsule{Vec3(0.5, 0.3, 0.3), Vec3(0.5, 0.3, 0.8), 0.1}, "human");
  for (int trial = 0; trial < 50; ++trial) {
    const JointVector q = oracle::random_configuration(kinova, rng, 0.1);
    const JointVector g = distance_gradient(kinova, q, env);
    if (g.norm() < 1e-6) continue;
    const double d0 = min_distance(kinova, q, env).d;
    EXPECT_GT(min_distance(kinova, q + 1e-4 * g.normalized(), env).d, d0);
  }
}

TEST(PairClearances, OrderingIsRobotMajorAndComplete) {
  const RobotModel fanuc = bundled_model("fanuc-lrmate-200id7l-like");
  CapsuleSet env;
  env.add(Capsule{Vec3(0.6, 0.2, 0.3), Vec3(0.6, 0.2, 0.9), 0.15}, "torso");
  env.add(Capsule{Vec3(0.5, 0.1, 0.5), Vec3(0.4, -0.1, 0.5), 0.06}, "arm");
  const JointVector q = fanuc.home();
  const auto pairs = pair_clearances(fanuc, q, env);
  ASSERT_EQ(pairs.size(), fanuc.capsules().size() * env.size());
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    EXPECT_EQ(pairs[k].robot_capsule, static_cast<int>(k / env.size()));
    EXPECT_EQ(pairs[k].env_capsule, static_cast<int>(k % env.size()));
    EXPECT_NEAR(pairs[k].d, pair_distance(fanuc, q, env, pairs[k].robot_capsule, pairs[k].env_capsule), 1e-15);
    lowest = std::min(lowest, pairs[k].d);
  }
  EXPECT_EQ(lowest, min_distance(fanuc, q, env).d);
}

}  // namespace
}  // namespace handover
