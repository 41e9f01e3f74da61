#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "handover/errors.hpp"
#include "handover/perception.hpp"
#include "support/oracles.hpp"

namespace handover {
namespace {

// Right-wrist standard deviations (cm) the fixtures are built around.
const Vec3 kDarkSigmaCm(0.98, 6.08, 10.69);
const Vec3 kBrightSigmaCm(0.10, 0.40, 0.75);

std::vector<SkeletonFrame> load_fixture(const std::string& name) {
  return load_skeleton_trajectory(oracle::data_path("fixtures/" + name + ".jsonl"));
}

std::string frame_line(double t, const Vec3& wrist) {
  std::ostringstream os;
  os.precision(17);
  os << R"({"t":)" << t << R"(,"keypoints":{"right_wrist":[)" << wrist.x() << "," << wrist.y() << "," << wrist.z()
     << "]}}";
  return os.str();
}

// ---------------------------- trajectory files --------------------------------

TEST(SkeletonTrajectory, BundledFixtureLengthAndRate) {
  const auto frames = load_fixture("bright_near");
  ASSERT_EQ(frames.size(), 300u);
  for (std::size_t k = 1; k < frames.size(); ++k) {
    EXPECT_NEAR(frames[k].t - frames[k - 1].t, 1.0 / 30.0, 1e-9);
  }
}

TEST(SkeletonTrajectory, ShuffledTimestampsAreSorted) {
  std::stringstream in;
  in << frame_line(0.2, Vec3(0, 0, 0)) << "\n" << frame_line(0.0, Vec3(1, 0, 0)) << "\n"
     << frame_line(0.1, Vec3(2, 0, 0)) << "\n";
  const auto frames = parse_skeleton_trajectory(in);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[0].t, 0.0);
  EXPECT_EQ(frames[1].t, 0.1);
  EXPECT_EQ(frames[2].t, 0.2);
  EXPECT_EQ(frames[0].at(keypoint::kRightWrist).x(), 1.0);
}

TEST(SkeletonTrajectory, ConfidenceDefaultsToOne) {
  std::stringstream in(frame_line(0.0, Vec3(1, 2, 3)));
  const auto frames = parse_skeleton_trajectory(in);
  EXPECT_EQ(frames.at(0).confidence.at(keypoint::kRightWrist), 1.0);
}

TEST(SkeletonTrajectory, EmptyInputIsRejected) {
  std::stringstream in("# only a comment\n\n");
  try {
    parse_skeleton_trajectory(in);
    FAIL() << "expected EmptyTrajectory";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyTrajectory);
  }
}

TEST(SkeletonTrajectory, ParseErrorNamesTheLine) {
  std::stringstream in(frame_line(0.0, Vec3::Zero()) + "\n{\"t\": oops}\n");
  try {
    parse_skeleton_trajectory(in);
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

// ------------------------------ keypoint stats --------------------------------

TEST(KeypointStats, ConstantKeypointHasZeroSigma) {
  const auto frames = load_fixture("constant");
  const auto stats = keypoint_stats(frames, keypoint::kRightWrist);
  EXPECT_EQ(stats.uncertainty.sigma, Vec3::Zero());
  EXPECT_EQ(stats.uncertainty.window, 10);
}

TEST(KeypointStats, GaussianNoiseEstimate) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<SkeletonFrame> frames(10000);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    frames[k].t = static_cast<double>(k) / 30.0;
    frames[k].keypoints[keypoint::kRightWrist] = Vec3(0.5 + noise(rng), noise(rng), 1.0 + noise(rng));
    frames[k].confidence[keypoint::kRightWrist] = 1.0;
  }
  const auto stats = keypoint_stats(frames, keypoint::kRightWrist, 10000);
  for (int axis = 0; axis < 3; ++axis) EXPECT_NEAR(stats.uncertainty.sigma[axis], 0.01, 0.0005);
}

TEST(KeypointStats, DarkFixtureReproducesTableValues) {
  const auto frames = load_fixture("dark_near");
  // Every aligned 10-frame window of the fixture carries the same spread.
  for (std::size_t end = 10; end <= frames.size(); end += 10) {
    const std::span<const SkeletonFrame> window(frames.data(), end);
    const auto stats = keypoint_stats(window, keypoint::kRightWrist);
    EXPECT_LE((stats.uncertainty.sigma * 100.0 - kDarkSigmaCm).cwiseAbs().maxCoeff(), 1e-6) << "end " << end;
  }
}

TEST(KeypointStats, BrightFixtureReproducesTableValues) {
  const auto frames = load_fixture("bright_far");
  const auto stats = keypoint_stats(frames, keypoint::kRightWrist);
  EXPECT_LE((stats.uncertainty.sigma * 100.0 - kBrightSigmaCm).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(KeypointStats, SampleDeviationUsesBesselCorrection) {
  std::vector<SkeletonFrame> frames(4);
  const double xs[] = {1.0, 2.0, 3.0, 4.0};
  for (int k = 0; k < 4; ++k) {
    frames[k].t = k;
    frames[k].keypoints[keypoint::kRightWrist] = Vec3(xs[k], 0.0, 0.0);
  }
  const auto stats = keypoint_stats(frames, keypoint::kRightWrist, 4);
  // mean 2.5, squared deviations sum to 5, divided by N - 1 = 3.
  EXPECT_NEAR(stats.uncertainty.sigma.x(), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(stats.mean.x(), 2.5, 1e-15);
}

TEST(KeypointStats, PermutationInvariantWithinWindow) {
  auto frames = load_fixture("dark_far");
  frames.resize(10);
  const auto a = keypoint_stats(frames, keypoint::kRightWrist);
  std::mt19937_64 rng(32);
  std::shuffle(frames.begin(), frames.end(), rng);
  const auto b = keypoint_stats(frames, keypoint::kRightWrist);
  EXPECT_LE((a.uncertainty.sigma - b.uncertainty.sigma).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(KeypointStats, SingleFrameWindowIsInsufficient) {
  const auto frames = load_fixture("dark_near");
  try {
    keypoint_stats(frames, keypoint::kRightWrist, 1);
    FAIL() << "expected InsufficientFrames";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientFrames);
  }
}

// ------------------------------- nominal goal ---------------------------------

SkeletonFrame wrist_frame(const Vec3& wrist, double confidence = 1.0) {
  SkeletonFrame f;
  f.keypoints[keypoint::kRightWrist] = wrist;
  f.confidence[keypoint::kRightWrist] = confidence;
  return f;
}

TEST(NominalGoal, WristWithoutOffset) {
  const Pose g = nominal_goal(wrist_frame(Vec3(0.5, 0.2, 0.3)), DeliverySpec{});
  EXPECT_EQ(g.p, Vec3(0.5, 0.2, 0.3));
}

TEST(NominalGoal, OffsetAndOrientationFromSpec) {
  DeliverySpec spec;
  spec.offset = Vec3(0.0, 0.0, 0.05);
  spec.orientation = Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);
  const Pose g = nominal_goal(wrist_frame(Vec3(0.5, 0.2, 0.3)), spec);
  EXPECT_LE((g.p - Vec3(0.5, 0.2, 0.35)).norm(), 1e-15);
  EXPECT_EQ(g.orientation.coeffs(), spec.orientation.coeffs());
}

TEST(NominalGoal, ZeroConfidenceWristIsMissing) {
  try {
    nominal_goal(wrist_frame(Vec3(0.5, 0.2, 0.3), 0.0), DeliverySpec{});
    FAIL() << "expected MissingKeypoint";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingKeypoint);
  }
}

// ------------------------------- adapted goal ---------------------------------

GoalAdaptParams diagonal_away() {
  GoalAdaptParams p;
  p.lambda = Vec3::Ones();
  p.u_safe = Vec3(0.0, 1.0, 1.0) / std::sqrt(2.0);
  return p;
}

UncertaintyEstimate sigma_cm(const Vec3& cm) {
  UncertaintyEstimate u;
  u.sigma = cm / 100.0;
  u.window = 10;
  u.keypoint = keypoint::kRightWrist;
  return u;
}

TEST(AdaptGoal, ZeroSigmaIsBitwiseIdentity) {
  Pose nominal;
  nominal.p = Vec3(0.123456789, -0.3, 0.777);
  nominal.orientation = Eigen::Quaterniond(0.5, 0.5, -0.5, 0.5);
  const Pose adapted = adapt_goal(nominal, sigma_cm(Vec3::Zero()), diagonal_away());
  EXPECT_EQ(adapted.p, nominal.p);
  EXPECT_EQ(adapted.orientation.coeffs(), nominal.orientation.coeffs());
}

TEST(AdaptGoal, DarkValuesMatchHandComputation) {
  const Pose adapted = adapt_goal(Pose{}, sigma_cm(kDarkSigmaCm), diagonal_away());
  // (lambda o sigma) o u_safe = (0.98 * 0, 6.08 / sqrt 2, 10.69 / sqrt 2) cm.
  const Vec3 expected_cm(0.0, 6.08 / std::sqrt(2.0), 10.69 / std::sqrt(2.0));
  EXPECT_NEAR(expected_cm.y(), 4.29921, 5e-6);
  EXPECT_NEAR(expected_cm.z(), 7.55897, 5e-6);
  EXPECT_LE((adapted.p - expected_cm / 100.0).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(AdaptGoal, BrightOffsetIsSmallerThanDark) {
  const double dark = adapt_goal(Pose{}, sigma_cm(kDarkSigmaCm), diagonal_away()).p.norm();
  const double bright = adapt_goal(Pose{}, sigma_cm(kBrightSigmaCm), diagonal_away()).p.norm();
  const double bright_expected = std::hypot(0.40, 0.75) / std::sqrt(2.0) / 100.0;
  EXPECT_NEAR(bright, bright_expected, 1e-12);
  EXPECT_NEAR(bright * 100.0, 0.601, 5e-4);
  EXPECT_LT(bright, dark);
}

TEST(AdaptGoal, OrientationIsNeverChanged) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  for (int trial = 0; trial < 100; ++trial) {
    Pose nominal;
    nominal.orientation = Eigen::Quaterniond::UnitRandom();
    UncertaintyEstimate est;
    est.sigma = Vec3(u(rng), u(rng), u(rng));
    EXPECT_EQ(adapt_goal(nominal, est, diagonal_away()).orientation.coeffs(), nominal.orientation.coeffs());
  }
}

TEST(AdaptGoal, LargerSigmaMovesFurtherFromHuman) {
  const Vec3 human(1.0, -0.5, 0.0);  // the goal is pushed along +y +z, away from here
  Pose nominal;
  nominal.p = Vec3(0.6, 0.0, 0.3);
  const GoalAdaptParams params = diagonal_away();
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  for (int trial = 0; trial < 200; ++trial) {
    UncertaintyEstimate est;
    est.sigma = Vec3(u(rng), u(rng), u(rng));
    const double before = (adapt_goal(nominal, est, params).p - human).norm();
    est.sigma[trial % 3] += u(rng);
    EXPECT_GE((adapt_goal(nominal, est, params).p - human).norm(), before);
  }
}

TEST(AdaptGoal, ParamsValidation) {
  GoalAdaptParams p;
  p.u_safe = Vec3(1.0, 1.0, 0.0);
  EXPECT_THROW(p.validate(), Error);
  p.u_safe = Vec3::UnitZ();
  p.lambda = Vec3(1.0, -1.0, 1.0);
  EXPECT_THROW(p.validate(), Error);
}

// ------------------------------- body capsules --------------------------------

TEST(HumanCapsules, TPoseArmsAreHorizontal) {
  const auto frames = load_fixture("tpose");
  const CapsuleSet body = human_capsules(frames.front());
  ASSERT_EQ(body.size(), 9u);
  int arms = 0;
  for (std::size_t k = 0; k < body.size(); ++k) {
    if (body.labels[k].find("arm") == std::string::npos) continue;
    ++arms;
    EXPECT_NEAR(body.capsules[k].a.z(), body.capsules[k].b.z(), 1e-12) << body.labels[k];
  }
  EXPECT_EQ(arms, 4);
}

TEST(HumanCapsules, IdenticalFramesGiveIdenticalCapsules) {
  const auto frames = load_fixture("tpose");
  const CapsuleSet a = human_capsules(frames[0]);
  const CapsuleSet b = human_capsules(frames[1]);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.capsules[k].a, b.capsules[k].a);
    EXPECT_EQ(a.capsules[k].b, b.capsules[k].b);
    EXPECT_EQ(a.capsules[k].r, b.capsules[k].r);
    EXPECT_EQ(a.labels[k], b.labels[k]);
  }
}

TEST(HumanCapsules, MissingPelvisIsRejected) {
  auto frame = load_fixture("tpose").front();
  frame.keypoints.erase(keypoint::kPelvis);
  try {
    human_capsules(frame);
    FAIL() << "expected MissingKeypoint";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingKeypoint);
  }
}

}  // namespace
}  // namespace handover
