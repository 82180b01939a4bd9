#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mkal/errors.hpp"
#include "mkal/kernel_model.hpp"
#include "oracles.hpp"

using namespace mkal;

namespace {

std::shared_ptr<const FeatureMap> make_map(std::size_t D, std::size_t d, std::uint64_t seed,
                                           double variance = 1.0) {
  return std::make_shared<const FeatureMap>(KernelSpec(variance), D, d, seed);
}

Vector basis(Eigen::Index n, Eigen::Index k) {
  Vector e = Vector::Zero(n);
  e(k) = 1.0;
  return e;
}

}  // namespace

TEST(SquaredLoss, Values) {
  EXPECT_EQ(loss(2.0, 2.0), 0.0);
  EXPECT_EQ(loss(3.0, 1.0), 4.0);
  EXPECT_EQ(loss(-1.0, 2.0), 9.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    const double a = g(rng), b = g(rng);
    EXPECT_GT(loss(a, b), 0.0);
    EXPECT_EQ(loss(a, b), loss(b, a));
  }
}

TEST(KernelModel, StartsAtZero) {
  const auto map = make_map(6, 2, 1);
  const KernelModel model(map);
  EXPECT_EQ(model.theta().size(), 12);
  EXPECT_TRUE(model.theta().isZero(0.0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 20; ++k) EXPECT_EQ(model.predict(Vector::NullaryExpr(2, [&] { return u(rng); })), 0.0);
}

TEST(KernelModel, PredictsBasisEntriesAtOrigin) {
  const std::size_t D = 4;
  const auto map = make_map(D, 3, 5);
  EXPECT_EQ(KernelModel(map, basis(8, 0)).predict(Vector::Zero(3)), 0.0);
  EXPECT_DOUBLE_EQ(KernelModel(map, basis(8, D)).predict(Vector::Zero(3)), 1.0 / std::sqrt(4.0));
}

TEST(KernelModel, RejectsBadShapes) {
  const auto map = make_map(3, 2, 1);
  EXPECT_THROW(KernelModel(map, Vector::Zero(5)), ParameterError);
  EXPECT_THROW(KernelModel(nullptr), ParameterError);
  const KernelModel model(map);
  EXPECT_THROW(model.predict(Vector::Zero(3)), ParameterError);
}

TEST(SgdStep, HandEvaluatedUpdate) {
  // D = 1 with a zero frequency: z(x) = (sin 0, cos 0) = (0, 1) for every x.
  const auto map = std::make_shared<const FeatureMap>(KernelSpec(1.0), Eigen::MatrixXd::Zero(1, 1));
  KernelModel model(map);
  Vector x(1);
  x << 0.7;
  model.sgd_step(x, 1.0, 0.1);
  EXPECT_DOUBLE_EQ(model.theta()(0), 0.0);
  EXPECT_DOUBLE_EQ(model.theta()(1), 0.2);
}

TEST(SgdStep, ZeroGradientAtOptimum) {
  KernelModel model(make_map(5, 2, 3));
  model.sgd_step(Vector::Ones(2), 0.0, 0.3);
  EXPECT_TRUE(model.theta().isZero(0.0));
}

TEST(SgdStep, VanishingStepBarelyMoves) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const auto map = make_map(5, 2, 3);
  Vector theta = Vector::NullaryExpr(10, [&] { return g(rng); });
  KernelModel model(map, theta);
  model.sgd_step(Vector::Ones(2), 5.0, 1e-300);
  EXPECT_LT((model.theta() - theta).cwiseAbs().maxCoeff(), 1e-290);
}

TEST(SgdStep, RejectsNonFiniteInputs) {
  KernelModel model(make_map(3, 2, 3));
  const double nan = std::nan("");
  Vector bad(2);
  bad << 1.0, nan;
  EXPECT_THROW(model.sgd_step(bad, 1.0, 0.1), DataError);
  EXPECT_THROW(model.sgd_step(Vector::Ones(2), INFINITY, 0.1), DataError);
  EXPECT_THROW(model.sgd_step(Vector::Ones(2), 1.0, -0.1), ParameterError);
  EXPECT_TRUE(model.theta().isZero(0.0));
}

TEST(SgdStep, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const auto map = make_map(6, 3, rng(), 0.5);
    const Vector theta = Vector::NullaryExpr(12, [&] { return g(rng); });
    const Vector x = Vector::NullaryExpr(3, [&] { return u(rng); });
    const double y = g(rng);
    const Vector analytic = KernelModel(map, theta).gradient(x, y);
    const Vector numeric = oracle::central_difference(
        [&](const Vector& t) { return loss(KernelModel(map, t).predict(x), y); }, theta);
    EXPECT_LE((analytic - numeric).norm(), 1e-5 * std::max(1.0, analytic.norm()));
  }
}

TEST(SgdStep, DescentForSmallSteps) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const auto map = make_map(4, 2, rng());
    KernelModel model(map, Vector::NullaryExpr(8, [&] { return g(rng); }));
    const Vector x = Vector::NullaryExpr(2, [&] { return g(rng); });
    const double y = g(rng);
    const double before = loss(model.predict(x), y);
    model.sgd_step(x, y, std::uniform_real_distribution<double>(0.0, 0.5)(rng));
    EXPECT_LE(loss(model.predict(x), y), before + 1e-15);
  }
}
