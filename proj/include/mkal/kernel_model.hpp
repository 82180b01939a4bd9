#pragma once

#include <memory>

#include "mkal/rff.hpp"

namespace mkal {

/// Least-squares loss (yhat - y)^2.
struct SquaredLoss {
  static double value(double yhat, double y) noexcept {
    const double r = yhat - y;
    return r * r;
  }
  /// Derivative with respect to yhat.
  static double derivative(double yhat, double y) noexcept { return 2.0 * (yhat - y); }
};

double loss(double yhat, double y) noexcept;

/// Linear predictor theta' z(x) in the random-feature space of one kernel.
class KernelModel {
 public:
  /// Starts from theta = 0.
  explicit KernelModel(std::shared_ptr<const FeatureMap> map);
  KernelModel(std::shared_ptr<const FeatureMap> map, Vector theta);

  const FeatureMap& map() const noexcept { return *map_; }
  const std::shared_ptr<const FeatureMap>& shared_map() const noexcept { return map_; }
  const Vector& theta() const noexcept { return theta_; }

  double predict(const VectorRef& x) const;
  /// Prediction from an already computed feature vector z(x).
  double predict_features(const VectorRef& z) const;

  /// Gradient of loss(predict(x), y) with respect to theta.
  Vector gradient(const VectorRef& x, double y) const;

  /// theta <- theta - eta_l * 2 (theta' z(x) - y) z(x).
  void sgd_step(const VectorRef& x, double y, double eta_l);
  void sgd_step_features(const VectorRef& z, double y, double eta_l);

 private:
  std::shared_ptr<const FeatureMap> map_;
  Vector theta_;
};

}  // namespace mkal
