#include "mkal/kernel_model.hpp"

#include <cmath>
#include <string>

#include "mkal/errors.hpp"

namespace mkal {

double loss(double yhat, double y) noexcept { return SquaredLoss::value(yhat, y); }

KernelModel::KernelModel(std::shared_ptr<const FeatureMap> map)
    : map_(std::move(map)) {
  if (!map_) throw ParameterError("kernel model needs a feature map");
  theta_ = Vector::Zero(static_cast<Eigen::Index>(map_->output_dim()));
}

KernelModel::KernelModel(std::shared_ptr<const FeatureMap> map, Vector theta)
    : map_(std::move(map)), theta_(std::move(theta)) {
  if (!map_) throw ParameterError("kernel model needs a feature map");
  if (static_cast<std::size_t>(theta_.size()) != map_->output_dim())
    throw ParameterError("theta has length " + std::to_string(theta_.size()) + ", expected " +
                         std::to_string(map_->output_dim()));
  if (!theta_.allFinite()) throw DataError("theta has non-finite entries");
}

double KernelModel::predict(const VectorRef& x) const { return predict_features(map_->features(x)); }

double KernelModel::predict_features(const VectorRef& z) const {
  if (z.size() != theta_.size())
    throw ParameterError("feature vector has length " + std::to_string(z.size()) + ", expected " +
                         std::to_string(theta_.size()));
  return theta_.dot(z);
}

Vector KernelModel::gradient(const VectorRef& x, double y) const {
  const Vector z = map_->features(x);
  return SquaredLoss::derivative(theta_.dot(z), y) * z;
}

void KernelModel::sgd_step(const VectorRef& x, double y, double eta_l) {
  if (!x.allFinite()) throw DataError("sgd_step: non-finite input");
  sgd_step_features(map_->features(x), y, eta_l);
}

void KernelModel::sgd_step_features(const VectorRef& z, double y, double eta_l) {
  if (!std::isfinite(y)) throw DataError("sgd_step: non-finite label");
  if (!(eta_l >= 0.0) || !std::isfinite(eta_l))
    throw ParameterError("local step size must be finite and non-negative");
  if (!z.allFinite()) throw DataError("sgd_step: non-finite feature vector");
  const double g = SquaredLoss::derivative(predict_features(z), y);
  Vector next = theta_ - (eta_l * g) * z;
  if (!next.allFinite()) throw DataError("sgd_step diverged to non-finite parameters");
  theta_ = std::move(next);
}

}  // namespace mkal
