#include "mkal/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mkal/errors.hpp"

namespace mkal {

Vector exp_weights(std::span<const double> losses, double eta) {
  if (losses.empty()) throw ParameterError("exp_weights: empty loss vector");
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw ParameterError("exp_weights: rate must be finite and non-negative");
  for (double l : losses)
    if (!std::isfinite(l) || l < 0.0) throw DataError("exp_weights: losses must be finite and >= 0");

  const double min_loss = *std::min_element(losses.begin(), losses.end());
  Vector w(static_cast<Eigen::Index>(losses.size()));
  for (std::size_t i = 0; i < losses.size(); ++i)
    w(static_cast<Eigen::Index>(i)) = std::exp(-eta * (losses[i] - min_loss));
  // The minimum-loss entry contributes exp(0) = 1, so the sum is >= 1.
  return w / w.sum();
}

Ensemble::Ensemble(std::vector<KernelModel> models, double eta_g)
    : models_(std::move(models)), eta_g_(eta_g) {
  if (models_.empty()) throw ParameterError("ensemble needs at least one kernel model");
  if (!(eta_g >= 0.0) || !std::isfinite(eta_g))
    throw ParameterError("global step size must be finite and non-negative");
  const auto p = static_cast<Eigen::Index>(models_.size());
  cum_losses_ = Vector::Zero(p);
  weights_ = Vector::Constant(p, 1.0 / static_cast<double>(p));
}

Ensemble Ensemble::from_maps(const std::vector<FeatureMap>& maps, double eta_g) {
  std::vector<KernelModel> models;
  models.reserve(maps.size());
  for (const auto& m : maps) models.emplace_back(std::make_shared<const FeatureMap>(m));
  return Ensemble(std::move(models), eta_g);
}

Vector Ensemble::kernel_predictions(const VectorRef& x) const {
  Vector out(static_cast<Eigen::Index>(models_.size()));
  for (std::size_t i = 0; i < models_.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = models_[i].predict(x);
  return out;
}

double Ensemble::combined_predict(const VectorRef& x) const {
  const Vector f = kernel_predictions(x);
  return combine({f.data(), static_cast<std::size_t>(f.size())});
}

double Ensemble::combine(std::span<const double> predictions) const {
  if (predictions.size() != models_.size())
    throw ParameterError("expected " + std::to_string(models_.size()) + " predictions, got " +
                         std::to_string(predictions.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    s += weights_(static_cast<Eigen::Index>(i)) * predictions[i];
  return s;
}

void Ensemble::update_weights(std::span<const double> per_kernel_losses) {
  if (per_kernel_losses.size() != models_.size())
    throw ParameterError("expected " + std::to_string(models_.size()) + " losses, got " +
                         std::to_string(per_kernel_losses.size()));
  Vector next = cum_losses_;
  for (std::size_t i = 0; i < per_kernel_losses.size(); ++i) {
    const double l = per_kernel_losses[i];
    if (!std::isfinite(l) || l < 0.0)
      throw DataError("kernel loss must be finite and non-negative, got " + std::to_string(l));
    next(static_cast<Eigen::Index>(i)) += l;
  }
  set_cumulative_losses({next.data(), static_cast<std::size_t>(next.size())});
}

void Ensemble::set_cumulative_losses(std::span<const double> cumulative) {
  if (cumulative.size() != models_.size())
    throw ParameterError("cumulative loss vector has the wrong length");
  Vector weights = exp_weights(cumulative, eta_g_);
  cum_losses_ = Eigen::Map<const Vector>(cumulative.data(), static_cast<Eigen::Index>(cumulative.size()));
  weights_ = std::move(weights);
}

}  // namespace mkal
