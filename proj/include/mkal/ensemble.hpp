#pragma once

#include <span>
#include <vector>

#include "mkal/kernel_model.hpp"

namespace mkal {

/// Softmax of -eta * losses with the maximum shifted out of the exponent.
/// Losses must be finite and non-negative; eta must be finite and >= 0.
Vector exp_weights(std::span<const double> losses, double eta);

/// P kernel models combined with exponential-weights reliabilities.
///
/// Invariant: weights() == exp_weights(cumulative_losses(), eta_g()), a PMF.
/// The cumulative losses only ever grow.
class Ensemble {
 public:
  Ensemble(std::vector<KernelModel> models, double eta_g);

  /// Fresh ensemble: theta = 0 for every map and uniform weights.
  static Ensemble from_maps(const std::vector<FeatureMap>& maps, double eta_g);

  std::size_t size() const noexcept { return models_.size(); }
  double eta_g() const noexcept { return eta_g_; }
  const std::vector<KernelModel>& models() const noexcept { return models_; }
  std::vector<KernelModel>& models() noexcept { return models_; }
  const Vector& weights() const noexcept { return weights_; }
  const Vector& cumulative_losses() const noexcept { return cum_losses_; }

  Vector kernel_predictions(const VectorRef& x) const;
  double combined_predict(const VectorRef& x) const;
  /// Weighted sum of per-kernel predictions computed elsewhere.
  double combine(std::span<const double> predictions) const;

  /// Adds one round of per-kernel losses and recomputes the weights.
  void update_weights(std::span<const double> per_kernel_losses);

  /// Replaces the cumulative losses wholesale (used when restoring a state).
  void set_cumulative_losses(std::span<const double> cumulative);

 private:
  std::vector<KernelModel> models_;
  Vector weights_;
  Vector cum_losses_;
  double eta_g_;
};

}  // namespace mkal
