#pragma once

#include <span>
#include <vector>

#include "mkal/criteria.hpp"
#include "mkal/ensemble.hpp"
#include "mkal/rff.hpp"

namespace mkal {

/// Per-kernel least-squares parameters and their exponential-weights mixture.
struct BatchFit {
  std::vector<Vector> thetas;
  Vector weights;
};

/// T x 2D design matrix whose row t is z(x_t).
Eigen::MatrixXd design_matrix(const FeatureMap& map, const Matrix& samples);

/// Minimum-norm solution of min |Z' theta - y|^2 + ridge |theta|^2, where the
/// columns of Z are the feature vectors of `samples`. Solved with a complete
/// orthogonal decomposition in O(T (2D)^2); for ridge > 0 the system is
/// augmented with sqrt(ridge) I rows.
Vector fit_theta(const FeatureMap& map, const Matrix& samples, const Vector& labels, double ridge);

/// Total training loss of each kernel, then exp_weights(losses, eta_g).
Vector fit_weights(std::span<const Vector> thetas, std::span<const FeatureMap> maps,
                   const Matrix& samples, const Vector& labels, double eta_g);

BatchFit fit(std::span<const FeatureMap> maps, const Matrix& samples, const Vector& labels,
             double ridge, double eta_g);

/// sum_i p_i theta_i' z_i(x).
double batch_predict(const BatchFit& fit, std::span<const FeatureMap> maps, const VectorRef& x);

/// Prediction of the ensemble the active loop ended with.
double online_predict(const Ensemble& ensemble, const VectorRef& x);

}  // namespace mkal
