#include "mkal/batch_solver.hpp"

#include <cmath>
#include <string>

#include "mkal/errors.hpp"
#include "mkal/kernel_model.hpp"

namespace mkal {

Eigen::MatrixXd design_matrix(const FeatureMap& map, const Matrix& samples) {
  if (static_cast<std::size_t>(samples.cols()) != map.input_dim())
    throw ParameterError("samples have dimension " + std::to_string(samples.cols()) +
                         ", feature map expects " + std::to_string(map.input_dim()));
  Eigen::MatrixXd a(samples.rows(), static_cast<Eigen::Index>(map.output_dim()));
  for (Eigen::Index t = 0; t < samples.rows(); ++t) a.row(t) = map.features(samples.row(t).transpose()).transpose();
  return a;
}

Vector fit_theta(const FeatureMap& map, const Matrix& samples, const Vector& labels, double ridge) {
  if (samples.rows() == 0) throw ParameterError("fit_theta needs at least one labeled sample");
  if (labels.size() != samples.rows()) throw ParameterError("fit_theta: samples and labels differ in count");
  if (!samples.allFinite() || !labels.allFinite()) throw DataError("fit_theta: non-finite data");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ParameterError("ridge must be finite and non-negative");

  const Eigen::MatrixXd a = design_matrix(map, samples);
  Vector theta;
  if (ridge > 0.0) {
    const Eigen::Index n = a.cols();
    Eigen::MatrixXd augmented(a.rows() + n, n);
    augmented << a, std::sqrt(ridge) * Eigen::MatrixXd::Identity(n, n);
    Vector rhs = Vector::Zero(a.rows() + n);
    rhs.head(a.rows()) = labels;
    theta = augmented.completeOrthogonalDecomposition().solve(rhs);
  } else {
    theta = a.completeOrthogonalDecomposition().solve(labels);
  }
  if (!theta.allFinite()) throw DataError("least-squares fit produced non-finite parameters");
  return theta;
}

Vector fit_weights(std::span<const Vector> thetas, std::span<const FeatureMap> maps,
                   const Matrix& samples, const Vector& labels, double eta_g) {
  if (thetas.size() != maps.size() || thetas.empty())
    throw ParameterError("fit_weights needs one theta per feature map");
  if (labels.size() != samples.rows()) throw ParameterError("fit_weights: samples and labels differ in count");
  std::vector<double> totals(thetas.size(), 0.0);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const KernelModel model(std::make_shared<const FeatureMap>(maps[i]), thetas[i]);
    for (Eigen::Index t = 0; t < samples.rows(); ++t)
      totals[i] += loss(model.predict(samples.row(t).transpose()), labels(t));
  }
  return exp_weights(totals, eta_g);
}

BatchFit fit(std::span<const FeatureMap> maps, const Matrix& samples, const Vector& labels,
             double ridge, double eta_g) {
  BatchFit out;
  out.thetas.reserve(maps.size());
  for (const auto& m : maps) out.thetas.push_back(fit_theta(m, samples, labels, ridge));
  out.weights = fit_weights(out.thetas, maps, samples, labels, eta_g);
  return out;
}

double batch_predict(const BatchFit& fit, std::span<const FeatureMap> maps, const VectorRef& x) {
  if (fit.thetas.size() != maps.size() || static_cast<std::size_t>(fit.weights.size()) != maps.size())
    throw ParameterError("batch fit and feature maps differ in kernel count");
  double s = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (fit.thetas[i].size() != static_cast<Eigen::Index>(maps[i].output_dim()))
      throw ParameterError("batch fit theta does not match its feature map");
    s += fit.weights(static_cast<Eigen::Index>(i)) * fit.thetas[i].dot(maps[i].features(x));
  }
  return s;
}

double online_predict(const Ensemble& ensemble, const VectorRef& x) { return ensemble.combined_predict(x); }

}  // namespace mkal
