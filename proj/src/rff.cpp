#include "mkal/rff.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mkal/errors.hpp"
#include "mkal/seed.hpp"

namespace mkal {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Data: return "data";
    case ErrorKind::State: return "state";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
  }
  return "unknown";
}

KernelSpec::KernelSpec(double variance) : variance_(variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw ParameterError("kernel variance must be positive and finite, got " +
                         std::to_string(variance));
}

FeatureMap::FeatureMap(KernelSpec kernel, std::size_t num_features, std::size_t input_dim,
                       std::uint64_t seed)
    : kernel_(kernel), seed_(seed) {
  if (num_features == 0) throw ParameterError("number of random features must be positive");
  if (input_dim == 0) throw ParameterError("input dimension must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(kernel.variance()));
  frequencies_.resize(static_cast<Eigen::Index>(num_features),
                      static_cast<Eigen::Index>(input_dim));
  // Drawn row by row: the first D rows match a smaller map built from the same seed.
  for (Eigen::Index l = 0; l < frequencies_.rows(); ++l)
    for (Eigen::Index k = 0; k < frequencies_.cols(); ++k) frequencies_(l, k) = normal(rng);
}

FeatureMap::FeatureMap(KernelSpec kernel, Eigen::MatrixXd frequencies, std::uint64_t seed)
    : kernel_(kernel), frequencies_(std::move(frequencies)), seed_(seed) {
  if (frequencies_.rows() == 0 || frequencies_.cols() == 0)
    throw ParameterError("frequency matrix must be non-empty");
  if (!frequencies_.allFinite()) throw ParameterError("frequency matrix has non-finite entries");
}

Vector FeatureMap::features(const VectorRef& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim())
    throw ParameterError("feature map expects input of dimension " + std::to_string(input_dim()) +
                         ", got " + std::to_string(x.size()));
  const Eigen::Index d = frequencies_.rows();
  const Vector projections = frequencies_ * x;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Vector z(2 * d);
  for (Eigen::Index l = 0; l < d; ++l) {
    z(l) = scale * std::sin(projections(l));
    z(d + l) = scale * std::cos(projections(l));
  }
  return z;
}

double dictionary_variance(std::size_t index) {
  if (index == 0) throw ParameterError("dictionary kernel index is 1-based");
  return std::pow(10.0, (static_cast<double>(index) - 3.0) / 2.0);
}

std::vector<FeatureMap> build_dictionary(std::size_t num_kernels, std::size_t input_dim,
                                         std::size_t num_features, std::uint64_t seed) {
  if (num_kernels == 0) throw ParameterError("number of kernels must be positive");
  std::vector<FeatureMap> maps;
  maps.reserve(num_kernels);
  for (std::size_t i = 1; i <= num_kernels; ++i)
    maps.emplace_back(KernelSpec(dictionary_variance(i)), num_features, input_dim,
                      derive_seed(seed, {i}));
  return maps;
}

Vector feature_vector(const FeatureMap& map, const VectorRef& x) { return map.features(x); }

double exact_kernel(const KernelSpec& spec, const VectorRef& x, const VectorRef& x_prime) {
  if (x.size() != x_prime.size())
    throw ParameterError("kernel arguments differ in dimension: " + std::to_string(x.size()) +
                         " vs " + std::to_string(x_prime.size()));
  return std::exp(-(x - x_prime).squaredNorm() / (2.0 * spec.variance()));
}

}  // namespace mkal
