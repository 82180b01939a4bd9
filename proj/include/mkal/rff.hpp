#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mkal {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Bandwidth of a Gaussian kernel exp(-|x - x'|^2 / (2 variance)).
class KernelSpec {
 public:
  explicit KernelSpec(double variance);
  double variance() const noexcept { return variance_; }

 private:
  double variance_;
};

/// Random Fourier feature map for one Gaussian kernel.
///
/// Holds D frequency vectors drawn i.i.d. from N(0, I / variance), the
/// spectral measure of the kernel. The map is immutable once built and
/// regenerating it from the same (seed, D, d, kernel) gives identical
/// frequencies.
class FeatureMap {
 public:
  FeatureMap(KernelSpec kernel, std::size_t num_features, std::size_t input_dim,
             std::uint64_t seed);

  /// Wraps explicit frequencies (rows are v_1..v_D). Used for hand-built maps.
  FeatureMap(KernelSpec kernel, Eigen::MatrixXd frequencies, std::uint64_t seed = 0);

  const KernelSpec& kernel() const noexcept { return kernel_; }
  std::size_t num_features() const noexcept { return static_cast<std::size_t>(frequencies_.rows()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(frequencies_.cols()); }
  std::size_t output_dim() const noexcept { return 2 * num_features(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const Eigen::MatrixXd& frequencies() const noexcept { return frequencies_; }

  /// (1/sqrt(D)) [sin(v_1'x) .. sin(v_D'x), cos(v_1'x) .. cos(v_D'x)].
  Vector features(const VectorRef& x) const;

 private:
  KernelSpec kernel_;
  Eigen::MatrixXd frequencies_;
  std::uint64_t seed_;
};

/// Variance of kernel `index` (1-based) in the dictionary: 10^((index - 3) / 2).
double dictionary_variance(std::size_t index);

/// P feature maps, map i (1-based) using dictionary_variance(i) and a seed
/// derived from (seed, i).
std::vector<FeatureMap> build_dictionary(std::size_t num_kernels, std::size_t input_dim,
                                         std::size_t num_features, std::uint64_t seed);

Vector feature_vector(const FeatureMap& map, const VectorRef& x);

/// Closed-form Gaussian kernel value; the oracle the feature maps approximate.
double exact_kernel(const KernelSpec& spec, const VectorRef& x, const VectorRef& x_prime);

}  // namespace mkal
