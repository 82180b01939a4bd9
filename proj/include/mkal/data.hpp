#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mkal/criteria.hpp"
#include "mkal/pool.hpp"
#include "mkal/rff.hpp"

namespace mkal {

/// M samples of dimension d with real labels. No non-finite entries.
struct Dataset {
  Matrix features;
  Vector labels;
  std::string name;

  std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  /// Throws DataError on shape mismatch, non-finite values, M < 2 or d < 1.
  void validate() const;
};

enum class InferenceMode { Online, Supervised };

std::string_view to_string(InferenceMode mode);
InferenceMode parse_inference(std::string_view name);

/// Inputs of one active-learning run (one criterion, one budget).
struct ExperimentConfig {
  double budget_fraction = 0.2;
  CriterionKind criterion = CriterionKind::Ekd;
  std::size_t num_kernels = 10;
  std::size_t rf_dim = 50;
  double eta_l = 0.05;
  double eta_g = 1.0;
  double ridge = 1e-8;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  InferenceMode inference = InferenceMode::Online;
  bool standardize = true;
  bool cache_features = true;

  /// Throws ConfigError on non-positive counts or rates, or a fraction outside (0, 1).
  void validate() const;
  /// round(budget_fraction * M); throws ConfigError unless 1 <= T < M.
  std::size_t budget(std::size_t num_samples) const;
};

struct LoadReport {
  Dataset dataset;
  std::size_t dropped_rows = 0;
  /// "line N: reason" for each dropped row (first few only).
  std::vector<std::string> diagnostics;
};

/// Selects the label column by header name or by 0-based index.
using LabelColumn = std::variant<std::string, std::size_t>;
inline constexpr std::size_t kLastColumn = static_cast<std::size_t>(-1);

/// Comma-separated numeric data with an optional header row. Rows with a
/// wrong field count or an unparseable value are dropped and counted.
LoadReport load_csv(const std::filesystem::path& path, const LabelColumn& label_column);

/// Writes features then the label as the last column, with a header, at full precision.
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Per-column affine maps applied by standardize().
struct StandardizeTransform {
  Vector feature_mean;
  Vector feature_scale;  // population sd, or 0 for a constant column
  double label_min = 0.0;
  double label_range = 0.0;  // 0 if all labels are equal

  double label_to_original(double scaled) const noexcept { return label_min + label_range * scaled; }
  nlohmann::json to_json() const;
  static StandardizeTransform from_json(const nlohmann::json& j);
};

struct Standardized {
  Dataset dataset;
  StandardizeTransform transform;
};

/// Z-scores each feature column (constant columns become 0) and min-max
/// scales the labels to [0, 1].
Standardized standardize(const Dataset& dataset);

enum class SyntheticKind { SingleKernel, Sinc, Step };

SyntheticKind parse_synthetic_kind(std::string_view name);

/// Features uniform on [-1, 1]^d; labels theta' z(x) + N(0, noise_sd^2).
Dataset planted(const FeatureMap& map, const Vector& theta, std::size_t num_samples,
                double noise_sd, std::uint64_t seed);

/// Features uniform on [-1, 1]^d with labels from a named ground truth plus
/// Gaussian noise:
///   single-kernel  planted random-feature model (variance-1 kernel, D = 25)
///   sinc           sin(pi r) / (pi r) with r = |x|
///   step           1 if x_0 > 0 else 0
Dataset synthetic(SyntheticKind kind, std::size_t num_samples, std::size_t dim, double noise_sd,
                  std::uint64_t seed);

/// Sorted uniform subsample of `count` rows without replacement.
Dataset subsample(const Dataset& dataset, std::size_t count, std::uint64_t seed);

/// The whole index set is the initial pool; there is no separate held-out
/// split. Throws ConfigError unless budget < M.
PoolState holdout_indices(std::size_t num_samples, std::size_t budget);

/// Samples never labeled: the ones the test error is measured on.
std::vector<std::size_t> evaluation_indices(const PoolState& pool);

}  // namespace mkal
