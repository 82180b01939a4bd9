#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mkal/ensemble.hpp"
#include "mkal/pool.hpp"

namespace mkal {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

enum class CriterionKind { Random, Qbc, Emc, Ekl, Ekd };

/// Report order: Random, QBC, EMC, EKL, EKD.
inline constexpr CriterionKind kAllCriteria[] = {CriterionKind::Random, CriterionKind::Qbc,
                                                 CriterionKind::Emc, CriterionKind::Ekl,
                                                 CriterionKind::Ekd};

std::string_view to_string(CriterionKind kind);       // "random", "qbc", ...
std::string_view display_name(CriterionKind kind);    // "Random", "QBC", ...
CriterionKind parse_criterion(std::string_view name);  // case-insensitive

struct ScoredCandidate {
  std::size_t pool_index;
  double score;  // NaN for the random criterion
};

/// Expected discrepancy between kernels when the label is drawn from the
/// kernel predictions with the reliability PMF:
///   sum_j p_j sum_i p_i (f_i - f_j)^2.
double score_ekd(std::span<const double> predictions, std::span<const double> weights);

/// Expected loss of the combined prediction fbar = sum_i p_i f_i against a
/// randomly chosen kernel: sum_i p_i (fbar - f_i)^2.
double score_ekl(std::span<const double> predictions, std::span<const double> weights);

/// Population variance of the committee predictions.
double score_qbc(std::span<const double> predictions);

/// Mean squared distance of the kernel predictions from the combined prediction.
double score_emc(std::span<const double> predictions, double combined);

/// Scores one candidate from its kernel predictions and the current weights.
/// Not defined for the random criterion.
double score(CriterionKind kind, std::span<const double> predictions,
             std::span<const double> weights);

/// Per-kernel feature vectors of every sample, one 2D x M matrix per kernel.
/// Only valid for the ensemble whose maps it was built from.
class PoolFeatureCache {
 public:
  PoolFeatureCache(const Ensemble& ensemble, const Matrix& samples);

  bool matches(const Ensemble& ensemble) const;
  const Eigen::MatrixXd& kernel(std::size_t i) const { return features_[i]; }

 private:
  std::vector<std::shared_ptr<const FeatureMap>> maps_;
  std::vector<Eigen::MatrixXd> features_;
};

/// Kernel predictions for sample `index`, through the cache when one is given.
Vector kernel_predictions_at(const Ensemble& ensemble, const Matrix& samples, std::size_t index,
                             const PoolFeatureCache* cache);

/// Picks the next query from the unlabeled pool. Random draws uniformly with
/// `rng`; every other criterion returns the argmax score, ties going to the
/// smallest sample index.
ScoredCandidate select(const Ensemble& ensemble, const PoolState& pool, const Matrix& samples,
                       CriterionKind kind, Rng& rng, const PoolFeatureCache* cache = nullptr);

}  // namespace mkal
