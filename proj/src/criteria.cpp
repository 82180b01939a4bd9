#include "mkal/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "mkal/errors.hpp"

namespace mkal {

namespace {

constexpr double kPmfTolerance = 1e-9;

void check_pmf(std::span<const double> predictions, std::span<const double> weights) {
  if (predictions.empty()) throw ParameterError("criterion needs at least one prediction");
  if (predictions.size() != weights.size())
    throw ParameterError("predictions and weights differ in length: " +
                         std::to_string(predictions.size()) + " vs " + std::to_string(weights.size()));
  double total = 0.0;
  for (double p : weights) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError("weights must be a PMF");
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance)
    throw ParameterError("weights sum to " + std::to_string(total) + ", not 1");
}

}  // namespace

std::string_view to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Random: return "random";
    case CriterionKind::Qbc: return "qbc";
    case CriterionKind::Emc: return "emc";
    case CriterionKind::Ekl: return "ekl";
    case CriterionKind::Ekd: return "ekd";
  }
  return "unknown";
}

std::string_view display_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Random: return "Random";
    case CriterionKind::Qbc: return "QBC";
    case CriterionKind::Emc: return "EMC";
    case CriterionKind::Ekl: return "EKL";
    case CriterionKind::Ekd: return "EKD";
  }
  return "unknown";
}

CriterionKind parse_criterion(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto kind : kAllCriteria)
    if (lower == to_string(kind)) return kind;
  throw ParameterError("unknown criterion '" + std::string(name) +
                       "' (expected ekd, ekl, qbc, emc or random)");
}

double score_ekd(std::span<const double> predictions, std::span<const double> weights) {
  check_pmf(predictions, weights);
  double outer = 0.0;
  for (std::size_t j = 0; j < predictions.size(); ++j) {
    double inner = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
      inner += weights[i] * SquaredLoss::value(predictions[i], predictions[j]);
    outer += weights[j] * inner;
  }
  return outer;
}

double score_ekl(std::span<const double> predictions, std::span<const double> weights) {
  check_pmf(predictions, weights);
  double combined = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) combined += weights[i] * predictions[i];
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    s += weights[i] * SquaredLoss::value(combined, predictions[i]);
  return s;
}

double score_qbc(std::span<const double> predictions) {
  if (predictions.empty()) throw ParameterError("QBC needs at least one committee member");
  const double n = static_cast<double>(predictions.size());
  double mean = 0.0;
  for (double f : predictions) mean += f;
  mean /= n;
  double s = 0.0;
  for (double f : predictions) s += (f - mean) * (f - mean);
  return s / n;
}

double score_emc(std::span<const double> predictions, double combined) {
  if (predictions.empty()) throw ParameterError("EMC needs at least one model");
  double s = 0.0;
  for (double f : predictions) s += (f - combined) * (f - combined);
  return s / static_cast<double>(predictions.size());
}

double score(CriterionKind kind, std::span<const double> predictions,
             std::span<const double> weights) {
  switch (kind) {
    case CriterionKind::Ekd: return score_ekd(predictions, weights);
    case CriterionKind::Ekl: return score_ekl(predictions, weights);
    case CriterionKind::Qbc: return score_qbc(predictions);
    case CriterionKind::Emc: {
      check_pmf(predictions, weights);
      double combined = 0.0;
      for (std::size_t i = 0; i < predictions.size(); ++i) combined += weights[i] * predictions[i];
      return score_emc(predictions, combined);
    }
    case CriterionKind::Random: break;
  }
  throw ParameterError("the random criterion has no score");
}

PoolFeatureCache::PoolFeatureCache(const Ensemble& ensemble, const Matrix& samples) {
  maps_.reserve(ensemble.size());
  features_.reserve(ensemble.size());
  for (const auto& model : ensemble.models()) {
    const auto& map = model.map();
    Eigen::MatrixXd z(static_cast<Eigen::Index>(map.output_dim()), samples.rows());
    for (Eigen::Index m = 0; m < samples.rows(); ++m) z.col(m) = map.features(samples.row(m).transpose());
    maps_.push_back(model.shared_map());
    features_.push_back(std::move(z));
  }
}

bool PoolFeatureCache::matches(const Ensemble& ensemble) const {
  if (ensemble.size() != maps_.size()) return false;
  for (std::size_t i = 0; i < maps_.size(); ++i)
    if (ensemble.models()[i].shared_map() != maps_[i]) return false;
  return true;
}

Vector kernel_predictions_at(const Ensemble& ensemble, const Matrix& samples, std::size_t index,
                             const PoolFeatureCache* cache) {
  if (index >= static_cast<std::size_t>(samples.rows()))
    throw ParameterError("sample index " + std::to_string(index) + " out of range");
  if (cache == nullptr) return ensemble.kernel_predictions(samples.row(static_cast<Eigen::Index>(index)).transpose());
  Vector out(static_cast<Eigen::Index>(ensemble.size()));
  for (std::size_t i = 0; i < ensemble.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = ensemble.models()[i].predict_features(
        cache->kernel(i).col(static_cast<Eigen::Index>(index)));
  return out;
}

ScoredCandidate select(const Ensemble& ensemble, const PoolState& pool, const Matrix& samples,
                       CriterionKind kind, Rng& rng, const PoolFeatureCache* cache) {
  const auto& candidates = pool.unlabeled();
  if (candidates.empty()) throw StateError("cannot select from an empty pool");
  if (pool.num_samples() != static_cast<std::size_t>(samples.rows()))
    throw ParameterError("pool and sample matrix disagree on the number of samples");
  if (cache != nullptr && !cache->matches(ensemble))
    throw ParameterError("feature cache was built for a different ensemble");

  if (kind == CriterionKind::Random) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return {candidates[pick(rng)], std::numeric_limits<double>::quiet_NaN()};
  }

  const Vector& w = ensemble.weights();
  const std::span<const double> weights(w.data(), static_cast<std::size_t>(w.size()));
  ScoredCandidate best{candidates.front(), -std::numeric_limits<double>::infinity()};
  // Candidates are in ascending index order, so strict > keeps the smallest index on ties.
  for (std::size_t index : candidates) {
    const Vector f = kernel_predictions_at(ensemble, samples, index, cache);
    const double s = score(kind, {f.data(), static_cast<std::size_t>(f.size())}, weights);
    if (s > best.score) best = {index, s};
  }
  return best;
}

}  // namespace mkal
