#include "mkal/active_loop.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <string>

#include "mkal/errors.hpp"
#include "mkal/seed.hpp"

namespace mkal {

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!same_bits(a[k], b[k])) return false;
  return true;
}

constexpr double kPmfTolerance = 1e-12;

void check_step_invariants(const Ensemble& ensemble, const PoolState& pool, std::size_t t) {
  if (pool.labeled().size() != t)
    throw StateError("after step " + std::to_string(t) + " the labeled set has " +
                     std::to_string(pool.labeled().size()) + " entries");
  pool.check_invariants();
  const Vector& w = ensemble.weights();
  if ((w.array() < 0.0).any() || std::abs(w.sum() - 1.0) > kPmfTolerance)
    throw StateError("kernel weights left the probability simplex at step " + std::to_string(t));
}

TraceEntry learn_and_record(Ensemble& ensemble, PoolState& pool, const Matrix& samples,
                            const LabelOracle& oracle, std::size_t index, double score,
                            double eta_l, const PoolFeatureCache* cache) {
  if (!pool.is_unlabeled(index))
    throw StateError("sample " + std::to_string(index) + " was already queried");
  const double y = oracle.query(index);
  const auto row = static_cast<Eigen::Index>(index);

  std::vector<double> losses;
  if (cache != nullptr) {
    std::vector<Vector> z;
    z.reserve(ensemble.size());
    for (std::size_t i = 0; i < ensemble.size(); ++i) z.emplace_back(cache->kernel(i).col(row));
    losses = learn_sample(ensemble, samples.row(row).transpose(), y, eta_l, z);
  } else {
    losses = learn_sample(ensemble, samples.row(row).transpose(), y, eta_l);
  }
  pool.mark_labeled(index);

  TraceEntry entry;
  entry.time = pool.labeled().size();
  entry.index = index;
  entry.score = score;
  entry.label = y;
  entry.kernel_losses = std::move(losses);
  entry.weights.assign(ensemble.weights().begin(), ensemble.weights().end());
  return entry;
}

}  // namespace

bool operator==(const TraceEntry& a, const TraceEntry& b) {
  return a.time == b.time && a.index == b.index && same_bits(a.score, b.score) &&
         same_bits(a.label, b.label) && same_bits(a.kernel_losses, b.kernel_losses) &&
         same_bits(a.weights, b.weights);
}

VectorOracle::VectorOracle(Vector labels) : labels_(std::move(labels)) {
  if (!labels_.allFinite()) throw DataError("oracle labels must be finite");
}

double VectorOracle::query(std::size_t index) const {
  if (index >= size()) throw ParameterError("no label for sample " + std::to_string(index));
  return labels_(static_cast<Eigen::Index>(index));
}

std::vector<double> learn_sample(Ensemble& ensemble, const VectorRef& x, double y, double eta_l,
                                 std::span<const Vector> kernel_features) {
  if (!std::isfinite(y)) throw DataError("label must be finite");
  if (!kernel_features.empty() && kernel_features.size() != ensemble.size())
    throw ParameterError("need one feature vector per kernel");

  auto& models = ensemble.models();
  std::vector<Vector> computed;
  if (kernel_features.empty()) {
    if (!x.allFinite()) throw DataError("sample has non-finite features");
    computed.reserve(models.size());
    for (const auto& m : models) computed.push_back(m.map().features(x));
    kernel_features = computed;
  }

  // Losses are measured before any kernel is updated with this sample.
  std::vector<double> losses(models.size());
  for (std::size_t i = 0; i < models.size(); ++i)
    losses[i] = loss(models[i].predict_features(kernel_features[i]), y);
  for (std::size_t i = 0; i < models.size(); ++i)
    models[i].sgd_step_features(kernel_features[i], y, eta_l);
  ensemble.update_weights(losses);
  return losses;
}

TraceEntry step(Ensemble& ensemble, PoolState& pool, const Matrix& samples,
                const LabelOracle& oracle, CriterionKind kind, double eta_l, Rng& rng,
                const PoolFeatureCache* cache) {
  const ScoredCandidate chosen = select(ensemble, pool, samples, kind, rng, cache);
  return learn_and_record(ensemble, pool, samples, oracle, chosen.pool_index, chosen.score, eta_l, cache);
}

TraceEntry forced_step(Ensemble& ensemble, PoolState& pool, const Matrix& samples,
                       const LabelOracle& oracle, std::size_t index, double eta_l,
                       const PoolFeatureCache* cache) {
  if (pool.empty()) throw StateError("cannot step on an empty pool");
  return learn_and_record(ensemble, pool, samples, oracle, index,
                          std::numeric_limits<double>::quiet_NaN(), eta_l, cache);
}

std::uint64_t selection_seed(std::uint64_t run_seed, CriterionKind kind) {
  return derive_seed(run_seed, {0x73656c656374ULL, static_cast<std::uint64_t>(kind)});
}

RunResult run(const Dataset& dataset, const ExperimentConfig& config,
              const std::vector<FeatureMap>& maps, std::size_t budget) {
  dataset.validate();
  if (maps.empty()) throw ParameterError("run needs at least one feature map");
  for (const auto& m : maps)
    if (m.input_dim() != dataset.dim())
      throw ParameterError("feature map input dimension does not match the dataset");
  PoolState pool = holdout_indices(dataset.size(), budget);

  RunResult result{Ensemble::from_maps(maps, config.eta_g), std::move(pool), {}};
  const VectorOracle oracle(dataset.labels);
  Rng rng(selection_seed(config.seed, config.criterion));
  std::optional<PoolFeatureCache> cache;
  if (config.cache_features && budget > 0) cache.emplace(result.ensemble, dataset.features);

  result.trace.reserve(budget);
  for (std::size_t t = 1; t <= budget; ++t) {
    result.trace.push_back(step(result.ensemble, result.pool, dataset.features, oracle,
                                config.criterion, config.eta_l, rng, cache ? &*cache : nullptr));
    check_step_invariants(result.ensemble, result.pool, t);
  }
  return result;
}

RunResult run(const Dataset& dataset, const ExperimentConfig& config) {
  config.validate();
  dataset.validate();
  const std::size_t budget = config.budget(dataset.size());
  const auto maps = build_dictionary(config.num_kernels, dataset.dim(), config.rf_dim, config.seed);
  return run(dataset, config, maps, budget);
}

RunResult replay(const Dataset& dataset, const ExperimentConfig& config,
                 const std::vector<FeatureMap>& maps, std::span<const std::size_t> queries) {
  dataset.validate();
  PoolState pool = holdout_indices(dataset.size(), queries.size());
  RunResult result{Ensemble::from_maps(maps, config.eta_g), std::move(pool), {}};
  const VectorOracle oracle(dataset.labels);
  for (std::size_t t = 0; t < queries.size(); ++t) {
    result.trace.push_back(forced_step(result.ensemble, result.pool, dataset.features, oracle,
                                       queries[t], config.eta_l));
    check_step_invariants(result.ensemble, result.pool, t + 1);
  }
  return result;
}

}  // namespace mkal
