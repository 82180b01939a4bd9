#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mkal/criteria.hpp"
#include "mkal/data.hpp"
#include "mkal/ensemble.hpp"
#include "mkal/pool.hpp"

namespace mkal {

/// Source of labels for queried samples.
class LabelOracle {
 public:
  virtual ~LabelOracle() = default;
  virtual double query(std::size_t index) const = 0;
};

/// Answers queries from labels already held in memory.
class VectorOracle final : public LabelOracle {
 public:
  explicit VectorOracle(Vector labels);
  double query(std::size_t index) const override;
  std::size_t size() const noexcept { return static_cast<std::size_t>(labels_.size()); }

 private:
  Vector labels_;
};

/// One iteration of the loop, as recorded for debugging and replay.
struct TraceEntry {
  std::size_t time = 0;   // 1-based
  std::size_t index = 0;  // sample queried
  double score = 0.0;     // criterion value of the chosen sample (NaN for random)
  double label = 0.0;
  std::vector<double> kernel_losses;  // prequential, before the local step
  std::vector<double> weights;        // after the global step

  friend bool operator==(const TraceEntry& a, const TraceEntry& b);
};

struct RunResult {
  Ensemble ensemble;
  PoolState pool;
  std::vector<TraceEntry> trace;
};

/// Learns from one labeled sample: records each kernel's loss on it, takes
/// one SGD step per kernel, then folds the losses into the weights.
/// Returns the recorded losses. `kernel_features`, when non-empty, holds the
/// precomputed z_i(x) per kernel.
std::vector<double> learn_sample(Ensemble& ensemble, const VectorRef& x, double y, double eta_l,
                                 std::span<const Vector> kernel_features = {});

/// Selects a query with `kind`, labels it through `oracle`, learns from it and
/// moves it to the labeled set.
TraceEntry step(Ensemble& ensemble, PoolState& pool, const Matrix& samples,
                const LabelOracle& oracle, CriterionKind kind, double eta_l, Rng& rng,
                const PoolFeatureCache* cache = nullptr);

/// Same as step() with the query fixed in advance.
TraceEntry forced_step(Ensemble& ensemble, PoolState& pool, const Matrix& samples,
                       const LabelOracle& oracle, std::size_t index, double eta_l,
                       const PoolFeatureCache* cache = nullptr);

/// Seed of the selection random stream for a run seed and criterion.
std::uint64_t selection_seed(std::uint64_t run_seed, CriterionKind kind);

/// Full loop over `budget` queries starting from theta = 0 and uniform
/// weights. The pool partition and weight PMF are checked after every step
/// and a violation throws StateError. Throws ConfigError if budget >= M.
RunResult run(const Dataset& dataset, const ExperimentConfig& config,
              const std::vector<FeatureMap>& maps, std::size_t budget);

/// Builds the kernel dictionary from config.seed and runs for config.budget(M) queries.
RunResult run(const Dataset& dataset, const ExperimentConfig& config);

/// Re-learns from a recorded query sequence.
RunResult replay(const Dataset& dataset, const ExperimentConfig& config,
                 const std::vector<FeatureMap>& maps, std::span<const std::size_t> queries);

}  // namespace mkal
