#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mkal/active_loop.hpp"
#include "mkal/data.hpp"

namespace mkal {

/// A grid of (criterion, budget fraction) cells, each run for `base.trials`
/// trials. base.criterion and base.budget_fraction are overridden per cell.
struct BenchConfig {
  ExperimentConfig base;
  std::vector<CriterionKind> criteria{std::begin(kAllCriteria), std::end(kAllCriteria)};
  std::vector<double> budget_fractions{0.2, 0.25};
  std::size_t parallel = 1;

  void validate() const;
};

struct TrialResult {
  CriterionKind criterion = CriterionKind::Random;
  double budget_fraction = 0.0;
  std::size_t budget = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double mse = 0.0;
  double wall_seconds = 0.0;
  std::string digest;  // FNV-1a of the queried index sequence

  // In-memory only; not part of the rendered report.
  std::vector<std::size_t> queried;
  std::vector<std::size_t> evaluated;
  std::vector<double> predictions;
  std::vector<double> targets;
};

struct CellSummary {
  CriterionKind criterion;
  double budget_fraction;
  std::size_t trials;
  double mean_mse;
  double sd_mse;  // sample standard deviation, 0 for a single trial
  double mean_wall_seconds;
};

struct RunReport {
  std::string dataset_name;
  std::size_t num_samples = 0;
  std::size_t dim = 0;
  BenchConfig config;
  std::optional<StandardizeTransform> transform;
  std::vector<TrialResult> trials;  // sorted by (criterion, budget, trial)

  /// One summary per configured cell, in criteria-then-budget order.
  std::vector<CellSummary> cells() const;
};

/// Seed of trial k: shared by every criterion and budget so that they all see
/// the same feature-map draws.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial);

std::string sequence_digest(std::span<const std::size_t> indices);

/// One AL run plus evaluation on the never-labeled samples. `config.seed` is
/// used as the run seed as is.
TrialResult run_trial(const Dataset& dataset, const ExperimentConfig& config, std::size_t trial);

/// Standardizes the dataset if configured, then runs every (criterion,
/// budget, trial) job. Errors are rethrown with the failing cell attached.
RunReport run_experiment(const BenchConfig& config, const Dataset& dataset);

enum class ReportFormat { Csv, Json, Markdown };
ReportFormat parse_report_format(std::string_view name);

/// Deterministic rendering. CSV and JSON carry per-trial values (CSV omits
/// wall time so that it is reproducible byte for byte); markdown is the
/// criteria x budgets table of mean test MSE.
std::string emit_report(const RunReport& report, ReportFormat format);

nlohmann::json config_to_json(const BenchConfig& config);
BenchConfig config_from_json(const nlohmann::json& j);
RunReport report_from_json(const nlohmann::json& j);

}  // namespace mkal
