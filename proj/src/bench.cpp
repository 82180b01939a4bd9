#include "mkal/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "mkal/batch_solver.hpp"
#include "mkal/errors.hpp"
#include "mkal/seed.hpp"

namespace mkal {

namespace {

std::size_t criterion_rank(CriterionKind kind) {
  for (std::size_t k = 0; k < std::size(kAllCriteria); ++k)
    if (kAllCriteria[k] == kind) return k;
  return std::size(kAllCriteria);
}

bool trial_order(const TrialResult& a, const TrialResult& b) {
  const auto ra = criterion_rank(a.criterion), rb = criterion_rank(b.criterion);
  if (ra != rb) return ra < rb;
  if (a.budget_fraction != b.budget_fraction) return a.budget_fraction < b.budget_fraction;
  return a.trial < b.trial;
}

std::string format_double(double v, int precision) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string percent_label(double fraction) { return format_double(fraction * 100.0, 6) + "%"; }

}  // namespace

void BenchConfig::validate() const {
  ExperimentConfig probe = base;
  probe.validate();
  if (criteria.empty()) throw ConfigError("at least one criterion is required");
  if (budget_fractions.empty()) throw ConfigError("at least one budget fraction is required");
  for (double f : budget_fractions) {
    probe.budget_fraction = f;
    probe.validate();
  }
  if (parallel == 0) throw ConfigError("parallelism must be at least 1");
}

std::vector<CellSummary> RunReport::cells() const {
  std::vector<CellSummary> out;
  for (auto kind : kAllCriteria) {
    if (std::find(config.criteria.begin(), config.criteria.end(), kind) == config.criteria.end()) continue;
    auto budgets = config.budget_fractions;
    std::sort(budgets.begin(), budgets.end());
    budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
    for (double f : budgets) {
      CellSummary cell{kind, f, 0, 0.0, 0.0, 0.0};
      std::vector<double> mses;
      for (const auto& t : trials) {
        if (t.criterion != kind || t.budget_fraction != f) continue;
        mses.push_back(t.mse);
        cell.mean_wall_seconds += t.wall_seconds;
      }
      cell.trials = mses.size();
      if (!mses.empty()) {
        const double n = static_cast<double>(mses.size());
        for (double m : mses) cell.mean_mse += m;
        cell.mean_mse /= n;
        cell.mean_wall_seconds /= n;
        if (mses.size() > 1) {
          double ss = 0.0;
          for (double m : mses) ss += (m - cell.mean_mse) * (m - cell.mean_mse);
          cell.sd_mse = std::sqrt(ss / (n - 1.0));
        }
      }
      out.push_back(cell);
    }
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial) {
  return derive_seed(master_seed, {0x747269616cULL, trial});
}

std::string sequence_digest(std::span<const std::size_t> indices) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t index : indices) {
    auto v = static_cast<std::uint64_t>(index);
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TrialResult run_trial(const Dataset& dataset, const ExperimentConfig& config, std::size_t trial) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const std::size_t budget = config.budget(dataset.size());
  const auto maps = build_dictionary(config.num_kernels, dataset.dim(), config.rf_dim, config.seed);
  const RunResult run_result = run(dataset, config, maps, budget);

  TrialResult out;
  out.criterion = config.criterion;
  out.budget_fraction = config.budget_fraction;
  out.budget = budget;
  out.trial = trial;
  out.seed = config.seed;
  for (const auto& e : run_result.pool.labeled()) out.queried.push_back(e.index);
  out.digest = sequence_digest(out.queried);
  out.evaluated = evaluation_indices(run_result.pool);

  std::optional<BatchFit> batch;
  if (config.inference == InferenceMode::Supervised) {
    Matrix xs(static_cast<Eigen::Index>(out.queried.size()), dataset.features.cols());
    Vector ys(static_cast<Eigen::Index>(out.queried.size()));
    for (std::size_t k = 0; k < out.queried.size(); ++k) {
      xs.row(static_cast<Eigen::Index>(k)) = dataset.features.row(static_cast<Eigen::Index>(out.queried[k]));
      ys(static_cast<Eigen::Index>(k)) = dataset.labels(static_cast<Eigen::Index>(out.queried[k]));
    }
    batch = fit(maps, xs, ys, config.ridge, config.eta_g);
  }

  double sse = 0.0;
  for (std::size_t index : out.evaluated) {
    const auto row = dataset.features.row(static_cast<Eigen::Index>(index)).transpose();
    const double yhat = batch ? batch_predict(*batch, maps, row) : online_predict(run_result.ensemble, row);
    const double y = dataset.labels(static_cast<Eigen::Index>(index));
    out.predictions.push_back(yhat);
    out.targets.push_back(y);
    sse += loss(yhat, y);
  }
  out.mse = sse / static_cast<double>(out.evaluated.size());
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunReport run_experiment(const BenchConfig& config, const Dataset& dataset) {
  config.validate();
  dataset.validate();

  RunReport report;
  report.dataset_name = dataset.name;
  report.num_samples = dataset.size();
  report.dim = dataset.dim();
  report.config = config;

  Dataset prepared = dataset;
  if (config.base.standardize) {
    auto s = standardize(dataset);
    prepared = std::move(s.dataset);
    report.transform = s.transform;
  }

  struct Job {
    CriterionKind criterion;
    double fraction;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (auto kind : config.criteria)
    for (double f : config.budget_fractions)
      for (std::size_t k = 0; k < config.base.trials; ++k) jobs.push_back({kind, f, k});
  // Budgets up front so that a bad fraction fails before any work is done.
  for (double f : config.budget_fractions) {
    ExperimentConfig probe = config.base;
    probe.budget_fraction = f;
    probe.budget(prepared.size());
  }

  std::vector<TrialResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      try {
        ExperimentConfig cfg = config.base;
        cfg.criterion = job.criterion;
        cfg.budget_fraction = job.fraction;
        cfg.seed = trial_seed(config.base.seed, job.trial);
        results[j] = run_trial(prepared, cfg, job.trial);
      } catch (const Error& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::make_exception_ptr(Error(e.kind(), "criterion " + std::string(to_string(job.criterion)) +
                                                                ", budget " + format_double(job.fraction, 6) +
                                                                ", trial " + std::to_string(job.trial) + ": " +
                                                                e.what()));
        next = jobs.size();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  const std::size_t threads = std::min(config.parallel, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(results.begin(), results.end(), trial_order);
  report.trials = std::move(results);
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  throw ParameterError("unknown report format '" + std::string(name) + "' (expected csv, json or markdown)");
}

nlohmann::json config_to_json(const BenchConfig& config) {
  nlohmann::json criteria = nlohmann::json::array();
  for (auto kind : config.criteria) criteria.push_back(std::string(to_string(kind)));
  const auto& b = config.base;
  return {{"criterion", criteria},
          {"budget_fraction", config.budget_fractions},
          {"trials", b.trials},
          {"num_kernels", b.num_kernels},
          {"rf_dim", b.rf_dim},
          {"eta_l", b.eta_l},
          {"eta_g", b.eta_g},
          {"ridge", b.ridge},
          {"inference", std::string(to_string(b.inference))},
          {"seed", b.seed},
          {"standardize", b.standardize},
          {"cache_features", b.cache_features},
          {"parallel", config.parallel}};
}

BenchConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  BenchConfig c;
  auto& b = c.base;
  try {
    if (j.contains("criterion")) {
      c.criteria.clear();
      const auto& v = j.at("criterion");
      if (v.is_array()) {
        for (const auto& s : v) c.criteria.push_back(parse_criterion(s.get<std::string>()));
      } else {
        c.criteria.push_back(parse_criterion(v.get<std::string>()));
      }
    }
    if (j.contains("budget_fraction")) {
      const auto& v = j.at("budget_fraction");
      c.budget_fractions = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
    }
    if (j.contains("trials")) b.trials = j.at("trials").get<std::size_t>();
    if (j.contains("num_kernels")) b.num_kernels = j.at("num_kernels").get<std::size_t>();
    if (j.contains("rf_dim")) b.rf_dim = j.at("rf_dim").get<std::size_t>();
    if (j.contains("eta_l")) b.eta_l = j.at("eta_l").get<double>();
    if (j.contains("eta_g")) b.eta_g = j.at("eta_g").get<double>();
    if (j.contains("ridge")) b.ridge = j.at("ridge").get<double>();
    if (j.contains("inference")) b.inference = parse_inference(j.at("inference").get<std::string>());
    if (j.contains("seed")) b.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("standardize")) b.standardize = j.at("standardize").get<bool>();
    if (j.contains("cache_features")) b.cache_features = j.at("cache_features").get<bool>();
    if (j.contains("parallel")) c.parallel = j.at("parallel").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

namespace {

nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : report.trials)
    trials.push_back({{"criterion", std::string(to_string(t.criterion))},
                      {"budget_fraction", t.budget_fraction},
                      {"budget", t.budget},
                      {"trial", t.trial},
                      {"seed", t.seed},
                      {"mse", t.mse},
                      {"wall_seconds", t.wall_seconds},
                      {"digest", t.digest}});
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells())
    cells.push_back({{"criterion", std::string(to_string(c.criterion))},
                     {"budget_fraction", c.budget_fraction},
                     {"trials", c.trials},
                     {"mean_mse", c.mean_mse},
                     {"sd_mse", c.sd_mse},
                     {"mean_wall_seconds", c.mean_wall_seconds}});
  return {{"dataset", {{"name", report.dataset_name}, {"num_samples", report.num_samples}, {"dim", report.dim}}},
          {"config", config_to_json(report.config)},
          {"transform", report.transform ? report.transform->to_json() : nlohmann::json(nullptr)},
          {"trials", trials},
          {"cells", cells}};
}

}  // namespace

RunReport report_from_json(const nlohmann::json& j) {
  RunReport r;
  try {
    const auto& ds = j.at("dataset");
    r.dataset_name = ds.at("name").get<std::string>();
    r.num_samples = ds.at("num_samples").get<std::size_t>();
    r.dim = ds.at("dim").get<std::size_t>();
    r.config = config_from_json(j.at("config"));
    if (!j.at("transform").is_null()) r.transform = StandardizeTransform::from_json(j.at("transform"));
    for (const auto& t : j.at("trials")) {
      TrialResult tr;
      tr.criterion = parse_criterion(t.at("criterion").get<std::string>());
      tr.budget_fraction = t.at("budget_fraction").get<double>();
      tr.budget = t.at("budget").get<std::size_t>();
      tr.trial = t.at("trial").get<std::size_t>();
      tr.seed = t.at("seed").get<std::uint64_t>();
      tr.mse = t.at("mse").get<double>();
      tr.wall_seconds = t.at("wall_seconds").get<double>();
      tr.digest = t.at("digest").get<std::string>();
      r.trials.push_back(std::move(tr));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string emit_report(const RunReport& report, ReportFormat format) {
  if (report.trials.empty()) throw ParameterError("report has no trials to render");
  std::ostringstream os;
  switch (format) {
    case ReportFormat::Json:
      os << report_to_json(report).dump(2) << '\n';
      break;
    case ReportFormat::Csv:
      os << "dataset,criterion,budget_fraction,budget,trial,seed,mse,digest\n";
      for (const auto& t : report.trials)
        os << report.dataset_name << ',' << to_string(t.criterion) << ',' << format_double(t.budget_fraction, 17)
           << ',' << t.budget << ',' << t.trial << ',' << t.seed << ',' << format_double(t.mse, 17) << ','
           << t.digest << '\n';
      break;
    case ReportFormat::Markdown: {
      const auto cells = report.cells();
      std::vector<double> budgets;
      for (const auto& c : cells)
        if (std::find(budgets.begin(), budgets.end(), c.budget_fraction) == budgets.end())
          budgets.push_back(c.budget_fraction);
      os << "Test MSE (x1e-2) on " << report.dataset_name << " (M = " << report.num_samples
         << ", " << to_string(report.config.base.inference) << " inference, mean +/- sd over "
         << report.config.base.trials << " trials)\n\n";
      os << "| Criterion |";
      for (double f : budgets) os << ' ' << percent_label(f) << " |";
      os << "\n|---|";
      for (std::size_t k = 0; k < budgets.size(); ++k) os << "---|";
      os << '\n';
      for (auto kind : kAllCriteria) {
        bool present = false;
        std::ostringstream row;
        row << "| " << display_name(kind) << " |";
        for (double f : budgets) {
          const auto it = std::find_if(cells.begin(), cells.end(), [&](const CellSummary& c) {
            return c.criterion == kind && c.budget_fraction == f;
          });
          if (it == cells.end() || it->trials == 0) {
            row << " - |";
            continue;
          }
          present = true;
          row << ' ' << std::fixed << std::setprecision(4) << it->mean_mse * 100.0 << " +/- "
              << it->sd_mse * 100.0 << " |";
          row.unsetf(std::ios::floatfield);
        }
        if (present) os << row.str() << '\n';
      }
      break;
    }
  }
  return os.str();
}

}  // namespace mkal
