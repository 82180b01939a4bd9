#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "mkal/bench.hpp"
#include "mkal/errors.hpp"

using namespace mkal;

namespace {

BenchConfig small_bench() {
  BenchConfig c;
  c.base.num_kernels = 3;
  c.base.rf_dim = 6;
  c.base.trials = 3;
  c.base.seed = 21;
  return c;
}

Dataset small_sinc() { return synthetic(SyntheticKind::Sinc, 60, 2, 0.05, 4); }

}  // namespace

TEST(Bench, GridHasOneCellPerCriterionAndBudget) {
  const auto report = run_experiment(small_bench(), small_sinc());
  EXPECT_EQ(report.trials.size(), 5u * 2u * 3u);
  const auto cells = report.cells();
  ASSERT_EQ(cells.size(), 10u);
  std::set<std::pair<int, double>> seen;
  for (const auto& c : cells) {
    EXPECT_EQ(c.trials, 3u);
    seen.insert({static_cast<int>(c.criterion), c.budget_fraction});
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(cells.front().criterion, CriterionKind::Random);
  EXPECT_EQ(cells.back().criterion, CriterionKind::Ekd);
  EXPECT_EQ(report.trials.front().budget, 12u);
  EXPECT_EQ(report.trials.back().budget, 15u);
}

TEST(Bench, TrialsArePairedAcrossCriteria) {
  const auto report = run_experiment(small_bench(), small_sinc());
  for (const auto& t : report.trials) EXPECT_EQ(t.seed, trial_seed(21, t.trial));
  EXPECT_NE(trial_seed(21, 0), trial_seed(21, 1));
  EXPECT_NE(trial_seed(21, 0), trial_seed(22, 0));
}

TEST(Bench, RepeatedTrialsAreIdentical) {
  const auto ds = small_sinc();
  ExperimentConfig cfg = small_bench().base;
  for (auto kind : kAllCriteria) {
    cfg.criterion = kind;
    const auto a = run_trial(ds, cfg, 0);
    const auto b = run_trial(ds, cfg, 0);
    EXPECT_EQ(a.mse, b.mse);
    EXPECT_EQ(a.digest, b.digest);
    EXPECT_EQ(a.queried, b.queried);
  }
}

TEST(Bench, MseIsMeanSquaredErrorOverEvaluatedSamples) {
  const auto ds = small_sinc();
  ExperimentConfig cfg = small_bench().base;
  for (auto mode : {InferenceMode::Online, InferenceMode::Supervised}) {
    cfg.inference = mode;
    const auto t = run_trial(ds, cfg, 0);
    ASSERT_EQ(t.evaluated.size(), ds.size() - t.budget);
    ASSERT_EQ(t.predictions.size(), t.evaluated.size());
    double sse = 0.0;
    for (std::size_t k = 0; k < t.evaluated.size(); ++k) {
      EXPECT_EQ(t.targets[k], ds.labels(static_cast<Eigen::Index>(t.evaluated[k])));
      sse += (t.predictions[k] - t.targets[k]) * (t.predictions[k] - t.targets[k]);
    }
    EXPECT_NEAR(t.mse, sse / static_cast<double>(t.evaluated.size()), 1e-12);
    std::set<std::size_t> all(t.queried.begin(), t.queried.end());
    all.insert(t.evaluated.begin(), t.evaluated.end());
    EXPECT_EQ(all.size(), ds.size());
  }
}

TEST(Bench, SupervisedRecoversNoiselessPlantedModel) {
  ExperimentConfig cfg;
  cfg.criterion = CriterionKind::Random;
  cfg.num_kernels = 3;
  cfg.rf_dim = 5;
  cfg.budget_fraction = 0.2;
  cfg.ridge = 0.0;
  cfg.eta_g = 10.0;
  cfg.inference = InferenceMode::Supervised;
  cfg.seed = 77;
  const auto maps = build_dictionary(cfg.num_kernels, 2, cfg.rf_dim, cfg.seed);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const Vector theta = Vector::NullaryExpr(10, [&] { return g(rng); });
  const auto ds = planted(maps[1], theta, 300, 0.0, 2);
  EXPECT_LE(run_trial(ds, cfg, 0).mse, 1e-6);
}

TEST(Bench, ParallelMatchesSerial) {
  auto cfg = small_bench();
  const auto serial = run_experiment(cfg, small_sinc());
  cfg.parallel = 3;
  const auto parallel = run_experiment(cfg, small_sinc());
  EXPECT_EQ(emit_report(serial, ReportFormat::Csv), emit_report(parallel, ReportFormat::Csv));
}

TEST(Report, CsvIsDeterministic) {
  const auto a = emit_report(run_experiment(small_bench(), small_sinc()), ReportFormat::Csv);
  const auto b = emit_report(run_experiment(small_bench(), small_sinc()), ReportFormat::Csv);
  EXPECT_EQ(a, b);
  std::istringstream lines(a);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "dataset,criterion,budget_fraction,budget,trial,seed,mse,digest");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 30u);
}

TEST(Report, JsonRoundTripRendersIdentically) {
  const auto report = run_experiment(small_bench(), small_sinc());
  const auto json = emit_report(report, ReportFormat::Json);
  const auto parsed = report_from_json(nlohmann::json::parse(json));
  EXPECT_EQ(emit_report(parsed, ReportFormat::Json), json);
  EXPECT_EQ(emit_report(parsed, ReportFormat::Markdown), emit_report(report, ReportFormat::Markdown));
  ASSERT_TRUE(parsed.transform.has_value());
  EXPECT_THROW(report_from_json(nlohmann::json::parse("{\"dataset\":{}}")), FormatError);
}

TEST(Report, MarkdownRowsInFixedOrder) {
  auto cfg = small_bench();
  cfg.criteria = {CriterionKind::Ekd, CriterionKind::Random, CriterionKind::Qbc};
  const auto md = emit_report(run_experiment(cfg, small_sinc()), ReportFormat::Markdown);
  const auto random = md.find("| Random |"), qbc = md.find("| QBC |"), ekd = md.find("| EKD |");
  ASSERT_NE(random, std::string::npos);
  ASSERT_NE(qbc, std::string::npos);
  ASSERT_NE(ekd, std::string::npos);
  EXPECT_LT(random, qbc);
  EXPECT_LT(qbc, ekd);
  EXPECT_EQ(md.find("| EMC |"), std::string::npos);
  EXPECT_NE(md.find("| 20% | 25% |"), std::string::npos);
}

TEST(Report, RejectsEmptyReportsAndUnknownFormats) {
  RunReport empty;
  EXPECT_THROW(emit_report(empty, ReportFormat::Csv), ParameterError);
  EXPECT_THROW(parse_report_format("xml"), ParameterError);
  EXPECT_EQ(parse_report_format("md"), ReportFormat::Markdown);
}

TEST(Config, JsonRoundTripAndValidation) {
  auto cfg = small_bench();
  cfg.base.inference = InferenceMode::Supervised;
  cfg.budget_fractions = {0.1};
  const auto back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(back.criteria, cfg.criteria);
  EXPECT_EQ(back.budget_fractions, cfg.budget_fractions);
  EXPECT_EQ(back.base.inference, InferenceMode::Supervised);
  EXPECT_EQ(back.base.seed, 21u);
  const auto single = config_from_json(nlohmann::json::parse(R"({"criterion":"qbc","budget_fraction":0.3})"));
  EXPECT_EQ(single.criteria, std::vector<CriterionKind>{CriterionKind::Qbc});
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"trials":"many"})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::array()), ConfigError);
  cfg.budget_fractions = {1.5};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_bench();
  cfg.criteria.clear();
  EXPECT_THROW(run_experiment(cfg, small_sinc()), ConfigError);
}

TEST(Digest, DependsOnOrder) {
  const std::vector<std::size_t> a{1, 2, 3}, b{3, 2, 1};
  EXPECT_EQ(sequence_digest(a).size(), 16u);
  EXPECT_NE(sequence_digest(a), sequence_digest(b));
  EXPECT_EQ(sequence_digest(a), sequence_digest(std::vector<std::size_t>{1, 2, 3}));
}
