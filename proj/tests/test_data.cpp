#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "mkal/data.hpp"
#include "mkal/errors.hpp"

using namespace mkal;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("mkal_data_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                                   ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

double population_sd(const Eigen::Ref<const Vector>& v) {
  return std::sqrt((v.array() - v.mean()).square().mean());
}

}  // namespace

TEST(LoadCsv, DropsMalformedRows) {
  TempDir dir;
  const auto p = dir.write("toy.csv", "a,b,y\n1,2,3\n4,5\n6,7,8\n");
  const auto r = load_csv(p, kLastColumn);
  EXPECT_EQ(r.dataset.size(), 2u);
  EXPECT_EQ(r.dataset.dim(), 2u);
  EXPECT_EQ(r.dropped_rows, 1u);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_NE(r.diagnostics[0].find("line 3"), std::string::npos);
  EXPECT_DOUBLE_EQ(r.dataset.features(1, 0), 6.0);
  EXPECT_DOUBLE_EQ(r.dataset.labels(1), 8.0);
  EXPECT_EQ(r.dataset.name, "toy");
}

TEST(LoadCsv, DropsUnparseableValues) {
  TempDir dir;
  const auto p = dir.write("nan.csv", "1,2,3\n4,x,6\n7,8,nan\n9,10,11\n");
  const auto r = load_csv(p, kLastColumn);
  EXPECT_EQ(r.dataset.size(), 2u);
  EXPECT_EQ(r.dropped_rows, 2u);
  EXPECT_DOUBLE_EQ(r.dataset.features(0, 0), 1.0);
}

TEST(LoadCsv, HeaderOnlyOrEmptyIsAnError) {
  TempDir dir;
  EXPECT_THROW(load_csv(dir.write("h.csv", "a,b,y\n"), kLastColumn), FormatError);
  EXPECT_THROW(load_csv(dir.write("e.csv", ""), kLastColumn), FormatError);
  EXPECT_THROW(load_csv(dir.write("one.csv", "y\n1\n"), kLastColumn), FormatError);
  EXPECT_THROW(load_csv(dir.path() / "missing.csv", kLastColumn), IoError);
}

TEST(LoadCsv, LabelColumnByNameOrIndex) {
  TempDir dir;
  const auto p = dir.write("wide.csv", "y,f1,f2,f3,f4\n10,1,2,3,4\n20,5,6,7,8\n");
  const auto by_name = load_csv(p, std::string("y"));
  EXPECT_EQ(by_name.dataset.dim(), 4u);
  EXPECT_DOUBLE_EQ(by_name.dataset.labels(1), 20.0);
  EXPECT_DOUBLE_EQ(by_name.dataset.features(1, 3), 8.0);
  const auto by_index = load_csv(p, std::size_t{0});
  EXPECT_EQ(by_index.dataset.features, by_name.dataset.features);
  EXPECT_THROW(load_csv(p, std::string("z")), FormatError);
  EXPECT_THROW(load_csv(p, std::size_t{5}), FormatError);
  const auto headerless = dir.write("nohdr.csv", "1,2\n3,4\n");
  EXPECT_THROW(load_csv(headerless, std::string("y")), FormatError);
  EXPECT_EQ(load_csv(headerless, kLastColumn).dataset.size(), 2u);
}

TEST(Standardize, SmallExamples) {
  Dataset ds;
  ds.name = "toy";
  ds.features.resize(3, 2);
  ds.features << 1.0, 5.0, 2.0, 5.0, 3.0, 5.0;
  ds.labels = Vector{{2.0, 4.0, 6.0}};
  const auto s = standardize(ds);
  const double sd = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(s.dataset.features(0, 0), -1.0 / sd, 1e-15);
  EXPECT_NEAR(s.dataset.features(2, 0), 1.0 / sd, 1e-15);
  EXPECT_TRUE(s.dataset.features.col(1).isZero(0.0));
  EXPECT_DOUBLE_EQ(s.dataset.labels(0), 0.0);
  EXPECT_DOUBLE_EQ(s.dataset.labels(1), 0.5);
  EXPECT_DOUBLE_EQ(s.dataset.labels(2), 1.0);
  EXPECT_DOUBLE_EQ(s.transform.label_to_original(0.5), 4.0);

  Dataset two;
  two.features.resize(2, 1);
  two.features << 1.0, 3.0;
  two.labels = Vector{{0.0, 1.0}};
  const auto t = standardize(two);
  EXPECT_DOUBLE_EQ(t.dataset.features(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(t.dataset.features(1, 0), 1.0);
}

TEST(Standardize, ColumnMomentsOnSyntheticData) {
  const auto ds = synthetic(SyntheticKind::Sinc, 300, 4, 0.1, 8);
  const auto s = standardize(ds);
  for (Eigen::Index k = 0; k < 4; ++k) {
    EXPECT_LE(std::abs(s.dataset.features.col(k).mean()), 1e-10);
    EXPECT_LE(std::abs(population_sd(s.dataset.features.col(k)) - 1.0), 1e-10);
  }
  EXPECT_DOUBLE_EQ(s.dataset.labels.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(s.dataset.labels.maxCoeff(), 1.0);
  const auto back = StandardizeTransform::from_json(s.transform.to_json());
  EXPECT_EQ(back.feature_mean, s.transform.feature_mean);
  EXPECT_EQ(back.feature_scale, s.transform.feature_scale);
  EXPECT_EQ(back.label_range, s.transform.label_range);
}

TEST(SaveCsv, RoundTripsAtFullPrecision) {
  TempDir dir;
  const auto s = standardize(synthetic(SyntheticKind::Step, 50, 3, 0.2, 4)).dataset;
  const auto p = dir.path() / "out.csv";
  save_csv(s, p);
  const auto r = load_csv(p, kLastColumn);
  EXPECT_EQ(r.dropped_rows, 0u);
  EXPECT_LE((r.dataset.features - s.features).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((r.dataset.labels - s.labels).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Synthetic, DeterministicPerSeed) {
  for (auto kind : {SyntheticKind::SingleKernel, SyntheticKind::Sinc, SyntheticKind::Step}) {
    const auto a = synthetic(kind, 20, 2, 0.1, 5);
    const auto b = synthetic(kind, 20, 2, 0.1, 5);
    const auto c = synthetic(kind, 20, 2, 0.1, 6);
    EXPECT_EQ(a.features, b.features);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NE(a.labels, c.labels);
    EXPECT_LE(a.features.cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_EQ(parse_synthetic_kind("single-kernel"), SyntheticKind::SingleKernel);
  EXPECT_THROW(parse_synthetic_kind("cubic"), ParameterError);
}

TEST(Synthetic, NoiselessGroundTruths) {
  const auto sinc = synthetic(SyntheticKind::Sinc, 100, 1, 0.0, 3);
  for (Eigen::Index m = 0; m < 100; ++m) {
    const double u = std::numbers::pi * std::abs(sinc.features(m, 0));
    EXPECT_NEAR(sinc.labels(m), std::sin(u) / u, 1e-15);
  }
  const auto step = synthetic(SyntheticKind::Step, 100, 2, 0.0, 3);
  for (Eigen::Index m = 0; m < 100; ++m)
    EXPECT_EQ(step.labels(m), step.features(m, 0) > 0.0 ? 1.0 : 0.0);
}

TEST(Planted, NoiselessLabelsAreExact) {
  const FeatureMap map(KernelSpec(0.5), 6, 2, 9);
  Vector theta = Vector::LinSpaced(12, -1.0, 1.0);
  const auto ds = planted(map, theta, 40, 0.0, 1);
  for (Eigen::Index m = 0; m < 40; ++m) {
    const double x0 = ds.features(m, 0), x1 = ds.features(m, 1);
    double y = 0.0;
    for (Eigen::Index l = 0; l < 6; ++l) {
      const double a = map.frequencies()(l, 0) * x0 + map.frequencies()(l, 1) * x1;
      y += (theta(l) * std::sin(a) + theta(6 + l) * std::cos(a)) / std::sqrt(6.0);
    }
    EXPECT_NEAR(ds.labels(m), y, 1e-14);
  }
  EXPECT_THROW(planted(map, Vector::Zero(3), 10, 0.0, 1), ParameterError);
}

TEST(Subsample, SortedWithoutReplacement) {
  const auto ds = synthetic(SyntheticKind::Sinc, 50, 1, 0.0, 1);
  const auto s = subsample(ds, 20, 7);
  EXPECT_EQ(s.size(), 20u);
  std::set<double> rows;
  for (Eigen::Index m = 0; m < 20; ++m) rows.insert(s.features(m, 0));
  EXPECT_EQ(rows.size(), 20u);
  EXPECT_EQ(subsample(ds, 20, 7).features, s.features);
  EXPECT_THROW(subsample(ds, 0, 1), ParameterError);
  EXPECT_THROW(subsample(ds, 51, 1), ParameterError);
}

TEST(Holdout, EvaluationIsTheNeverLabeledRemainder) {
  auto pool = holdout_indices(10, 2);
  pool.mark_labeled(4);
  pool.mark_labeled(7);
  const auto eval = evaluation_indices(pool);
  EXPECT_EQ(eval.size(), 8u);
  std::set<std::size_t> all(eval.begin(), eval.end());
  for (const auto& e : pool.labeled()) EXPECT_TRUE(all.insert(e.index).second);
  EXPECT_EQ(all.size(), 10u);

  auto edge = holdout_indices(5, 4);
  for (std::size_t i = 0; i < 4; ++i) edge.mark_labeled(i);
  EXPECT_EQ(evaluation_indices(edge), std::vector<std::size_t>{4});
  EXPECT_THROW(holdout_indices(5, 5), ConfigError);
  EXPECT_THROW(holdout_indices(5, 6), ConfigError);
}

TEST(ExperimentConfig, BudgetAndValidation) {
  ExperimentConfig c;
  EXPECT_EQ(c.budget(500), 100u);
  c.budget_fraction = 0.25;
  EXPECT_EQ(c.budget(500), 125u);
  c.budget_fraction = 0.01;
  EXPECT_THROW(c.budget(10), ConfigError);
  c.budget_fraction = 0.99;
  EXPECT_THROW(c.budget(10), ConfigError);
  c = ExperimentConfig{};
  EXPECT_NO_THROW(c.validate());
  c.eta_l = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.budget_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_inference("supervised"), InferenceMode::Supervised);
  EXPECT_THROW(parse_inference("offline"), ParameterError);
}

TEST(Dataset, ValidateRejectsBadShapes) {
  Dataset ds;
  ds.features = Matrix::Zero(1, 2);
  ds.labels = Vector::Zero(1);
  EXPECT_THROW(ds.validate(), DataError);
  ds.features = Matrix::Zero(3, 2);
  ds.labels = Vector::Zero(2);
  EXPECT_THROW(ds.validate(), DataError);
  ds.labels = Vector::Zero(3);
  ds.features(1, 1) = std::nan("");
  EXPECT_THROW(ds.validate(), DataError);
}
