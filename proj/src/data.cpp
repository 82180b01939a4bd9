#include "mkal/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "mkal/errors.hpp"
#include "mkal/seed.hpp"

namespace mkal {

namespace {

constexpr std::size_t kMaxDiagnostics = 20;

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"') quoted = !quoted;
    if (line[k] == ',' && !quoted) {
      fields.push_back(trim(line.substr(start, k - start)));
      start = k + 1;
    }
  }
  fields.push_back(trim(line.substr(start)));
  return fields;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

void Dataset::validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw DataError("dataset '" + name + "' has " + std::to_string(features.rows()) +
                    " rows but " + std::to_string(labels.size()) + " labels");
  if (size() < 2) throw DataError("dataset '" + name + "' needs at least 2 samples");
  if (dim() < 1) throw DataError("dataset '" + name + "' needs at least 1 feature");
  if (!features.allFinite() || !labels.allFinite())
    throw DataError("dataset '" + name + "' has non-finite entries");
}

std::string_view to_string(InferenceMode mode) {
  return mode == InferenceMode::Online ? "online" : "supervised";
}

InferenceMode parse_inference(std::string_view name) {
  if (name == "online") return InferenceMode::Online;
  if (name == "supervised") return InferenceMode::Supervised;
  throw ParameterError("unknown inference mode '" + std::string(name) +
                       "' (expected online or supervised)");
}

void ExperimentConfig::validate() const {
  if (!(budget_fraction > 0.0 && budget_fraction < 1.0))
    throw ConfigError("budget fraction must lie in (0, 1)");
  if (num_kernels == 0) throw ConfigError("number of kernels must be positive");
  if (rf_dim == 0) throw ConfigError("random feature dimension must be positive");
  if (!(eta_l > 0.0) || !std::isfinite(eta_l)) throw ConfigError("eta_l must be positive");
  if (!(eta_g > 0.0) || !std::isfinite(eta_g)) throw ConfigError("eta_g must be positive");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ConfigError("ridge must be non-negative");
  if (trials == 0) throw ConfigError("number of trials must be positive");
}

std::size_t ExperimentConfig::budget(std::size_t num_samples) const {
  const auto t = static_cast<std::size_t>(std::llround(budget_fraction * static_cast<double>(num_samples)));
  if (t < 1) throw ConfigError("budget rounds to zero labels for M = " + std::to_string(num_samples));
  if (t >= num_samples)
    throw ConfigError("budget " + std::to_string(t) + " must be smaller than M = " +
                      std::to_string(num_samples));
  return t;
}

LoadReport load_csv(const std::filesystem::path& path, const LabelColumn& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  LoadReport report;
  std::optional<std::size_t> width;
  std::optional<std::size_t> label_index;
  std::vector<double> values;
  std::vector<double> labels;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first = true;

  const auto drop = [&](const std::string& why) {
    ++report.dropped_rows;
    if (report.diagnostics.size() < kMaxDiagnostics)
      report.diagnostics.push_back("line " + std::to_string(line_no) + ": " + why);
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);

    if (first) {
      first = false;
      const bool is_header = std::any_of(fields.begin(), fields.end(),
                                         [](std::string_view f) { return !parse_number(f); });
      width = fields.size();
      if (const auto* name = std::get_if<std::string>(&label_column)) {
        if (!is_header) throw FormatError("label column '" + *name + "' requested but the file has no header");
        const auto it = std::find(fields.begin(), fields.end(), std::string_view(*name));
        if (it == fields.end()) throw FormatError("no column named '" + *name + "' in the header");
        label_index = static_cast<std::size_t>(it - fields.begin());
      } else {
        label_index = std::get<std::size_t>(label_column);
        if (*label_index == kLastColumn) label_index = *width - 1;
        if (*label_index >= *width)
          throw FormatError("label column " + std::to_string(*label_index) + " out of range for " +
                            std::to_string(*width) + " columns");
      }
      if (*width < 2) throw FormatError("need at least one feature column besides the label");
      if (is_header) continue;
    }

    if (fields.size() != *width) {
      drop("expected " + std::to_string(*width) + " fields, found " + std::to_string(fields.size()));
      continue;
    }
    std::vector<double> row(fields.size());
    bool ok = true;
    for (std::size_t k = 0; k < fields.size() && ok; ++k) {
      const auto v = parse_number(fields[k]);
      if (!v) {
        drop("column " + std::to_string(k) + " is not a finite number: '" + std::string(fields[k]) + "'");
        ok = false;
      } else {
        row[k] = *v;
      }
    }
    if (!ok) continue;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k == *label_index) labels.push_back(row[k]);
      else values.push_back(row[k]);
    }
    ++rows;
  }

  if (!width) throw FormatError("'" + path.string() + "' is empty");
  if (rows == 0) {
    std::string msg = "'" + path.string() + "' contains no usable data rows";
    if (!report.diagnostics.empty()) msg += " (" + report.diagnostics.front() + ")";
    throw FormatError(msg);
  }

  const std::size_t d = *width - 1;
  Dataset& ds = report.dataset;
  ds.name = path.stem().string();
  ds.features = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  ds.labels = Eigen::Map<const Vector>(labels.data(), static_cast<Eigen::Index>(rows));
  return report;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < dataset.dim(); ++k) out << 'x' << k << ',';
  out << "y\n";
  for (Eigen::Index m = 0; m < dataset.features.rows(); ++m) {
    for (Eigen::Index k = 0; k < dataset.features.cols(); ++k) out << dataset.features(m, k) << ',';
    out << dataset.labels(m) << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

nlohmann::json StandardizeTransform::to_json() const {
  return {{"feature_mean", std::vector<double>(feature_mean.begin(), feature_mean.end())},
          {"feature_scale", std::vector<double>(feature_scale.begin(), feature_scale.end())},
          {"label_min", label_min},
          {"label_range", label_range}};
}

StandardizeTransform StandardizeTransform::from_json(const nlohmann::json& j) {
  StandardizeTransform t;
  const auto mean = j.at("feature_mean").get<std::vector<double>>();
  const auto scale = j.at("feature_scale").get<std::vector<double>>();
  t.feature_mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  t.feature_scale = Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  t.label_min = j.at("label_min").get<double>();
  t.label_range = j.at("label_range").get<double>();
  return t;
}

Standardized standardize(const Dataset& dataset) {
  dataset.validate();
  const auto m = static_cast<double>(dataset.size());
  Standardized out{dataset, {}};
  auto& t = out.transform;
  t.feature_mean = dataset.features.colwise().mean().transpose();
  t.feature_scale.resize(dataset.features.cols());
  for (Eigen::Index k = 0; k < dataset.features.cols(); ++k) {
    auto col = out.dataset.features.col(k);
    col.array() -= t.feature_mean(k);
    const double sd = std::sqrt(col.squaredNorm() / m);
    t.feature_scale(k) = sd;
    if (sd > 0.0) col /= sd;
    else col.setZero();
  }
  t.label_min = dataset.labels.minCoeff();
  t.label_range = dataset.labels.maxCoeff() - t.label_min;
  if (t.label_range > 0.0) out.dataset.labels = (dataset.labels.array() - t.label_min) / t.label_range;
  else out.dataset.labels.setZero();
  return out;
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "single-kernel") return SyntheticKind::SingleKernel;
  if (name == "sinc") return SyntheticKind::Sinc;
  if (name == "step") return SyntheticKind::Step;
  throw ParameterError("unknown synthetic kind '" + std::string(name) +
                       "' (expected single-kernel, sinc or step)");
}

namespace {

Matrix uniform_features(std::size_t num_samples, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(num_samples), static_cast<Eigen::Index>(dim));
  for (Eigen::Index m = 0; m < x.rows(); ++m)
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(m, k) = uniform(rng);
  return x;
}

void add_noise(Vector& labels, double noise_sd, std::mt19937_64& rng) {
  if (noise_sd == 0.0) return;
  std::normal_distribution<double> normal(0.0, noise_sd);
  for (auto& y : labels) y += normal(rng);
}

void check_synthetic_args(std::size_t num_samples, std::size_t dim, double noise_sd) {
  if (num_samples == 0 || dim == 0) throw ParameterError("synthetic data needs M > 0 and d > 0");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
    throw ParameterError("noise standard deviation must be finite and non-negative");
}

}  // namespace

Dataset planted(const FeatureMap& map, const Vector& theta, std::size_t num_samples,
                double noise_sd, std::uint64_t seed) {
  check_synthetic_args(num_samples, map.input_dim(), noise_sd);
  if (static_cast<std::size_t>(theta.size()) != map.output_dim())
    throw ParameterError("planted theta does not match the feature map");
  std::mt19937_64 rng(seed);
  Dataset ds;
  ds.name = "planted";
  ds.features = uniform_features(num_samples, map.input_dim(), rng);
  ds.labels.resize(ds.features.rows());
  for (Eigen::Index m = 0; m < ds.features.rows(); ++m)
    ds.labels(m) = theta.dot(map.features(ds.features.row(m).transpose()));
  add_noise(ds.labels, noise_sd, rng);
  return ds;
}

Dataset synthetic(SyntheticKind kind, std::size_t num_samples, std::size_t dim, double noise_sd,
                  std::uint64_t seed) {
  check_synthetic_args(num_samples, dim, noise_sd);
  if (kind == SyntheticKind::SingleKernel) {
    const FeatureMap map(KernelSpec(1.0), 25, dim, derive_seed(seed, {1}));
    std::mt19937_64 theta_rng(derive_seed(seed, {2}));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector theta(static_cast<Eigen::Index>(map.output_dim()));
    for (auto& v : theta) v = normal(theta_rng);
    Dataset ds = planted(map, theta, num_samples, noise_sd, seed);
    ds.name = "single-kernel";
    return ds;
  }

  std::mt19937_64 rng(seed);
  Dataset ds;
  ds.features = uniform_features(num_samples, dim, rng);
  ds.labels.resize(ds.features.rows());
  for (Eigen::Index m = 0; m < ds.features.rows(); ++m) {
    if (kind == SyntheticKind::Sinc) {
      ds.name = "sinc";
      const double r = std::numbers::pi * ds.features.row(m).norm();
      ds.labels(m) = r == 0.0 ? 1.0 : std::sin(r) / r;
    } else {
      ds.name = "step";
      ds.labels(m) = ds.features(m, 0) > 0.0 ? 1.0 : 0.0;
    }
  }
  add_noise(ds.labels, noise_sd, rng);
  return ds;
}

Dataset subsample(const Dataset& dataset, std::size_t count, std::uint64_t seed) {
  if (count == 0 || count > dataset.size())
    throw ParameterError("subsample size " + std::to_string(count) + " must lie in [1, " +
                         std::to_string(dataset.size()) + "]");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(count);
  std::sort(order.begin(), order.end());

  Dataset out;
  out.name = dataset.name;
  out.features.resize(static_cast<Eigen::Index>(count), dataset.features.cols());
  out.labels.resize(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    out.features.row(static_cast<Eigen::Index>(k)) = dataset.features.row(static_cast<Eigen::Index>(order[k]));
    out.labels(static_cast<Eigen::Index>(k)) = dataset.labels(static_cast<Eigen::Index>(order[k]));
  }
  return out;
}

PoolState holdout_indices(std::size_t num_samples, std::size_t budget) {
  if (budget >= num_samples)
    throw ConfigError("budget " + std::to_string(budget) + " must be smaller than M = " +
                      std::to_string(num_samples));
  return PoolState(num_samples);
}

std::vector<std::size_t> evaluation_indices(const PoolState& pool) { return pool.unlabeled(); }

}  // namespace mkal
