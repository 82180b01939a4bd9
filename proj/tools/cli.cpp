#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mkal/bench.hpp"
#include "mkal/errors.hpp"
#include "mkal/seed.hpp"

namespace mkal::cli {

namespace {

void print_error(std::ostream& err, std::string_view kind, const std::string& message) {
  err << nlohmann::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

struct Options {
  std::string dataset;
  std::string label_column;
  std::vector<std::string> criteria;
  std::vector<double> budgets;
  std::size_t trials = 10;
  std::size_t num_kernels = 10;
  std::size_t rf_dim = 50;
  double eta_l = 0.05;
  double eta_g = 1.0;
  double ridge = 1e-8;
  std::string inference = "online";
  std::uint64_t seed = 0;
  std::string format = "markdown";
  std::string out;
  std::size_t subsample = 0;
  bool no_standardize = false;
  bool no_cache = false;
  std::size_t parallel = 1;
  std::string config_path;
  std::size_t synthetic_samples = 500;
  std::size_t synthetic_dim = 1;
  double noise_sd = 0.05;
};

LabelColumn parse_label_column(const std::string& text) {
  if (text.empty()) return kLastColumn;
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); }))
    return static_cast<std::size_t>(std::stoull(text));
  return text;
}

Dataset load_dataset(const Options& o, std::ostream& err) {
  constexpr std::string_view prefix = "synthetic:";
  if (o.dataset.starts_with(prefix)) {
    const auto kind = parse_synthetic_kind(std::string_view(o.dataset).substr(prefix.size()));
    return synthetic(kind, o.synthetic_samples, o.synthetic_dim, o.noise_sd,
                     derive_seed(o.seed, {0x64617461ULL}));
  }
  auto loaded = load_csv(o.dataset, parse_label_column(o.label_column));
  if (loaded.dropped_rows > 0) {
    err << nlohmann::json{{"warning", {{"dropped_rows", loaded.dropped_rows},
                                       {"diagnostics", loaded.diagnostics}}}}.dump()
        << '\n';
  }
  return std::move(loaded.dataset);
}

/// Fills options not given on the command line from a JSON config file.
void apply_config_file(const std::string& path, CLI::App& app, Options& o) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto unset = [&](const char* flag) { return app.get_option(flag)->count() == 0; };
  try {
    if (j.contains("dataset") && unset("--dataset")) o.dataset = j["dataset"].get<std::string>();
    if (j.contains("label_column") && unset("--label-column")) {
      const auto& v = j["label_column"];
      o.label_column = v.is_number() ? std::to_string(v.get<std::size_t>()) : v.get<std::string>();
    }
    if (j.contains("format") && unset("--format")) o.format = j["format"].get<std::string>();
    if (j.contains("out") && unset("--out")) o.out = j["out"].get<std::string>();
    if (j.contains("subsample") && unset("--subsample")) o.subsample = j["subsample"].get<std::size_t>();
    if (j.contains("synthetic_samples") && unset("--synthetic-samples"))
      o.synthetic_samples = j["synthetic_samples"].get<std::size_t>();
    if (j.contains("synthetic_dim") && unset("--synthetic-dim")) o.synthetic_dim = j["synthetic_dim"].get<std::size_t>();
    if (j.contains("noise_sd") && unset("--noise-sd")) o.noise_sd = j["noise_sd"].get<double>();

    const BenchConfig c = config_from_json(j);
    if (j.contains("criterion") && unset("--criterion")) {
      o.criteria.clear();
      for (auto k : c.criteria) o.criteria.emplace_back(to_string(k));
    }
    if (j.contains("budget_fraction") && unset("--budget-fraction")) o.budgets = c.budget_fractions;
    if (j.contains("trials") && unset("--trials")) o.trials = c.base.trials;
    if (j.contains("num_kernels") && unset("--num-kernels")) o.num_kernels = c.base.num_kernels;
    if (j.contains("rf_dim") && unset("--rf-dim")) o.rf_dim = c.base.rf_dim;
    if (j.contains("eta_l") && unset("--eta-l")) o.eta_l = c.base.eta_l;
    if (j.contains("eta_g") && unset("--eta-g")) o.eta_g = c.base.eta_g;
    if (j.contains("ridge") && unset("--ridge")) o.ridge = c.base.ridge;
    if (j.contains("inference") && unset("--inference")) o.inference = std::string(to_string(c.base.inference));
    if (j.contains("seed") && unset("--seed")) o.seed = c.base.seed;
    if (j.contains("standardize") && unset("--no-standardize")) o.no_standardize = !c.base.standardize;
    if (j.contains("cache_features") && unset("--no-cache")) o.no_cache = !c.base.cache_features;
    if (j.contains("parallel") && unset("--parallel")) o.parallel = c.parallel;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid config value: " + std::string(e.what()));
  }
}

BenchConfig to_bench_config(const Options& o) {
  BenchConfig c;
  if (!o.criteria.empty()) {
    c.criteria.clear();
    for (const auto& name : o.criteria) {
      if (name == "all") {
        c.criteria.assign(std::begin(kAllCriteria), std::end(kAllCriteria));
        break;
      }
      const auto kind = parse_criterion(name);
      if (std::find(c.criteria.begin(), c.criteria.end(), kind) == c.criteria.end()) c.criteria.push_back(kind);
    }
  }
  if (!o.budgets.empty()) c.budget_fractions = o.budgets;
  auto& b = c.base;
  b.trials = o.trials;
  b.num_kernels = o.num_kernels;
  b.rf_dim = o.rf_dim;
  b.eta_l = o.eta_l;
  b.eta_g = o.eta_g;
  b.ridge = o.ridge;
  b.inference = parse_inference(o.inference);
  b.seed = o.seed;
  b.standardize = !o.no_standardize;
  b.cache_features = !o.no_cache;
  c.parallel = o.parallel;
  c.validate();
  return c;
}

/// Writes through a temporary file so a failed write leaves nothing behind.
void write_file(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoError("cannot write '" + tmp.string() + "'");
    f << content;
    if (!f) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move report into '" + path.string() + "'");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pool-based active learning benchmark for random-feature multiple kernel learning", "mkal_bench"};
  Options o;
  app.add_option("--dataset", o.dataset, "CSV path or synthetic:{single-kernel,sinc,step}");
  app.add_option("--label-column", o.label_column, "Label column name or 0-based index (default: last)");
  app.add_option("--criterion", o.criteria, "ekd, ekl, qbc, emc, random or all (repeatable)");
  app.add_option("--budget-fraction", o.budgets, "Labeled fraction T/M (repeatable, default 0.2 0.25)");
  app.add_option("--trials", o.trials, "Trials per cell")->check(CLI::PositiveNumber);
  app.add_option("--num-kernels", o.num_kernels, "Gaussian kernels in the dictionary")->check(CLI::PositiveNumber);
  app.add_option("--rf-dim", o.rf_dim, "Random features D per kernel")->check(CLI::PositiveNumber);
  app.add_option("--eta-l", o.eta_l, "SGD step size of the per-kernel models");
  app.add_option("--eta-g", o.eta_g, "Exponential-weights rate");
  app.add_option("--ridge", o.ridge, "Ridge term of the supervised least-squares fit");
  app.add_option("--inference", o.inference, "online or supervised");
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--format", o.format, "csv, json or markdown");
  app.add_option("--out", o.out, "Output file (default: stdout)");
  app.add_option("--subsample", o.subsample, "Uniformly subsample the dataset to this many rows");
  app.add_flag("--no-standardize", o.no_standardize, "Use features and labels as given");
  app.add_flag("--no-cache", o.no_cache, "Recompute pool feature vectors at every step");
  app.add_option("--parallel", o.parallel, "Worker threads over trials")->check(CLI::PositiveNumber);
  app.add_option("--config", o.config_path, "JSON file with any of the options above");
  app.add_option("--synthetic-samples", o.synthetic_samples, "M for synthetic datasets");
  app.add_option("--synthetic-dim", o.synthetic_dim, "d for synthetic datasets");
  app.add_option("--noise-sd", o.noise_sd, "Label noise for synthetic datasets");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (!o.config_path.empty()) apply_config_file(o.config_path, app, o);
    if (o.dataset.empty()) throw ConfigError("--dataset is required");
    const BenchConfig config = to_bench_config(o);
    const auto format = parse_report_format(o.format);

    Dataset dataset = load_dataset(o, err);
    if (o.subsample > 0 && o.subsample < dataset.size())
      dataset = subsample(dataset, o.subsample, derive_seed(o.seed, {0x737562ULL}));

    const RunReport report = run_experiment(config, dataset);
    const std::string rendered = emit_report(report, format);
    if (o.out.empty()) {
      out << rendered;
    } else {
      write_file(o.out, rendered);
      if (report.transform) write_file(o.out + ".transform.json", report.transform->to_json().dump(2) + "\n");
    }
    return 0;
  } catch (const Error& e) {
    print_error(err, to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
  }
  return 1;
}

}  // namespace mkal::cli
