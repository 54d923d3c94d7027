#include "credit_transfer/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "credit_transfer/dataset.hpp"
#include "credit_transfer/errors.hpp"
#include "credit_transfer/evaluation.hpp"
#include "credit_transfer/experiment.hpp"
#include "credit_transfer/format.hpp"
#include "credit_transfer/gaussian_links.hpp"
#include "credit_transfer/link_models.hpp"
#include "credit_transfer/logistic.hpp"
#include "credit_transfer/random.hpp"
#include "credit_transfer/serialization.hpp"

namespace credit_transfer {

namespace {

namespace fs = std::filesystem;

/// A usage problem detected after parsing (bad combination of flags).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string target_column = "kredit";
  std::string split_column = "laufkont";
};

struct FitOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;
  double ridge = 1e-8;

  FitConfig config() const {
    if (max_iterations < 1) throw UsageError("--max-iter must be >= 1");
    if (!(tolerance > 0.0)) throw UsageError("--tol must be positive");
    if (ridge < 0.0) throw UsageError("--ridge must be non-negative");
    return {max_iterations, tolerance, ridge};
  }
};

void add_data_options(CLI::App* app, DataOptions& o) {
  app->add_option("--target", o.target_column, "Label column")->capture_default_str();
  app->add_option("--split-column", o.split_column, "Column separating the subpopulations")
      ->capture_default_str();
}

void add_fit_options(CLI::App* app, FitOptions& o) {
  app->add_option("--max-iter", o.max_iterations, "Newton iteration cap")->capture_default_str();
  app->add_option("--tol", o.tolerance, "Gradient-norm tolerance")->capture_default_str();
  app->add_option("--ridge", o.ridge, "L2 stabilizer")->capture_default_str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot write file");
  out << text;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

void check_features(const std::vector<std::string>& expected, const LabeledSample& sample,
                    const std::string& what) {
  if (!expected.empty() && expected != sample.feature_names())
    throw DataError(what + ": feature columns do not match the parameter document");
}

std::vector<LinkModel> parse_models(const std::vector<std::string>& names) {
  std::vector<LinkModel> models;
  for (const auto& n : names) {
    try {
      models.push_back(parse_link_model(n));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return models;
}

// Appends flags from a JSON config file for every key not given explicitly.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  const Json config = read_json(config_path);
  if (!config.is_object()) throw DataError(config_path + ": config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    const bool explicit_flag = std::any_of(args.begin(), args.end(), [&flag](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (explicit_flag) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) text += ',';
        text += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
      }
    } else {
      text = value.dump();
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

void print_error(std::ostream& err, std::string_view kind, int code, const std::string& message) {
  Json j;
  j["error"] = std::string(kind);
  j["exit_code"] = code;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transfer of logistic credit scores between subpopulations", "credit-transfer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config_path;
  const auto add_config = [&config_path](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file with default flag values");
  };

  // split
  DataOptions split_data;
  std::string split_input;
  std::string split_out;
  Eigen::Index split_size = 0;
  std::uint64_t split_seed = 42;
  int split_repetition = 0;
  bool split_stratified = false;
  auto* split = app.add_subcommand("split", "Write source/target subpopulations and one learning/test split");
  split->add_option("--data", split_input, "Input CSV")->required();
  split->add_option("--size", split_size, "Learning sample size")->required();
  split->add_option("--seed", split_seed, "Random seed")->capture_default_str();
  split->add_option("--repetition", split_repetition, "Repetition index")->capture_default_str();
  split->add_flag("--stratified", split_stratified, "Keep the label ratio in the learning sample");
  split->add_option("--out", split_out, "Output directory")->required();
  add_data_options(split, split_data);
  add_config(split);

  // fit
  DataOptions fit_data;
  FitOptions fit_options;
  std::string fit_input;
  std::string fit_out;
  bool fit_source_only = false;
  auto* fit = app.add_subcommand("fit", "Maximum-likelihood logistic fit");
  fit->add_option("--data", fit_input, "Input CSV")->required();
  fit->add_flag("--source-only", fit_source_only,
                "Fit on rows with split column > 1, dropping the split column");
  fit->add_option("--out", fit_out, "Write the parameter JSON here instead of stdout");
  add_data_options(fit, fit_data);
  add_fit_options(fit, fit_options);
  add_config(fit);

  // transfer
  DataOptions transfer_data;
  FitOptions transfer_fit_options;
  std::string transfer_model;
  std::string transfer_params;
  std::string transfer_learning;
  std::string transfer_source_data;
  std::string transfer_out;
  auto* transfer = app.add_subcommand("transfer", "Estimate a link model on a target learning sample");
  transfer->add_option("--model", transfer_model, "M1..M7")->required();
  transfer->add_option("--source-params", transfer_params, "Source parameter JSON (M1-M6)");
  transfer->add_option("--learning", transfer_learning, "Target learning CSV (M2-M7)");
  transfer->add_option("--source-data", transfer_source_data, "Source sample CSV (M7)");
  transfer->add_option("--out", transfer_out, "Write the fit JSON here instead of stdout");
  add_data_options(transfer, transfer_data);
  add_fit_options(transfer, transfer_fit_options);
  add_config(transfer);

  // evaluate
  DataOptions evaluate_data;
  std::string evaluate_params;
  std::string evaluate_test;
  std::string evaluate_roc;
  double evaluate_threshold = 0.5;
  auto* evaluate = app.add_subcommand("evaluate", "Error rates and AUC of a parameter document on a test CSV");
  evaluate->add_option("--params", evaluate_params, "Parameter or transfer-fit JSON")->required();
  evaluate->add_option("--test", evaluate_test, "Test CSV")->required();
  evaluate->add_option("--threshold", evaluate_threshold, "Cut-off")->capture_default_str();
  evaluate->add_option("--roc-out", evaluate_roc, "Write the ROC curve CSV here");
  add_data_options(evaluate, evaluate_data);
  add_config(evaluate);

  // experiment and roc share most options
  DataOptions exp_data;
  FitOptions exp_fit;
  ExperimentConfig exp_config;
  std::string exp_input;
  std::string exp_out;
  std::vector<std::string> exp_models{"M1", "M2", "M3", "M4", "M5", "M6", "M7"};
  int exp_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* experiment = app.add_subcommand("experiment", "Repeated random-split comparison of the link models");
  auto* roc_cmd = app.add_subcommand("roc", "ROC curves of the link models on one split");
  for (auto* sub : {experiment, roc_cmd}) {
    sub->add_option("--data", exp_input, "Input CSV")->required();
    sub->add_option("--out", exp_out, "Output directory")->required();
    sub->add_option("--seed", exp_config.seed, "Random seed")->capture_default_str();
    sub->add_option("--models", exp_models, "Comma-separated models")->delimiter(',');
    sub->add_option("--repetitions", exp_config.repetitions, "Splits per learning size")
        ->capture_default_str();
    sub->add_flag("--stratified", exp_config.stratified, "Stratify splits by label");
    add_data_options(sub, exp_data);
    add_fit_options(sub, exp_fit);
    add_config(sub);
  }
  experiment->add_option("--sizes", exp_config.learning_sizes, "Comma-separated learning sizes")
      ->delimiter(',');
  experiment->add_option("--threshold", exp_config.threshold, "Cut-off")->capture_default_str();
  experiment->add_option("--roc-size", exp_config.roc_size, "Learning size of the ROC split")
      ->capture_default_str();
  experiment->add_option("--jobs", exp_jobs, "Worker threads")->capture_default_str();
  roc_cmd->add_option("--size", exp_config.roc_size, "Learning size")->capture_default_str();

  // gaussian-check
  Eigen::Index gauss_dim = 5;
  std::uint64_t gauss_seed = 7;
  int gauss_instances = 1;
  auto* gaussian = app.add_subcommand("gaussian-check", "Closed-form check of the Gaussian link chain");
  gaussian->add_option("--dim", gauss_dim, "Feature dimension (1-32)")->capture_default_str();
  gaussian->add_option("--seed", gauss_seed, "Random seed")->capture_default_str();
  gaussian->add_option("--instances", gauss_instances, "Random instances")->capture_default_str();
  add_config(gaussian);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", kExitUsage, e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    print_error(err, "data", kExitData, e.what());
    return kExitData;
  }

  try {
    if (*split) {
      if (split_repetition < 0) throw UsageError("--repetition must be >= 0");
      const auto sample = load_csv(split_input, split_data.target_column);
      const auto parts = split_by_account_status(sample, split_data.split_column);
      const SplitPlan plan{split_size, split_repetition + 1, split_seed, split_stratified};
      const auto drawn = draw_split(parts.target, plan, split_repetition);
      const fs::path dir(split_out);
      fs::create_directories(dir);
      write_csv(dir / "source.csv", parts.source, split_data.target_column);
      write_csv(dir / "target.csv", parts.target, split_data.target_column);
      write_csv(dir / "learning.csv", drawn.learning, split_data.target_column);
      write_csv(dir / "test.csv", drawn.test, split_data.target_column);
      Json j;
      j["source_size"] = parts.source.size();
      j["target_size"] = parts.target.size();
      j["learning_size"] = drawn.learning.size();
      j["test_size"] = drawn.test.size();
      j["seed"] = split_seed;
      j["repetition"] = split_repetition;
      out << j.dump(2) << '\n';
    } else if (*fit) {
      const FitConfig config = fit_options.config();
      auto sample = load_csv(fit_input, fit_data.target_column);
      if (fit_source_only) sample = split_by_account_status(sample, fit_data.split_column).source;
      const FitReport report = fit_mle(sample, config);
      Json j = params_to_json(report.params, sample.feature_names());
      j["log_likelihood"] = report.log_likelihood;
      j["converged"] = report.converged;
      j["iterations"] = report.iterations;
      j["gradient_norm"] = report.gradient_norm;
      if (fit_out.empty()) out << j.dump(2) << '\n';
      else write_text(fit_out, j.dump(2) + "\n");
    } else if (*transfer) {
      const FitConfig config = transfer_fit_options.config();
      LinkModel kind;
      try {
        kind = parse_link_model(transfer_model);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (kind != LinkModel::M7 && transfer_params.empty())
        throw UsageError("--source-params is required for " + transfer_model);
      if (kind != LinkModel::M1 && transfer_learning.empty())
        throw UsageError("--learning is required for " + transfer_model);
      if (kind == LinkModel::M7 && transfer_source_data.empty())
        throw UsageError("--source-data is required for M7");

      TransferFit result;
      std::vector<std::string> names;
      if (kind == LinkModel::M1) {
        const Json doc = read_json(transfer_params);
        names = feature_names_from_json(doc);
        result = identity_transfer(params_from_json(doc));
        if (!transfer_learning.empty()) {
          const auto learning = load_csv(transfer_learning, transfer_data.target_column);
          check_features(names, learning, transfer_learning);
          result.log_likelihood = log_likelihood(result.target_params, learning);
        }
      } else if (kind == LinkModel::M7) {
        const auto source = load_csv(transfer_source_data, transfer_data.target_column);
        const auto learning = load_csv(transfer_learning, transfer_data.target_column);
        if (source.feature_names() != learning.feature_names())
          throw DataError("source and learning samples have different columns");
        names = learning.feature_names();
        result = fit_m7(source, learning, config);
      } else {
        const Json doc = read_json(transfer_params);
        names = feature_names_from_json(doc);
        const auto learning = load_csv(transfer_learning, transfer_data.target_column);
        check_features(names, learning, transfer_learning);
        const LogisticParams source = params_from_json(doc);
        if (source.dimension() != learning.dimension())
          throw DataError("parameter dimension does not match the learning sample");
        result = estimate_transition(kind, source, learning, config);
        if (names.empty()) names = learning.feature_names();
      }
      const Json j = transfer_fit_to_json(result, names);
      if (transfer_out.empty()) out << j.dump(2) << '\n';
      else write_text(transfer_out, j.dump(2) + "\n");
    } else if (*evaluate) {
      if (!(evaluate_threshold > 0.0 && evaluate_threshold < 1.0))
        throw UsageError("--threshold must lie in (0, 1)");
      const Json doc = read_json(evaluate_params);
      const LogisticParams params = params_from_json(doc);
      const auto test = load_csv(evaluate_test, evaluate_data.target_column);
      check_features(feature_names_from_json(doc), test, evaluate_test);
      if (params.dimension() != test.dimension())
        throw DataError("parameter dimension does not match the test sample");
      const Eigen::VectorXd scores = score_rows(params, test.features());
      const ConfusionCounts counts = confusion(scores, test.labels(), evaluate_threshold);
      Json j = error_report_to_json(counts, error_report(counts, evaluate_threshold));
      if (has_both_labels(test.labels())) {
        const RocCurve curve = roc(scores, test.labels());
        j["auc"] = curve.auc;
        if (!evaluate_roc.empty()) write_text(evaluate_roc, roc_csv(curve));
      } else {
        j["auc"] = nullptr;
      }
      out << j.dump(2) << '\n';
    } else if (*experiment || *roc_cmd) {
      exp_config.fit = exp_fit.config();
      exp_config.models = parse_models(exp_models);
      const std::string bytes = read_file(exp_input);
      const auto sample = parse_csv(bytes, exp_data.target_column, exp_input);
      const auto parts = split_by_account_status(sample, exp_data.split_column);
      try {
        exp_config.validate(parts.target.size());
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const RunMetadata meta{exp_input, hex64(fnv1a64(bytes)), parts.source.size(),
                             parts.target.size()};
      const auto rocs = emit_roc_suite(parts.source, parts.target, exp_config, exp_config.roc_size);
      if (*roc_cmd) {
        write_roc_outputs(exp_out, rocs);
        Json j;
        for (const auto& r : rocs) j[std::string(to_string(r.model))] = r.curve.auc;
        out << Json{{"learning_size", exp_config.roc_size}, {"auc", j}}.dump(2) << '\n';
      } else {
        if (exp_jobs < 1) throw UsageError("--jobs must be >= 1");
        const auto result = run_experiment(parts.source, parts.target, exp_config, exp_jobs);
        write_experiment_outputs(exp_out, exp_config, result, rocs, meta);
        for (const auto& table : result.tables) out << format_table(table) << '\n';
      }
    } else if (*gaussian) {
      if (gauss_instances < 1) throw UsageError("--instances must be >= 1");
      if (gauss_dim < 1 || gauss_dim > kMaxGaussianDimension)
        throw UsageError("--dim must be in [1, 32]");
      SplitMix64 rng(gauss_seed);
      Json reports = Json::array();
      double worst = 0.0;
      bool consistent = true;
      for (int i = 0; i < gauss_instances; ++i) {
        const GaussianInstance instance = random_homoscedastic_instance(gauss_dim, rng);
        const LinkConsistencyReport report = verify_link_consistency(instance.spec, instance.link);
        worst = std::max(worst, report.max_residual);
        consistent = consistent && report.consistent;
        Json r = link_report_to_json(report);
        r["link_scale"] = std::vector<double>(instance.link.scale.data(),
                                              instance.link.scale.data() + instance.link.scale.size());
        r["link_offset"] = std::vector<double>(instance.link.offsets[0].data(),
                                               instance.link.offsets[0].data() + gauss_dim);
        reports.push_back(std::move(r));
      }
      Json j;
      j["dim"] = gauss_dim;
      j["seed"] = gauss_seed;
      j["instances"] = gauss_instances;
      j["max_residual"] = worst;
      j["tolerance"] = kLinkConsistencyTolerance;
      j["consistent"] = consistent;
      j["reports"] = std::move(reports);
      out << j.dump(2) << '\n';
      if (!consistent) return kExitNumerical;
    }
  } catch (const UsageError& e) {
    print_error(err, "usage", kExitUsage, e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    print_error(err, "data", kExitData, e.what());
    return kExitData;
  } catch (const NumericalError& e) {
    print_error(err, "numerical", kExitNumerical, e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    print_error(err, "usage", kExitUsage, e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    print_error(err, "internal", kExitInternal, e.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace credit_transfer
