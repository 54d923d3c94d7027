#include "credit_transfer/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "credit_transfer/errors.hpp"
#include "credit_transfer/format.hpp"

namespace credit_transfer {

namespace {

std::size_t model_index(const std::vector<LinkModel>& models, LinkModel m) {
  return static_cast<std::size_t>(std::find(models.begin(), models.end(), m) - models.begin());
}

double metric_value(const RawRecord& r, Metric metric) {
  switch (metric) {
    case Metric::TestError: return r.report.test_error;
    case Metric::TypeI: return r.report.type_i;
    case Metric::TypeII: return r.report.type_ii;
  }
  return 0.0;
}

RawRecord evaluate_model(LinkModel model, const FitReport& source_fit, const LabeledSample& source,
                         const LearningTestSplit& split, const ExperimentConfig& config) {
  RawRecord record;
  record.model = model;
  try {
    const TransferFit fit =
        estimate_link_model(model, source_fit.params, source, split.learning, config.fit);
    const Eigen::VectorXd scores = score_rows(fit.target_params, split.test.features());
    record.counts = confusion(scores, split.test.labels(), config.threshold);
    record.report = error_report(record.counts, config.threshold);
    record.converged = fit.converged;
    record.iterations = fit.iterations;
    record.free_parameters = fit.free_parameters;
    record.log_likelihood = fit.log_likelihood;
  } catch (const std::exception& e) {
    record.failed = true;
    record.failure = e.what();
  }
  return record;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot write file");
  out << contents;
  if (!out) throw DataError(path.string() + ": write failed");
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::TestError: return "test_error";
    case Metric::TypeI: return "type_i";
    case Metric::TypeII: return "type_ii";
  }
  return "test_error";
}

void ExperimentConfig::validate(Eigen::Index target_size) const {
  if (learning_sizes.empty()) throw std::invalid_argument("experiment: no learning sizes");
  for (Eigen::Index n : learning_sizes)
    if (n < 1 || n >= target_size)
      throw std::invalid_argument("experiment: learning size " + std::to_string(n) +
                                  " must be in [1, " + std::to_string(target_size) + ")");
  if (roc_size < 1 || roc_size >= target_size)
    throw std::invalid_argument("experiment: ROC learning size " + std::to_string(roc_size) +
                                " must be in [1, " + std::to_string(target_size) + ")");
  if (repetitions < 1) throw std::invalid_argument("experiment: repetitions must be >= 1");
  if (models.empty()) throw std::invalid_argument("experiment: no models selected");
  for (std::size_t i = 0; i < learning_sizes.size(); ++i)
    for (std::size_t k = i + 1; k < learning_sizes.size(); ++k)
      if (learning_sizes[i] == learning_sizes[k])
        throw std::invalid_argument("experiment: duplicate learning size");
  for (std::size_t i = 0; i < models.size(); ++i)
    for (std::size_t k = i + 1; k < models.size(); ++k)
      if (models[i] == models[k]) throw std::invalid_argument("experiment: duplicate model");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("experiment: threshold must lie in (0, 1)");
  if (fit.ridge < 0.0 || !(fit.gradient_tolerance > 0.0) || fit.max_iterations < 1)
    throw std::invalid_argument("experiment: invalid fit configuration");
}

double ResultTable::mean_at(Eigen::Index learning_size, LinkModel model) const {
  const auto row = std::find(learning_sizes.begin(), learning_sizes.end(), learning_size);
  const auto col = std::find(models.begin(), models.end(), model);
  if (row == learning_sizes.end() || col == models.end())
    throw std::out_of_range("ResultTable: no cell for this learning size and model");
  return mean(row - learning_sizes.begin(), col - models.begin());
}

ExperimentResult run_experiment(const LabeledSample& source, const LabeledSample& target,
                                const ExperimentConfig& config, int jobs) {
  config.validate(target.size());
  if (source.feature_names() != target.feature_names())
    throw std::invalid_argument("experiment: source and target features differ");

  ExperimentResult result;
  result.source_fit = fit_mle(source, config.fit);
  if (!result.source_fit.converged)
    throw NumericalError("experiment: source fit did not converge (gradient norm " +
                         format_double(result.source_fit.gradient_norm) + ")");

  const std::size_t sizes = config.learning_sizes.size();
  const auto reps = static_cast<std::size_t>(config.repetitions);
  const std::size_t models = config.models.size();
  const std::size_t units = sizes * reps;
  result.records.resize(units * models);

  const auto run_unit = [&](std::size_t unit) {
    const std::size_t s = unit / reps;
    const int rep = static_cast<int>(unit % reps);
    const SplitPlan plan{config.learning_sizes[s], config.repetitions, config.seed,
                         config.stratified};
    const LearningTestSplit split = draw_split(target, plan, rep);
    for (std::size_t m = 0; m < models; ++m) {
      RawRecord record = evaluate_model(config.models[m], result.source_fit, source, split, config);
      record.learning_size = plan.learning_size;
      record.repetition = rep;
      result.records[unit * models + m] = std::move(record);
    }
  };

  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(units));
  if (workers == 1) {
    for (std::size_t u = 0; u < units; ++u) run_unit(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t u = next++; u < units; u = next++) run_unit(u);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::stable_sort(result.records.begin(), result.records.end(),
                   [&config](const RawRecord& a, const RawRecord& b) {
                     if (a.learning_size != b.learning_size) return a.learning_size < b.learning_size;
                     if (a.repetition != b.repetition) return a.repetition < b.repetition;
                     return model_index(config.models, a.model) < model_index(config.models, b.model);
                   });
  result.tables = aggregate(result.records, config);
  return result;
}

std::array<ResultTable, 3> aggregate(const std::vector<RawRecord>& records,
                                     const ExperimentConfig& config) {
  std::vector<Eigen::Index> sizes = config.learning_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  const auto rows = static_cast<Eigen::Index>(sizes.size());
  const auto cols = static_cast<Eigen::Index>(config.models.size());

  std::array<ResultTable, 3> tables;
  const std::array<Metric, 3> metrics{Metric::TestError, Metric::TypeI, Metric::TypeII};
  for (std::size_t t = 0; t < 3; ++t) {
    auto& table = tables[t];
    table.metric = metrics[t];
    table.learning_sizes = sizes;
    table.models = config.models;
    table.mean = Eigen::MatrixXd::Zero(rows, cols);
    table.std_dev = Eigen::MatrixXd::Zero(rows, cols);
    table.evaluated = Eigen::MatrixXi::Zero(rows, cols);
    table.failed = Eigen::MatrixXi::Zero(rows, cols);

    std::vector<std::vector<std::vector<double>>> values(
        sizes.size(), std::vector<std::vector<double>>(config.models.size()));
    for (const auto& r : records) {
      const auto row = std::find(sizes.begin(), sizes.end(), r.learning_size) - sizes.begin();
      const auto col = static_cast<Eigen::Index>(model_index(config.models, r.model));
      if (row >= rows || col >= cols) continue;
      if (r.failed) {
        ++table.failed(row, col);
        continue;
      }
      values[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)].push_back(
          metric_value(r, table.metric));
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        const auto& v = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        table.evaluated(i, j) = static_cast<int>(v.size());
        if (v.empty()) {
          table.mean(i, j) = std::nan("");
          table.std_dev(i, j) = std::nan("");
          continue;
        }
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        double squares = 0.0;
        for (double x : v) squares += (x - mean) * (x - mean);
        table.mean(i, j) = mean;
        table.std_dev(i, j) = v.size() > 1 ? std::sqrt(squares / static_cast<double>(v.size() - 1)) : 0.0;
      }
    }
  }
  return tables;
}

std::vector<ModelRoc> emit_roc_suite(const LabeledSample& source, const LabeledSample& target,
                                     const ExperimentConfig& config, Eigen::Index learning_size) {
  ExperimentConfig roc_config = config;
  roc_config.roc_size = learning_size;
  roc_config.validate(target.size());
  const FitReport source_fit = fit_mle(source, config.fit);
  if (!source_fit.converged) throw NumericalError("roc: source fit did not converge");
  const SplitPlan plan{learning_size, config.repetitions, config.seed, config.stratified};
  const LearningTestSplit split = draw_split(target, plan, 0);

  std::vector<ModelRoc> curves;
  for (LinkModel model : config.models) {
    const TransferFit fit =
        estimate_link_model(model, source_fit.params, source, split.learning, config.fit);
    curves.push_back({model, roc(score_rows(fit.target_params, split.test.features()),
                                 split.test.labels())});
  }
  return curves;
}

std::string table_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "metric,learning_size,model,mean,std_dev,evaluated,failed\n";
  for (std::size_t i = 0; i < table.learning_sizes.size(); ++i) {
    for (std::size_t j = 0; j < table.models.size(); ++j) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>(j);
      out << to_string(table.metric) << ',' << table.learning_sizes[i] << ','
          << to_string(table.models[j]) << ',' << format_double(table.mean(r, c)) << ','
          << format_double(table.std_dev(r, c)) << ',' << table.evaluated(r, c) << ','
          << table.failed(r, c) << '\n';
    }
  }
  return out.str();
}

std::string raw_records_csv(const std::vector<RawRecord>& records) {
  std::ostringstream out;
  out << "learning_size,repetition,model,status,converged,iterations,free_parameters,"
         "log_likelihood,tp,fp,tn,fn,test_error,type_i,type_ii\n";
  for (const auto& r : records) {
    out << r.learning_size << ',' << r.repetition << ',' << to_string(r.model) << ','
        << (r.failed ? "failed" : "ok") << ',' << (r.converged ? 1 : 0) << ',' << r.iterations
        << ',' << r.free_parameters << ',' << format_double(r.log_likelihood) << ','
        << r.counts.true_positive << ',' << r.counts.false_positive << ','
        << r.counts.true_negative << ',' << r.counts.false_negative << ','
        << format_double(r.report.test_error) << ',' << format_double(r.report.type_i) << ','
        << format_double(r.report.type_ii) << '\n';
  }
  return out.str();
}

std::string format_table(const ResultTable& table) {
  std::ostringstream out;
  out << to_string(table.metric) << '\n' << "n     ";
  for (LinkModel m : table.models) out << "  " << to_string(m) << "   ";
  out << '\n';
  for (std::size_t i = 0; i < table.learning_sizes.size(); ++i) {
    std::string n = std::to_string(table.learning_sizes[i]);
    out << n << std::string(6 - std::min<std::size_t>(6, n.size()), ' ');
    for (std::size_t j = 0; j < table.models.size(); ++j)
      out << "  " << format_fixed(table.mean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 3);
    out << '\n';
  }
  return out.str();
}

std::string metadata_json(const ExperimentConfig& config, const ExperimentResult& result,
                          const std::vector<ModelRoc>& rocs, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["tool"] = "credit-transfer";
  j["version"] = std::string(kToolVersion);
  j["seed"] = config.seed;
  j["dataset"] = {{"path", meta.dataset_path},
                  {"fnv1a64", meta.dataset_hash},
                  {"source_size", meta.source_size},
                  {"target_size", meta.target_size}};
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (LinkModel m : config.models) models.push_back(std::string(to_string(m)));
  j["config"] = {{"learning_sizes", config.learning_sizes},
                 {"repetitions", config.repetitions},
                 {"models", models},
                 {"threshold", config.threshold},
                 {"stratified", config.stratified},
                 {"roc_learning_size", config.roc_size},
                 {"fit",
                  {{"max_iterations", config.fit.max_iterations},
                   {"gradient_tolerance", config.fit.gradient_tolerance},
                   {"ridge", config.fit.ridge}}}};
  j["splits"] = {
      {"generator", "SplitMix64"},
      {"stream", "derive_stream(seed, {learning_size, repetition})"},
      {"sampling", config.stratified ? "stratified by label, without replacement"
                                     : "uniform without replacement (partial Fisher-Yates)"},
      {"test_sample", "complement of the learning sample"},
      {"shared_across_models", true},
      {"shared_across_learning_sizes", false}};
  j["source_fit"] = {{"converged", result.source_fit.converged},
                     {"iterations", result.source_fit.iterations},
                     {"log_likelihood", result.source_fit.log_likelihood},
                     {"gradient_norm", result.source_fit.gradient_norm}};
  std::size_t failures = 0;
  std::size_t unconverged = 0;
  for (const auto& r : result.records) {
    failures += r.failed ? 1 : 0;
    unconverged += (!r.failed && !r.converged) ? 1 : 0;
  }
  j["records"] = {{"total", result.records.size()},
                  {"failed", failures},
                  {"not_converged", unconverged}};
  nlohmann::ordered_json auc = nlohmann::ordered_json::object();
  for (const auto& r : rocs) auc[std::string(to_string(r.model))] = r.curve.auc;
  j["roc_auc"] = auc;
  return j.dump(2) + "\n";
}

void write_roc_outputs(const std::filesystem::path& directory, const std::vector<ModelRoc>& rocs) {
  std::filesystem::create_directories(directory);
  std::vector<NamedCurve> named;
  for (const auto& r : rocs) {
    write_file(directory / ("roc_" + std::string(to_string(r.model)) + ".csv"), roc_csv(r.curve));
    named.push_back({std::string(to_string(r.model)), r.curve});
  }
  write_file(directory / "roc_all.svg", roc_svg(named));
}

void write_experiment_outputs(const std::filesystem::path& directory,
                              const ExperimentConfig& config, const ExperimentResult& result,
                              const std::vector<ModelRoc>& rocs, const RunMetadata& meta) {
  std::filesystem::create_directories(directory);
  for (const auto& table : result.tables)
    write_file(directory / ("tables_" + std::string(to_string(table.metric)) + ".csv"),
               table_csv(table));
  write_file(directory / "raw_records.csv", raw_records_csv(result.records));
  write_roc_outputs(directory, rocs);
  write_file(directory / "metadata.json", metadata_json(config, result, rocs, meta));
}

}  // namespace credit_transfer
