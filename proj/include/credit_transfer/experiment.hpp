#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "credit_transfer/dataset.hpp"
#include "credit_transfer/evaluation.hpp"
#include "credit_transfer/link_models.hpp"
#include "credit_transfer/logistic.hpp"

namespace credit_transfer {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Metric { TestError, TypeI, TypeII };
std::string_view to_string(Metric metric);

struct ExperimentConfig {
  std::vector<Eigen::Index> learning_sizes{50, 100, 150, 200};
  int repetitions = 50;
  std::uint64_t seed = 42;
  std::vector<LinkModel> models{kAllLinkModels.begin(), kAllLinkModels.end()};
  double threshold = 0.5;
  FitConfig fit{};
  bool stratified = false;
  /// Learning size of the single split used for ROC curves.
  Eigen::Index roc_size = 200;

  /// Throws std::invalid_argument when the config cannot run on a target of
  /// the given size.
  void validate(Eigen::Index target_size) const;
};

/// One (learning size, repetition, model) evaluation.
struct RawRecord {
  Eigen::Index learning_size = 0;
  int repetition = 0;
  LinkModel model = LinkModel::M1;
  bool failed = false;
  std::string failure;
  bool converged = false;
  int iterations = 0;
  Eigen::Index free_parameters = 0;
  double log_likelihood = 0.0;
  ConfusionCounts counts;
  ErrorReport report;
};

/// Mean and standard deviation of one metric per (learning size, model).
struct ResultTable {
  Metric metric = Metric::TestError;
  std::vector<Eigen::Index> learning_sizes;
  std::vector<LinkModel> models;
  Eigen::MatrixXd mean;      // rows: learning sizes, cols: models
  Eigen::MatrixXd std_dev;   // sample standard deviation (n - 1)
  Eigen::MatrixXi evaluated;
  Eigen::MatrixXi failed;

  /// Throws std::out_of_range for a missing cell.
  double mean_at(Eigen::Index learning_size, LinkModel model) const;
};

struct ExperimentResult {
  FitReport source_fit;
  std::vector<RawRecord> records;  // sorted by (learning size, repetition, model)
  std::array<ResultTable, 3> tables;
};

/// Fits the source model once, then for every learning size and repetition
/// draws one learning/test split of the target, fits every configured model
/// on it and evaluates the test sample at the threshold. Work units run on
/// `jobs` threads (0 = hardware concurrency); results do not depend on it.
ExperimentResult run_experiment(const LabeledSample& source, const LabeledSample& target,
                                const ExperimentConfig& config, int jobs = 1);

/// Per-cell means over non-failed records, reduced in record order.
std::array<ResultTable, 3> aggregate(const std::vector<RawRecord>& records,
                                     const ExperimentConfig& config);

struct ModelRoc {
  LinkModel model;
  RocCurve curve;
};

/// ROC curve of every configured model on the test sample of repetition 0
/// at learning size `learning_size`.
std::vector<ModelRoc> emit_roc_suite(const LabeledSample& source, const LabeledSample& target,
                                     const ExperimentConfig& config, Eigen::Index learning_size);

std::string table_csv(const ResultTable& table);
std::string raw_records_csv(const std::vector<RawRecord>& records);
/// Fixed-width console table with means to 3 decimals.
std::string format_table(const ResultTable& table);

/// Identifying information written next to the results.
struct RunMetadata {
  std::string dataset_path;
  std::string dataset_hash;
  Eigen::Index source_size = 0;
  Eigen::Index target_size = 0;
};

std::string metadata_json(const ExperimentConfig& config, const ExperimentResult& result,
                          const std::vector<ModelRoc>& rocs, const RunMetadata& meta);

/// Writes tables_*.csv, raw_records.csv, roc_<model>.csv, roc_all.svg and
/// metadata.json into `directory` (created if needed).
void write_experiment_outputs(const std::filesystem::path& directory,
                              const ExperimentConfig& config, const ExperimentResult& result,
                              const std::vector<ModelRoc>& rocs, const RunMetadata& meta);

/// Writes roc_<model>.csv and roc_all.svg only.
void write_roc_outputs(const std::filesystem::path& directory, const std::vector<ModelRoc>& rocs);

}  // namespace credit_transfer
