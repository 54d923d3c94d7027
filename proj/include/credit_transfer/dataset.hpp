#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace credit_transfer {

/// Which subpopulation a sample was drawn from.
enum class Subpopulation { Source, Target, Pooled };

std::string_view to_string(Subpopulation tag);

/// One applicant: numeric feature codes and the repayment label (1 = creditworthy).
struct CreditRecord {
  Eigen::VectorXd features;
  int label = 0;
};

/// A non-empty labelled design matrix. Rows are records, columns are features.
class LabeledSample {
 public:
  LabeledSample(Eigen::MatrixXd features, Eigen::VectorXd labels,
                std::vector<std::string> feature_names,
                Subpopulation tag = Subpopulation::Pooled);

  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  Subpopulation subpopulation() const { return tag_; }

  Eigen::Index size() const { return features_.rows(); }
  Eigen::Index dimension() const { return features_.cols(); }

  CreditRecord record(Eigen::Index row) const;
  Eigen::Index count_label(int label) const;

  /// Column index of a feature; throws DataError when absent.
  Eigen::Index column(std::string_view name) const;

  /// Rows in the given order; throws DataError when the selection is empty.
  LabeledSample rows(const std::vector<Eigen::Index>& indices, Subpopulation tag) const;
  LabeledSample without_column(Eigen::Index col) const;
  LabeledSample with_tag(Subpopulation tag) const;

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  std::vector<std::string> feature_names_;
  Subpopulation tag_;
};

/// Rows of `first` followed by rows of `second`; feature names must agree.
LabeledSample concatenate(const LabeledSample& first, const LabeledSample& second,
                          Subpopulation tag = Subpopulation::Pooled);

/// Reads a comma-separated file with a header row and numeric cells. The
/// target column becomes the label and is removed from the features.
LabeledSample load_csv(const std::filesystem::path& path, std::string_view target_column);

/// Parses CSV text; `origin` names the source in error messages.
LabeledSample parse_csv(std::string_view text, std::string_view target_column,
                        std::string_view origin = "<memory>");

/// Writes the sample with the label as the first column, full precision.
void write_csv(const std::filesystem::path& path, const LabeledSample& sample,
               std::string_view target_column);

struct SubpopulationSplit {
  LabeledSample source;
  LabeledSample target;
};

/// Rows with split value > 1 form the source, rows equal to 1 the target.
/// The split column is dropped from both outputs.
SubpopulationSplit split_by_account_status(const LabeledSample& sample,
                                           std::string_view split_column);

struct SplitPlan {
  Eigen::Index learning_size = 0;
  int repetitions = 1;
  std::uint64_t seed = 0;
  bool stratified = false;
};

struct LearningTestSplit {
  LabeledSample learning;
  LabeledSample test;
  std::vector<Eigen::Index> learning_rows;  // ascending row indices into the target
  std::vector<Eigen::Index> test_rows;
};

/// Draws `plan.learning_size` target rows without replacement; the test
/// sample is the complement. The stream depends only on
/// (plan.seed, plan.learning_size, repetition_index).
LearningTestSplit draw_split(const LabeledSample& target, const SplitPlan& plan,
                             int repetition_index);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xCBF29CE484222325ULL);

/// FNV-1a 64 over a canonical text rendering of labels and features.
std::uint64_t content_hash(const LabeledSample& sample);

}  // namespace credit_transfer
