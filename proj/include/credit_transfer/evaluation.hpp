#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace credit_transfer {

/// Positive class is label 1 (creditworthy).
struct ConfusionCounts {
  std::int64_t true_positive = 0;
  std::int64_t false_positive = 0;
  std::int64_t true_negative = 0;
  std::int64_t false_negative = 0;

  std::int64_t total() const {
    return true_positive + false_positive + true_negative + false_negative;
  }
  std::int64_t negatives() const { return false_positive + true_negative; }
  std::int64_t positives() const { return false_negative + true_positive; }

  bool operator==(const ConfusionCounts&) const = default;
};

/// Rates at one cut-off.
///   test_error = (FP + FN) / total
///   type_i     = FP / (FP + TN)   a non-creditworthy applicant accepted
///   type_ii    = FN / (FN + TP)   a creditworthy applicant rejected
/// A conditional rate whose class is absent is 0 and flagged undefined.
struct ErrorReport {
  double test_error = 0.0;
  double type_i = 0.0;
  double type_ii = 0.0;
  double threshold = 0.5;
  bool type_i_undefined = false;
  bool type_ii_undefined = false;
};

/// Predicts 1 iff score >= threshold. Threshold must lie in (0, 1).
ConfusionCounts confusion(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels,
                          double threshold);

ErrorReport error_report(const ConfusionCounts& counts, double threshold);

/// One threshold of the sweep. The primary axes are x = type II rate and
/// y = 1 - type I rate; fpr/tpr are the conventional axes for the same cut.
struct RocPoint {
  double threshold = 0.0;
  double x = 0.0;
  double y = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending threshold
  double auc = 0.0;
};

/// Sweeps the lower sentinel (0, or the minimum score if lower), every
/// distinct score, and the upper sentinel (1, or just above the maximum
/// score). Consecutive cuts with identical rates are merged, keeping the
/// lowest threshold. AUC is the trapezoid area under (x, y).
/// Throws std::invalid_argument unless both labels occur.
RocCurve roc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

/// CSV with columns threshold,x,y,fpr,tpr at full precision.
std::string roc_csv(const RocCurve& curve);

struct NamedCurve {
  std::string name;
  RocCurve curve;
};

/// Standalone 600x600 SVG line chart with the diagonal as reference.
std::string roc_svg(const std::vector<NamedCurve>& curves);

}  // namespace credit_transfer
