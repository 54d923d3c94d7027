#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "credit_transfer/dataset.hpp"

namespace credit_transfer {

/// Intercept and coefficient vector of a logistic score function.
struct LogisticParams {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;

  Eigen::Index dimension() const { return coefficients.size(); }
  /// (intercept, coefficients...) stacked into one vector of length d + 1.
  Eigen::VectorXd stacked() const;
  static LogisticParams from_stacked(const Eigen::VectorXd& theta);
  static LogisticParams zero(Eigen::Index dimension);

  bool operator==(const LogisticParams&) const = default;
};

struct FitConfig {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  /// L2 penalty on coefficients (never the intercept).
  double ridge = 1e-8;
};

struct FitReport {
  LogisticParams params;
  /// Penalized log-likelihood at `params`.
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  /// Objective after each accepted step, starting with the initial point.
  std::vector<double> trace;
};

// -- scalar kernels ---------------------------------------------------------

/// log(1 + exp(eta)) without overflow.
template <typename Scalar>
Scalar log1p_exp(Scalar eta) {
  using std::exp;
  using std::log1p;
  return eta > Scalar(0) ? eta + log1p(exp(-eta)) : log1p(exp(eta));
}

/// Logistic function exp(eta) / (1 + exp(eta)), evaluated on the side that
/// cannot overflow.
template <typename Scalar>
Scalar sigmoid(Scalar eta) {
  using std::exp;
  if (eta >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-eta));
  const Scalar e = exp(eta);
  return e / (Scalar(1) + e);
}

/// Sigmoid kept strictly inside (0, 1) for every finite input.
template <typename Scalar>
Scalar probability(Scalar eta) {
  const Scalar p = sigmoid(eta);
  const Scalar lo = std::numeric_limits<Scalar>::denorm_min();
  const Scalar hi = Scalar(1) - std::numeric_limits<Scalar>::epsilon() / Scalar(2);
  return p < lo ? lo : (p > hi ? hi : p);
}

/// Bernoulli log-likelihood sum_i y_i eta_i - log(1 + exp(eta_i)).
template <typename DerivedEta, typename DerivedY>
double bernoulli_log_likelihood(const Eigen::MatrixBase<DerivedEta>& eta,
                                const Eigen::MatrixBase<DerivedY>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    total += labels[i] * eta[i] - log1p_exp(static_cast<double>(eta[i]));
  return total;
}

// -- score function ---------------------------------------------------------

/// beta0 + X beta for every row of X.
Eigen::VectorXd linear_predictor(const LogisticParams& params, const Eigen::MatrixXd& features);

/// P(Y = 1 | x) under `params`.
double score(const LogisticParams& params, const Eigen::VectorXd& x);
Eigen::VectorXd score_rows(const LogisticParams& params, const Eigen::MatrixXd& features);

/// 1 when score(params, x) >= threshold, else 0. Threshold must lie in (0, 1).
int classify(const LogisticParams& params, const Eigen::VectorXd& x, double threshold);

// -- objective and derivatives ----------------------------------------------

double log_likelihood(const LogisticParams& params, const LabeledSample& sample,
                      double ridge = 0.0);
/// d/d(beta0, beta) of log_likelihood, length d + 1.
Eigen::VectorXd gradient(const LogisticParams& params, const LabeledSample& sample,
                         double ridge = 0.0);
Eigen::MatrixXd hessian(const LogisticParams& params, const LabeledSample& sample,
                        double ridge = 0.0);

// -- fitting ----------------------------------------------------------------

/// Penalized logistic likelihood over an offset design:
///   eta = offset + design * theta
///   objective = sum_i y_i eta_i - log(1 + exp(eta_i))
///               - ridge/2 * sum_k weight_k (theta_k - center_k)^2
/// Every transfer model and the plain maximum-likelihood fit reduce to this.
struct OffsetLogisticProblem {
  Eigen::MatrixXd design;
  Eigen::VectorXd offset;
  Eigen::VectorXd labels;
  Eigen::VectorXd center;
  Eigen::VectorXd penalty_weights;
  double ridge = 0.0;

  double objective(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  /// Negated Hessian (positive semi-definite).
  Eigen::MatrixXd information(const Eigen::VectorXd& theta) const;
};

struct NewtonResult {
  Eigen::VectorXd theta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::vector<double> trace;
};

/// Newton ascent with step halving from `start`. A step is accepted only if
/// it does not decrease the objective; when the Newton system cannot be
/// solved the gradient direction is used instead.
NewtonResult maximize(const OffsetLogisticProblem& problem, const Eigen::VectorXd& start,
                      const FitConfig& config);

/// Maximum-likelihood fit of intercept and coefficients.
/// Throws NumericalError for a single-class sample when ridge == 0.
FitReport fit_mle(const LabeledSample& sample, const FitConfig& config = {});

/// Single-class samples have no finite unpenalized optimum.
bool has_both_labels(const Eigen::VectorXd& labels);

}  // namespace credit_transfer
