#include "credit_transfer/logistic.hpp"

#include <stdexcept>
#include <string>

#include "credit_transfer/errors.hpp"

namespace credit_transfer {

namespace {

void check_dimension(const LogisticParams& params, Eigen::Index d, const char* where) {
  if (params.dimension() != d)
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (params " +
                                std::to_string(params.dimension()) + ", data " +
                                std::to_string(d) + ")");
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& features) {
  Eigen::MatrixXd design(features.rows(), features.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(features.cols()) = features;
  return design;
}

Eigen::VectorXd coefficient_weights(Eigen::Index d) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(d + 1);
  w[0] = 0.0;
  return w;
}

// Exact objective change for theta -> theta + delta. Each likelihood term is
// log1p(expm1(h) * p), which keeps full relative precision even when the
// change is far below the rounding error of the objective itself.
double objective_change(const OffsetLogisticProblem& problem, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& eta, const Eigen::VectorXd& delta) {
  const Eigen::VectorXd shift = problem.design * delta;
  double change = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double h = shift[i];
    double term = std::log1p(std::expm1(h) * sigmoid(eta[i]));
    if (!std::isfinite(term)) term = log1p_exp(eta[i] + h) - log1p_exp(eta[i]);
    change += problem.labels[i] * h - term;
  }
  const Eigen::VectorXd from_center = theta - problem.center;
  change -= 0.5 * problem.ridge *
            (problem.penalty_weights.array() * delta.array() *
             (2.0 * from_center.array() + delta.array()))
                .sum();
  return change;
}

}  // namespace

Eigen::VectorXd LogisticParams::stacked() const {
  Eigen::VectorXd theta(dimension() + 1);
  theta << intercept, coefficients;
  return theta;
}

LogisticParams LogisticParams::from_stacked(const Eigen::VectorXd& theta) {
  if (theta.size() < 1) throw std::invalid_argument("LogisticParams::from_stacked: empty vector");
  return {theta[0], theta.tail(theta.size() - 1)};
}

LogisticParams LogisticParams::zero(Eigen::Index dimension) {
  return {0.0, Eigen::VectorXd::Zero(dimension)};
}

Eigen::VectorXd linear_predictor(const LogisticParams& params, const Eigen::MatrixXd& features) {
  check_dimension(params, features.cols(), "linear_predictor");
  return (features * params.coefficients).array() + params.intercept;
}

double score(const LogisticParams& params, const Eigen::VectorXd& x) {
  check_dimension(params, x.size(), "score");
  return probability(params.intercept + params.coefficients.dot(x));
}

Eigen::VectorXd score_rows(const LogisticParams& params, const Eigen::MatrixXd& features) {
  return linear_predictor(params, features).unaryExpr([](double eta) { return probability(eta); });
}

int classify(const LogisticParams& params, const Eigen::VectorXd& x, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("classify: threshold must lie in (0, 1)");
  return score(params, x) >= threshold ? 1 : 0;
}

double log_likelihood(const LogisticParams& params, const LabeledSample& sample, double ridge) {
  const Eigen::VectorXd eta = linear_predictor(params, sample.features());
  return bernoulli_log_likelihood(eta, sample.labels()) -
         0.5 * ridge * params.coefficients.squaredNorm();
}

Eigen::VectorXd gradient(const LogisticParams& params, const LabeledSample& sample, double ridge) {
  const OffsetLogisticProblem problem{with_intercept(sample.features()),
                                      Eigen::VectorXd::Zero(sample.size()),
                                      sample.labels(),
                                      Eigen::VectorXd::Zero(sample.dimension() + 1),
                                      coefficient_weights(sample.dimension()),
                                      ridge};
  check_dimension(params, sample.dimension(), "gradient");
  return problem.gradient(params.stacked());
}

Eigen::MatrixXd hessian(const LogisticParams& params, const LabeledSample& sample, double ridge) {
  const OffsetLogisticProblem problem{with_intercept(sample.features()),
                                      Eigen::VectorXd::Zero(sample.size()),
                                      sample.labels(),
                                      Eigen::VectorXd::Zero(sample.dimension() + 1),
                                      coefficient_weights(sample.dimension()),
                                      ridge};
  check_dimension(params, sample.dimension(), "hessian");
  return -problem.information(params.stacked());
}

double OffsetLogisticProblem::objective(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd eta = offset + design * theta;
  const Eigen::VectorXd from_center = theta - center;
  return bernoulli_log_likelihood(eta, labels) -
         0.5 * ridge * (penalty_weights.array() * from_center.array().square()).sum();
}

Eigen::VectorXd OffsetLogisticProblem::gradient(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd eta = offset + design * theta;
  const Eigen::VectorXd residual = labels - eta.unaryExpr([](double e) { return sigmoid(e); });
  return design.transpose() * residual -
         ridge * (penalty_weights.array() * (theta - center).array()).matrix();
}

Eigen::MatrixXd OffsetLogisticProblem::information(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd eta = offset + design * theta;
  const Eigen::VectorXd weight = eta.unaryExpr([](double e) {
    const double p = sigmoid(e);
    return p * (1.0 - p);
  });
  Eigen::MatrixXd info = design.transpose() * weight.asDiagonal() * design;
  info.diagonal() += ridge * penalty_weights;
  return info;
}

NewtonResult maximize(const OffsetLogisticProblem& problem, const Eigen::VectorXd& start,
                      const FitConfig& config) {
  if (!(config.gradient_tolerance > 0.0))
    throw std::invalid_argument("maximize: gradient tolerance must be positive");
  if (config.max_iterations < 0) throw std::invalid_argument("maximize: negative iteration cap");
  const Eigen::Index p = problem.design.cols();
  if (start.size() != p || problem.center.size() != p || problem.penalty_weights.size() != p ||
      problem.offset.size() != problem.design.rows() ||
      problem.labels.size() != problem.design.rows())
    throw std::invalid_argument("maximize: inconsistent problem dimensions");

  NewtonResult result;
  result.theta = start;
  double value = problem.objective(start);
  if (!std::isfinite(value)) throw NumericalError("maximize: objective not finite at start");
  result.trace.push_back(value);

  for (;;) {
    const Eigen::VectorXd g = problem.gradient(result.theta);
    result.gradient_norm = g.norm();
    if (result.gradient_norm <= config.gradient_tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= config.max_iterations) break;

    const Eigen::LDLT<Eigen::MatrixXd> factor(problem.information(result.theta));
    Eigen::VectorXd direction;
    if (factor.info() == Eigen::Success && factor.isPositive()) direction = factor.solve(g);
    if (direction.size() != p || !direction.allFinite() || !(g.dot(direction) > 0.0))
      direction = g / std::max(1.0, g.norm());

    const Eigen::VectorXd eta = problem.offset + problem.design * result.theta;
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      const Eigen::VectorXd delta = step * direction;
      const double change = objective_change(problem, result.theta, eta, delta);
      if (std::isfinite(change) && change >= 0.0) {
        result.theta += delta;
        value += change;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++result.iterations;
    result.trace.push_back(value);
  }

  result.objective = problem.objective(result.theta);
  return result;
}

bool has_both_labels(const Eigen::VectorXd& labels) {
  return (labels.array() == 1.0).any() && (labels.array() == 0.0).any();
}

FitReport fit_mle(const LabeledSample& sample, const FitConfig& config) {
  if (sample.dimension() < 1) throw std::invalid_argument("fit_mle: need at least one feature");
  if (config.ridge < 0.0) throw std::invalid_argument("fit_mle: ridge must be non-negative");
  if (config.ridge == 0.0 && !has_both_labels(sample.labels()))
    throw NumericalError("separation/degenerate labels: sample contains a single class");

  const Eigen::Index d = sample.dimension();
  const OffsetLogisticProblem problem{with_intercept(sample.features()),
                                      Eigen::VectorXd::Zero(sample.size()),
                                      sample.labels(),
                                      Eigen::VectorXd::Zero(d + 1),
                                      coefficient_weights(d),
                                      config.ridge};
  NewtonResult newton = maximize(problem, Eigen::VectorXd::Zero(d + 1), config);
  return {LogisticParams::from_stacked(newton.theta), newton.objective, newton.iterations,
          newton.converged, newton.gradient_norm, std::move(newton.trace)};
}

}  // namespace credit_transfer
