#include "credit_transfer/gaussian_links.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace credit_transfer {

namespace {

Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& covariance) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("covariance is not positive definite");
  return llt;
}

}  // namespace

void MixtureSpec::validate() const {
  const Eigen::Index d = dimension();
  if (d < 1 || d > kMaxGaussianDimension)
    throw std::invalid_argument("MixtureSpec: dimension must be in [1, 32]");
  for (const auto& c : classes) {
    if (c.mean.size() != d || c.covariance.rows() != d || c.covariance.cols() != d)
      throw std::invalid_argument("MixtureSpec: inconsistent class dimensions");
    if ((c.covariance - c.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("MixtureSpec: covariance is not symmetric");
    factorize(c.covariance);
  }
  if (!(proportions[0] >= 0.0 && proportions[1] >= 0.0) ||
      std::abs(proportions[0] + proportions[1] - 1.0) > 1e-12)
    throw std::invalid_argument("MixtureSpec: proportions must be non-negative and sum to 1");
}

AffineLink AffineLink::identity(Eigen::Index dimension) {
  return common(Eigen::VectorXd::Ones(dimension), Eigen::VectorXd::Zero(dimension));
}

AffineLink AffineLink::common(Eigen::VectorXd scale, const Eigen::VectorXd& offset) {
  return {std::move(scale), {offset, offset}};
}

LabeledSample sample_mixture(const MixtureSpec& spec, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  spec.validate();
  const Eigen::Index d = spec.dimension();
  const std::array<Eigen::MatrixXd, 2> roots{factorize(spec.classes[0].covariance).matrixL(),
                                             factorize(spec.classes[1].covariance).matrixL()};
  SplitMix64 rng(seed);
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t k = rng.uniform() < spec.proportions[0] ? 0 : 1;
    for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
    x.row(i) = (spec.classes[k].mean + roots[k] * z).transpose();
    y[i] = k == 0 ? 1.0 : 0.0;
  }
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  return {std::move(x), std::move(y), std::move(names), Subpopulation::Source};
}

LabeledSample push_through_link(const LabeledSample& sample, const AffineLink& link) {
  const Eigen::Index d = sample.dimension();
  if (link.scale.size() != d || link.offsets[0].size() != d || link.offsets[1].size() != d)
    throw std::invalid_argument("push_through_link: dimension mismatch");
  Eigen::MatrixXd x = sample.features() * link.scale.asDiagonal();
  for (Eigen::Index i = 0; i < sample.size(); ++i)
    x.row(i) += link.offsets[sample.labels()[i] == 1.0 ? 0 : 1].transpose();
  return {std::move(x), sample.labels(), sample.feature_names(), Subpopulation::Target};
}

MixtureSpec apply_link(const MixtureSpec& spec, const AffineLink& link,
                       std::optional<std::array<double, 2>> proportions) {
  const Eigen::Index d = spec.dimension();
  if (link.scale.size() != d || link.offsets[0].size() != d || link.offsets[1].size() != d)
    throw std::invalid_argument("apply_link: dimension mismatch");
  MixtureSpec out = spec;
  const auto lambda = link.scale.asDiagonal();
  for (std::size_t k = 0; k < 2; ++k) {
    out.classes[k].mean = lambda * spec.classes[k].mean + link.offsets[k];
    out.classes[k].covariance = lambda * spec.classes[k].covariance * lambda;
  }
  if (proportions) out.proportions = *proportions;
  return out;
}

LogisticParams gaussian_to_logistic(const MixtureSpec& spec) {
  spec.validate();
  const auto& [first, second] = spec.classes;
  if ((first.covariance - second.covariance).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("gaussian_to_logistic: class covariances differ (heteroscedastic)");
  if (!(spec.proportions[0] > 0.0 && spec.proportions[1] > 0.0))
    throw std::invalid_argument("gaussian_to_logistic: proportions must be positive");

  const auto llt = factorize(first.covariance);
  const Eigen::VectorXd w1 = llt.solve(first.mean);
  const Eigen::VectorXd w2 = llt.solve(second.mean);
  LogisticParams params;
  params.coefficients = w1 - w2;
  params.intercept = 0.5 * (second.mean.dot(w2) - first.mean.dot(w1)) +
                     std::log(spec.proportions[0] / spec.proportions[1]);
  return params;
}

LinkConsistencyReport verify_link_consistency(const MixtureSpec& spec, const AffineLink& link) {
  if (link.offsets[0].size() != link.offsets[1].size() ||
      (link.offsets[0] - link.offsets[1]).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("verify_link_consistency: link offsets must be common to both classes");
  if ((link.scale.array() == 0.0).any())
    throw std::invalid_argument("verify_link_consistency: link scale entries must be nonzero");

  LinkConsistencyReport report;
  report.source = gaussian_to_logistic(spec);
  report.target = gaussian_to_logistic(apply_link(spec, link));
  const Eigen::VectorXd& beta = report.source.coefficients;
  const Eigen::VectorXd& beta_star = report.target.coefficients;

  report.c_observed = report.target.intercept - report.source.intercept;
  report.scale_observed.resize(beta.size());
  report.scale_identifiable.assign(static_cast<std::size_t>(beta.size()), true);
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) > 1e-12) {
      report.scale_observed[j] = beta_star[j] / beta[j];
    } else {
      report.scale_observed[j] = 1.0 / link.scale[j];
      report.scale_identifiable[static_cast<std::size_t>(j)] = false;
    }
  }

  const Eigen::VectorXd predicted = beta.cwiseQuotient(link.scale);
  const double coefficient_residual = (beta_star - predicted).cwiseAbs().maxCoeff();
  const double intercept_residual = std::abs(report.c_observed + link.offsets[0].dot(beta_star));
  report.max_residual = std::max(coefficient_residual, intercept_residual);
  report.consistent = report.max_residual <= kLinkConsistencyTolerance;
  return report;
}

GaussianInstance random_homoscedastic_instance(Eigen::Index dimension, SplitMix64& rng) {
  if (dimension < 1 || dimension > kMaxGaussianDimension)
    throw std::invalid_argument("random_homoscedastic_instance: dimension must be in [1, 32]");
  const auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  const Eigen::Index d = dimension;

  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  Eigen::MatrixXd sigma = a * a.transpose() / static_cast<double>(d);
  sigma.diagonal().array() += 1.0;
  sigma = 0.5 * (sigma + sigma.transpose()).eval();

  MixtureSpec spec;
  for (auto& c : spec.classes) {
    c.mean.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) c.mean[j] = uniform(-2.0, 2.0);
    c.covariance = sigma;
  }
  const double pi1 = uniform(0.2, 0.8);
  spec.proportions = {pi1, 1.0 - pi1};

  Eigen::VectorXd scale(d);
  Eigen::VectorXd offset(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    scale[j] = uniform(0.5, 2.0);
    offset[j] = uniform(-1.0, 1.0);
  }
  return {std::move(spec), AffineLink::common(std::move(scale), offset)};
}

}  // namespace credit_transfer
