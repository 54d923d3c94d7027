#include "credit_transfer/link_models.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

#include "credit_transfer/errors.hpp"

namespace credit_transfer {

namespace {

struct Reparameterization {
  OffsetLogisticProblem problem;
  bool has_shift = false;
  bool common_scale = false;
  bool diagonal = false;
  std::vector<Eigen::Index> free_columns;  // identifiable feature columns for M5/M6
};

// Builds the offset-logistic problem whose free vector is, by kind:
//   M2 (lambda)          design u = X beta,     offset beta0
//   M3 (c)               design 1,              offset beta0 + X beta
//   M4 (c, lambda)       design [1, u],         offset beta0
//   M5 (gamma_J)         design X_J,            offset beta0
//   M6 (c, gamma_J)      design [1, X_J],       offset beta0
// where gamma = Lambda beta restricted to identifiable columns J. The penalty
// on (Lambda_jj - 1)^2 becomes (gamma_j - beta_j)^2 / beta_j^2.
Reparameterization build_problem(LinkModel kind, const LogisticParams& source,
                                 const LabeledSample& learning, double ridge) {
  const Eigen::Index n = learning.size();
  const Eigen::MatrixXd& x = learning.features();
  const Eigen::VectorXd& beta = source.coefficients;
  const Eigen::VectorXd projected = x * beta;

  Reparameterization r;
  r.problem.labels = learning.labels();
  r.problem.ridge = ridge;
  r.has_shift = kind == LinkModel::M3 || kind == LinkModel::M4 || kind == LinkModel::M6;
  r.common_scale = kind == LinkModel::M2 || kind == LinkModel::M4;
  r.diagonal = kind == LinkModel::M5 || kind == LinkModel::M6;

  std::vector<Eigen::MatrixXd> blocks;
  std::vector<double> center;
  std::vector<double> weight;
  if (r.has_shift) {
    blocks.emplace_back(Eigen::MatrixXd::Ones(n, 1));
    center.push_back(0.0);
    weight.push_back(1.0);
  }
  if (r.common_scale) {
    blocks.emplace_back(projected);
    center.push_back(1.0);
    weight.push_back(1.0);
  }
  if (r.diagonal) {
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      if (std::abs(beta[j]) <= kIdentifiableThreshold) continue;
      r.free_columns.push_back(j);
      center.push_back(beta[j]);
      weight.push_back(1.0 / (beta[j] * beta[j]));
    }
    Eigen::MatrixXd selected(n, static_cast<Eigen::Index>(r.free_columns.size()));
    for (std::size_t k = 0; k < r.free_columns.size(); ++k)
      selected.col(static_cast<Eigen::Index>(k)) = x.col(r.free_columns[k]);
    blocks.push_back(std::move(selected));
  }

  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  r.problem.design.resize(n, cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    r.problem.design.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  r.problem.center = Eigen::Map<const Eigen::VectorXd>(center.data(), static_cast<Eigen::Index>(center.size()));
  r.problem.penalty_weights = Eigen::Map<const Eigen::VectorXd>(weight.data(), static_cast<Eigen::Index>(weight.size()));

  r.problem.offset = Eigen::VectorXd::Constant(n, source.intercept);
  if (kind == LinkModel::M3) r.problem.offset += projected;
  return r;
}

TransitionParams unpack(const Reparameterization& r, const LogisticParams& source,
                        const Eigen::VectorXd& theta) {
  const Eigen::Index d = source.dimension();
  TransitionParams t = TransitionParams::identity(d);
  Eigen::Index at = 0;
  if (r.has_shift) t.shift = theta[at++];
  if (r.common_scale) t.scale.setConstant(theta[at++]);
  if (r.diagonal) {
    std::fill(t.identifiable.begin(), t.identifiable.end(), false);
    for (Eigen::Index j : r.free_columns) {
      t.scale[j] = theta[at++] / source.coefficients[j];
      t.identifiable[static_cast<std::size_t>(j)] = true;
    }
  }
  return t;
}

}  // namespace

std::string_view to_string(LinkModel kind) {
  switch (kind) {
    case LinkModel::M1: return "M1";
    case LinkModel::M2: return "M2";
    case LinkModel::M3: return "M3";
    case LinkModel::M4: return "M4";
    case LinkModel::M5: return "M5";
    case LinkModel::M6: return "M6";
    case LinkModel::M7: return "M7";
  }
  return "M1";
}

LinkModel parse_link_model(std::string_view text) {
  if (text.size() == 2 && (text[0] == 'M' || text[0] == 'm') && text[1] >= '1' && text[1] <= '7')
    return kAllLinkModels[static_cast<std::size_t>(text[1] - '1')];
  throw std::invalid_argument("unknown link model '" + std::string(text) + "' (expected M1..M7)");
}

Eigen::Index free_parameter_count(LinkModel kind, Eigen::Index dimension) {
  switch (kind) {
    case LinkModel::M1: return 0;
    case LinkModel::M2: return 1;
    case LinkModel::M3: return 1;
    case LinkModel::M4: return 2;
    case LinkModel::M5: return dimension;
    case LinkModel::M6: return dimension + 1;
    case LinkModel::M7: return dimension + 1;
  }
  return 0;
}

TransitionParams TransitionParams::identity(Eigen::Index dimension) {
  return {0.0, Eigen::VectorXd::Ones(dimension),
          std::vector<bool>(static_cast<std::size_t>(dimension), true)};
}

LogisticParams compose(const LogisticParams& source, const TransitionParams& transition) {
  if (transition.scale.size() != source.dimension())
    throw std::invalid_argument("compose: scale length does not match coefficient length");
  return {source.intercept + transition.shift,
          transition.scale.cwiseProduct(source.coefficients)};
}

TransferFit identity_transfer(const LogisticParams& source) {
  TransferFit fit;
  fit.kind = LinkModel::M1;
  fit.transition = TransitionParams::identity(source.dimension());
  fit.target_params = compose(source, *fit.transition);
  fit.converged = true;
  return fit;
}

TransferFit estimate_transition(LinkModel kind, const LogisticParams& source,
                                const LabeledSample& learning, const FitConfig& config) {
  if (kind == LinkModel::M7)
    throw std::invalid_argument("estimate_transition: M7 has no transition parameters");
  if (source.dimension() != learning.dimension())
    throw std::invalid_argument("estimate_transition: dimension mismatch");
  if (config.ridge < 0.0) throw std::invalid_argument("estimate_transition: negative ridge");

  if (kind == LinkModel::M1) {
    // Estimation ignores the learning sample; the likelihood is only reported.
    TransferFit fit = identity_transfer(source);
    fit.log_likelihood = log_likelihood(fit.target_params, learning);
    return fit;
  }
  if (config.ridge == 0.0 && !has_both_labels(learning.labels()))
    throw NumericalError("separation/degenerate labels: learning sample contains a single class");

  const Reparameterization r = build_problem(kind, source, learning, config.ridge);
  const NewtonResult newton = maximize(r.problem, r.problem.center, config);

  TransferFit fit;
  fit.kind = kind;
  fit.transition = unpack(r, source, newton.theta);
  fit.target_params = compose(source, *fit.transition);
  fit.log_likelihood = log_likelihood(fit.target_params, learning);
  fit.converged = newton.converged;
  fit.iterations = newton.iterations;
  fit.gradient_norm = newton.gradient_norm;
  fit.free_parameters = r.problem.design.cols();
  return fit;
}

TransferFit fit_m7(const LabeledSample& source_sample, const LabeledSample& learning,
                   const FitConfig& config) {
  if (source_sample.feature_names() != learning.feature_names())
    throw std::invalid_argument("fit_m7: source and learning samples have different features");
  const FitReport report = fit_mle(concatenate(source_sample, learning), config);
  TransferFit fit;
  fit.kind = LinkModel::M7;
  fit.target_params = report.params;
  fit.log_likelihood = log_likelihood(fit.target_params, learning);
  fit.converged = report.converged;
  fit.iterations = report.iterations;
  fit.gradient_norm = report.gradient_norm;
  fit.free_parameters = learning.dimension() + 1;
  return fit;
}

TransferFit estimate_link_model(LinkModel kind, const LogisticParams& source_params,
                                const LabeledSample& source_sample, const LabeledSample& learning,
                                const FitConfig& config) {
  if (kind == LinkModel::M7) return fit_m7(source_sample, learning, config);
  return estimate_transition(kind, source_params, learning, config);
}

double score_target(const TransferFit& fit, const Eigen::VectorXd& x) {
  return score(fit.target_params, x);
}

}  // namespace credit_transfer
