#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "credit_transfer/dataset.hpp"
#include "credit_transfer/logistic.hpp"

namespace credit_transfer {

/// Constraint patterns linking the target score function to the source one.
///
///   M1  c = 0,   Lambda = I           no target data used
///   M2  c = 0,   Lambda = lambda I
///   M3  c free,  Lambda = I
///   M4  c free,  Lambda = lambda I
///   M5  c = 0,   Lambda diagonal
///   M6  c free,  Lambda diagonal
///   M7  plain refit on source sample plus target learning sample
enum class LinkModel { M1, M2, M3, M4, M5, M6, M7 };

inline constexpr std::array<LinkModel, 7> kAllLinkModels{
    LinkModel::M1, LinkModel::M2, LinkModel::M3, LinkModel::M4,
    LinkModel::M5, LinkModel::M6, LinkModel::M7};

std::string_view to_string(LinkModel kind);
/// Accepts "M1".."M7" (case-insensitive); throws std::invalid_argument otherwise.
LinkModel parse_link_model(std::string_view text);

/// Number of free parameters estimated for a feature dimension d.
Eigen::Index free_parameter_count(LinkModel kind, Eigen::Index dimension);

/// Coefficients with |beta_j| at or below this carry no information about lambda_j.
inline constexpr double kIdentifiableThreshold = 1e-10;

/// Transition parameters (c, diag Lambda).
struct TransitionParams {
  double shift = 0.0;
  Eigen::VectorXd scale;
  /// False where the source coefficient is (numerically) zero and the scale
  /// entry is reported as 1 by convention.
  std::vector<bool> identifiable;

  static TransitionParams identity(Eigen::Index dimension);
};

struct TransferFit {
  LinkModel kind = LinkModel::M1;
  std::optional<TransitionParams> transition;  // empty for M7
  LogisticParams target_params;
  /// Unpenalized log-likelihood of target_params on the target learning sample.
  double log_likelihood = 0.0;
  bool converged = true;
  int iterations = 0;
  double gradient_norm = 0.0;
  /// Coordinates actually moved by the optimizer.
  Eigen::Index free_parameters = 0;
};

/// beta0* = beta0 + c, beta* = Lambda beta.
LogisticParams compose(const LogisticParams& source, const TransitionParams& transition);

/// M1: the source score function unchanged. Reads no target data.
TransferFit identity_transfer(const LogisticParams& source);

/// Maximizes the target learning-sample likelihood over the free transition
/// parameters of `kind` (M1..M6) with the source parameters held fixed.
/// Optimization starts at the identity link. The ridge of `config` penalizes
/// c^2, (lambda - 1)^2 and (Lambda_jj - 1)^2.
TransferFit estimate_transition(LinkModel kind, const LogisticParams& source,
                                const LabeledSample& learning, const FitConfig& config = {});

/// M7: fit_mle on the source sample stacked with the target learning sample.
TransferFit fit_m7(const LabeledSample& source_sample, const LabeledSample& learning,
                   const FitConfig& config = {});

/// Dispatches to estimate_transition or fit_m7.
TransferFit estimate_link_model(LinkModel kind, const LogisticParams& source_params,
                                const LabeledSample& source_sample, const LabeledSample& learning,
                                const FitConfig& config = {});

double score_target(const TransferFit& fit, const Eigen::VectorXd& x);

}  // namespace credit_transfer
