#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "credit_transfer/dataset.hpp"
#include "credit_transfer/logistic.hpp"
#include "credit_transfer/random.hpp"

namespace credit_transfer {

inline constexpr Eigen::Index kMaxGaussianDimension = 32;

struct GaussianClassParams {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Two-class Gaussian mixture. Class index 0 is class k = 1 and is
/// labelled 1 (creditworthy); class index 1 is labelled 0.
struct MixtureSpec {
  std::array<GaussianClassParams, 2> classes;
  std::array<double, 2> proportions{0.5, 0.5};

  Eigen::Index dimension() const { return classes[0].mean.size(); }
  /// Throws std::invalid_argument on shape, symmetry, definiteness or
  /// proportion violations.
  void validate() const;
};

/// x* = diag(scale) x + offset_k for an observation of class k.
struct AffineLink {
  Eigen::VectorXd scale;
  std::array<Eigen::VectorXd, 2> offsets;

  static AffineLink identity(Eigen::Index dimension);
  /// Same offset for both classes.
  static AffineLink common(Eigen::VectorXd scale, const Eigen::VectorXd& offset);
};

/// n i.i.d. draws; label 1 with probability proportions[0].
LabeledSample sample_mixture(const MixtureSpec& spec, Eigen::Index n, std::uint64_t seed);

/// Applies the affine link observation-wise to a sample drawn from `spec`.
LabeledSample push_through_link(const LabeledSample& sample, const AffineLink& link);

/// Target-subpopulation mixture: means Lambda mu_k + alpha_k, covariances
/// Lambda Sigma_k Lambda. Proportions carry over unless overridden.
MixtureSpec apply_link(const MixtureSpec& spec, const AffineLink& link,
                       std::optional<std::array<double, 2>> proportions = std::nullopt);

/// Closed-form logistic parameters of a homoscedastic two-class mixture:
/// beta = Sigma^-1 (mu_1 - mu_2),
/// beta0 = (mu_2' Sigma^-1 mu_2 - mu_1' Sigma^-1 mu_1) / 2 + log(pi_1 / pi_2).
LogisticParams gaussian_to_logistic(const MixtureSpec& spec);

struct LinkConsistencyReport {
  LogisticParams source;
  LogisticParams target;
  double c_observed = 0.0;
  /// beta*_j / beta_j; for beta_j == 0 the implied 1 / scale_j.
  Eigen::VectorXd scale_observed;
  std::vector<bool> scale_identifiable;
  double max_residual = 0.0;
  bool consistent = false;
};

inline constexpr double kLinkConsistencyTolerance = 1e-8;

/// Checks beta*_j = beta_j / scale_j and beta*0 - beta0 = -alpha' beta* for a
/// homoscedastic source and a link whose offset is shared by both classes.
LinkConsistencyReport verify_link_consistency(const MixtureSpec& spec, const AffineLink& link);

struct GaussianInstance {
  MixtureSpec spec;
  AffineLink link;
};

/// Random well-conditioned homoscedastic mixture of dimension d with a random
/// common affine link (scales in [0.5, 2], offsets in [-1, 1]).
GaussianInstance random_homoscedastic_instance(Eigen::Index dimension, SplitMix64& rng);

}  // namespace credit_transfer
