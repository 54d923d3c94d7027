#include <doctest.h>

#include <cmath>

#include "credit_transfer/errors.hpp"
#include "credit_transfer/link_models.hpp"
#include "credit_transfer/random.hpp"
#include "oracles.hpp"

using namespace credit_transfer;

namespace {

std::vector<std::string> names(Eigen::Index d) {
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < d; ++j) out.push_back("x" + std::to_string(j));
  return out;
}

LabeledSample draw(const LogisticParams& truth, Eigen::Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Eigen::Index d = truth.dimension();
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal();
    y[i] = rng.uniform() < score(truth, x.row(i).transpose()) ? 1.0 : 0.0;
  }
  return {x, y, names(d)};
}

const LogisticParams kSource{0.3, Eigen::Vector3d(1.0, -0.8, 0.5)};

FitConfig exact() {
  FitConfig c;
  c.ridge = 0.0;
  return c;
}

}  // namespace

TEST_CASE("compose examples") {
  const auto id = compose(kSource, TransitionParams::identity(3));
  CHECK(id == kSource);

  LogisticParams src{1.5, Eigen::Vector2d(1, -1)};
  TransitionParams shift = TransitionParams::identity(2);
  shift.shift = 2.0;
  const auto shifted = compose(src, shift);
  CHECK(shifted.intercept == 3.5);
  CHECK(shifted.coefficients == src.coefficients);

  TransitionParams scale = TransitionParams::identity(2);
  scale.scale = Eigen::Vector2d(2, 2);
  CHECK(compose(src, scale).coefficients == Eigen::VectorXd(Eigen::Vector2d(2, -2)));
  scale.scale = Eigen::Vector3d(1, 1, 1);
  CHECK_THROWS_AS(compose(src, scale), std::invalid_argument);
}

TEST_CASE("model names and parameter counts") {
  for (auto kind : kAllLinkModels) CHECK(parse_link_model(to_string(kind)) == kind);
  CHECK(parse_link_model("m4") == LinkModel::M4);
  CHECK_THROWS_AS(parse_link_model("M8"), std::invalid_argument);
  CHECK(free_parameter_count(LinkModel::M1, 19) == 0);
  CHECK(free_parameter_count(LinkModel::M2, 19) == 1);
  CHECK(free_parameter_count(LinkModel::M3, 19) == 1);
  CHECK(free_parameter_count(LinkModel::M4, 19) == 2);
  CHECK(free_parameter_count(LinkModel::M5, 19) == 19);
  CHECK(free_parameter_count(LinkModel::M6, 19) == 20);
  CHECK(free_parameter_count(LinkModel::M7, 19) == 20);
}

TEST_CASE("M1 returns the source parameters whatever the learning sample") {
  const auto a = estimate_transition(LinkModel::M1, kSource, draw(kSource, 40, 1));
  const auto b = estimate_transition(LinkModel::M1, kSource, draw(kSource, 90, 2));
  CHECK(a.target_params == kSource);
  CHECK(b.target_params == kSource);
  CHECK(a.transition->shift == 0.0);
  CHECK(a.transition->scale == Eigen::VectorXd::Ones(3));
  CHECK(a.free_parameters == 0);
  CHECK(a.iterations == 0);
}

TEST_CASE("M3 shift matches a 1-D grid search") {
  TransitionParams truth = TransitionParams::identity(3);
  truth.shift = 0.7;
  const auto learning = draw(compose(kSource, truth), 400, 3);
  const auto fit = estimate_transition(LinkModel::M3, kSource, learning, exact());
  REQUIRE(fit.converged);
  const double grid = oracle::grid_argmax_1d(
      [&](double c) {
        return oracle::naive_log_likelihood(kSource.intercept + c, kSource.coefficients,
                                            learning.features(), learning.labels());
      },
      -5.0, 5.0, 1e-3);
  CHECK(std::abs(fit.transition->shift - grid) <= 2e-3);
  CHECK(fit.transition->scale == Eigen::VectorXd::Ones(3));
}

TEST_CASE("M2 scale matches a 1-D grid search") {
  const auto learning = draw(LogisticParams{kSource.intercept, 1.6 * kSource.coefficients}, 300, 4);
  const auto fit = estimate_transition(LinkModel::M2, kSource, learning, exact());
  REQUIRE(fit.converged);
  const double grid = oracle::grid_argmax_1d(
      [&](double l) {
        return oracle::naive_log_likelihood(kSource.intercept, l * kSource.coefficients,
                                            learning.features(), learning.labels());
      },
      -5.0, 5.0, 1e-3);
  CHECK(std::abs(fit.transition->scale[0] - grid) <= 2e-3);
  CHECK(fit.transition->shift == 0.0);
  CHECK((fit.transition->scale.array() == fit.transition->scale[0]).all());
}

TEST_CASE("M4 recovers the identity link on a large same-population sample") {
  const auto fit = estimate_transition(LinkModel::M4, kSource, draw(kSource, 5000, 5));
  REQUIRE(fit.converged);
  CHECK(std::abs(fit.transition->shift) <= 0.1);
  CHECK(std::abs(fit.transition->scale[0] - 1.0) <= 0.1);
}

TEST_CASE("M7 on a duplicated sample reproduces the single-sample fit") {
  const auto s = draw(kSource, 150, 6);
  const auto m7 = fit_m7(s, s, exact());
  const auto single = fit_mle(s, exact());
  REQUIRE(m7.converged);
  REQUIRE(single.converged);
  CHECK(!m7.transition.has_value());
  CHECK((score_rows(m7.target_params, s.features()) - score_rows(single.params, s.features()))
            .cwiseAbs()
            .maxCoeff() <= 1e-8);
}

TEST_CASE("M7 pooled likelihood dominates the source parameters") {
  const auto source = draw(kSource, 300, 7);
  const auto learning = draw(LogisticParams{-0.4, Eigen::Vector3d(0.6, -1.2, 0.1)}, 80, 8);
  const auto m7 = fit_m7(source, learning, exact());
  const auto pooled = concatenate(source, learning);
  CHECK(log_likelihood(m7.target_params, pooled) >= log_likelihood(kSource, pooled));
  CHECK(m7.free_parameters == 4);
}

TEST_CASE("score_target follows the composed parameters") {
  const auto learning = draw(LogisticParams{1.0, kSource.coefficients}, 200, 9);
  const auto m3 = estimate_transition(LinkModel::M3, kSource, learning);
  const Eigen::VectorXd x = Eigen::Vector3d(0.2, -1.0, 0.4);
  const double expected =
      sigmoid(kSource.intercept + m3.transition->shift + kSource.coefficients.dot(x));
  CHECK(score_target(m3, x) == doctest::Approx(expected).epsilon(1e-14));

  const auto m1 = estimate_transition(LinkModel::M1, kSource, learning);
  CHECK(score_target(m1, x) == score(kSource, x));

  TransferFit shifted = m1;
  double previous = 0.0;
  for (double c : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    shifted.target_params.intercept = kSource.intercept + c;
    const double p = score_target(shifted, x);
    CHECK(p > previous);
    previous = p;
  }
}

TEST_CASE("nested models order their likelihoods") {
  SplitMix64 rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    const double c = 2.0 * rng.uniform() - 1.0;
    Eigen::Vector3d scale(0.5 + rng.uniform(), 0.5 + rng.uniform(), 0.5 + rng.uniform());
    const auto truth = LogisticParams{kSource.intercept + c, scale.cwiseProduct(kSource.coefficients)};
    const auto learning = draw(truth, 50 + static_cast<Eigen::Index>(rng.below(150)), rng.next());
    if (!has_both_labels(learning.labels())) continue;
    std::array<double, 7> ll{};
    bool all_converged = true;
    for (auto kind : {LinkModel::M1, LinkModel::M2, LinkModel::M3, LinkModel::M4, LinkModel::M5,
                      LinkModel::M6}) {
      const auto fit = estimate_transition(kind, kSource, learning);
      ll[static_cast<std::size_t>(kind)] = fit.log_likelihood;
      all_converged = all_converged && fit.converged;
    }
    REQUIRE(all_converged);
    const double slack = 1e-6;
    CHECK(ll[0] <= ll[1] + slack);
    CHECK(ll[1] <= ll[3] + slack);
    CHECK(ll[3] <= ll[5] + slack);
    CHECK(ll[0] <= ll[2] + slack);
    CHECK(ll[2] <= ll[3] + slack);
    CHECK(ll[1] <= ll[4] + slack);
    CHECK(ll[4] <= ll[5] + slack);
  }
}

TEST_CASE("M6 matches an unconstrained target fit when every coefficient is nonzero") {
  const auto learning = draw(LogisticParams{-0.5, Eigen::Vector3d(0.4, -1.5, 1.1)}, 250, 11);
  const auto m6 = estimate_transition(LinkModel::M6, kSource, learning, exact());
  const auto direct = fit_mle(learning, exact());
  REQUIRE(m6.converged);
  REQUIRE(direct.converged);
  CHECK(std::abs(m6.log_likelihood - direct.log_likelihood) <= 1e-6);
  CHECK((score_rows(m6.target_params, learning.features()) -
         score_rows(direct.params, learning.features()))
            .cwiseAbs()
            .maxCoeff() <= 1e-6);
}

TEST_CASE("M5 and M6 leave unidentifiable scales at one") {
  const LogisticParams source{0.1, Eigen::Vector3d(0.9, 0.0, -0.7)};
  const auto learning = draw(LogisticParams{0.1, Eigen::Vector3d(0.5, 1.0, -0.3)}, 200, 12);
  for (auto kind : {LinkModel::M5, LinkModel::M6}) {
    const auto fit = estimate_transition(kind, source, learning);
    CHECK(fit.transition->identifiable == std::vector<bool>{true, false, true});
    CHECK(fit.transition->scale[1] == 1.0);
    CHECK(fit.target_params.coefficients[1] == 0.0);
    CHECK(fit.free_parameters == (kind == LinkModel::M5 ? 2 : 3));
  }
}

TEST_CASE("parameter-count audit") {
  const auto learning = draw(kSource, 120, 13);
  const auto source_sample = draw(kSource, 120, 14);
  for (auto kind : kAllLinkModels) {
    const auto fit = estimate_link_model(kind, kSource, source_sample, learning);
    CHECK(fit.free_parameters == free_parameter_count(kind, 3));
    if (kind == LinkModel::M1 || kind == LinkModel::M7) continue;
    const auto& t = *fit.transition;
    if (kind == LinkModel::M2 || kind == LinkModel::M5) CHECK(t.shift == 0.0);
    if (kind == LinkModel::M3) CHECK(t.scale == Eigen::VectorXd::Ones(3));
    if (kind == LinkModel::M2 || kind == LinkModel::M4)
      CHECK((t.scale.array() == t.scale[0]).all());
  }
}

TEST_CASE("estimation is deterministic") {
  const auto learning = draw(kSource, 100, 15);
  for (auto kind : {LinkModel::M2, LinkModel::M4, LinkModel::M6}) {
    const auto a = estimate_transition(kind, kSource, learning);
    const auto b = estimate_transition(kind, kSource, learning);
    CHECK(a.target_params == b.target_params);
    CHECK(a.log_likelihood == b.log_likelihood);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("error paths") {
  const auto learning = draw(kSource, 30, 16);
  CHECK_THROWS_AS(estimate_transition(LinkModel::M7, kSource, learning), std::invalid_argument);
  CHECK_THROWS_AS(estimate_transition(LinkModel::M3, LogisticParams::zero(2), learning),
                  std::invalid_argument);
  const LabeledSample ones(learning.features(), Eigen::VectorXd::Ones(30), learning.feature_names());
  CHECK_THROWS_AS(estimate_transition(LinkModel::M3, kSource, ones, exact()), NumericalError);
  const LabeledSample other(learning.features(), learning.labels(), {"a", "b", "c"});
  CHECK_THROWS_AS(fit_m7(other, learning), std::invalid_argument);
}
