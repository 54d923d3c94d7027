#include <doctest.h>

#include <cmath>

#include "credit_transfer/errors.hpp"
#include "credit_transfer/logistic.hpp"
#include "credit_transfer/random.hpp"
#include "oracles.hpp"

using namespace credit_transfer;

namespace {

LabeledSample random_sample(SplitMix64& rng, Eigen::Index n, Eigen::Index d,
                            const LogisticParams& truth) {
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal();
    const double p = sigmoid(truth.intercept + x.row(i).dot(truth.coefficients));
    y[i] = rng.uniform() < p ? 1.0 : 0.0;
  }
  return {x, y, std::vector<std::string>(static_cast<std::size_t>(d), "x")};
}

LogisticParams random_params(SplitMix64& rng, Eigen::Index d, double spread) {
  LogisticParams p = LogisticParams::zero(d);
  p.intercept = spread * (2.0 * rng.uniform() - 1.0);
  for (Eigen::Index j = 0; j < d; ++j) p.coefficients[j] = spread * (2.0 * rng.uniform() - 1.0);
  return p;
}

FitConfig exact() {
  FitConfig c;
  c.ridge = 0.0;
  return c;
}

}  // namespace

TEST_CASE("score examples") {
  const Eigen::VectorXd x = Eigen::Vector3d(4, -2, 9);
  CHECK(score(LogisticParams::zero(3), x) == 0.5);
  LogisticParams p = LogisticParams::zero(3);
  p.intercept = 10.0;
  // 1 / (1 + e^-10)
  CHECK(score(p, x) == doctest::Approx(0.9999546021312976).epsilon(1e-15));
  CHECK_THROWS_AS(score(p, Eigen::Vector2d(1, 1)), std::invalid_argument);
}

TEST_CASE("score symmetry and stability") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_params(rng, 4, 3.0);
    LogisticParams neg{-p.intercept, -p.coefficients};
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.normal();
    CHECK(score(p, x) + score(neg, x) == doctest::Approx(1.0).epsilon(1e-15));
  }
  for (double eta : {-700.0, -40.0, 40.0, 700.0, 1e6, -1e6}) {
    LogisticParams p = LogisticParams::zero(1);
    p.intercept = eta;
    const double s = score(p, Eigen::VectorXd::Zero(1));
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    CHECK(std::isfinite(log1p_exp(eta)));
  }
  CHECK(log1p_exp(700.0) == doctest::Approx(700.0));
}

TEST_CASE("log_likelihood examples") {
  Eigen::MatrixXd x(5, 2);
  x.setRandom();
  const LabeledSample s(x, Eigen::VectorXd::Ones(5), {"a", "b"});
  CHECK(log_likelihood(LogisticParams::zero(2), s) == doctest::Approx(5 * std::log(0.5)));

  const LabeledSample one(Eigen::MatrixXd::Constant(1, 1, 3.0), Eigen::VectorXd::Ones(1), {"a"});
  LogisticParams p = LogisticParams::zero(1);
  p.coefficients[0] = std::log(9.0) / 3.0;  // p = 0.9
  CHECK(log_likelihood(p, one) == doctest::Approx(std::log(0.9)).epsilon(1e-14));
}

TEST_CASE("log_likelihood agrees with literal summation") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(6));
    const auto truth = random_params(rng, d, 1.5);
    const auto s = random_sample(rng, 40, d, truth);
    const auto p = random_params(rng, d, 1.0);
    const double ours = log_likelihood(p, s);
    const double naive = oracle::naive_log_likelihood(p.intercept, p.coefficients, s.features(), s.labels());
    CHECK(std::abs(ours - naive) <= 1e-12 * std::max(1.0, std::abs(naive)));
  }
}

TEST_CASE("ridge enters the objective on coefficients only") {
  SplitMix64 rng(8);
  const auto s = random_sample(rng, 30, 2, random_params(rng, 2, 1.0));
  auto p = random_params(rng, 2, 1.0);
  const double ridge = 0.3;
  CHECK(log_likelihood(p, s, ridge) ==
        doctest::Approx(log_likelihood(p, s) - ridge / 2 * p.coefficients.squaredNorm()));
  const Eigen::VectorXd g = gradient(p, s, ridge) - gradient(p, s);
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(-ridge * p.coefficients[0]));
}

TEST_CASE("gradient matches central differences on 50 random instances") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(8));
    const auto s = random_sample(rng, 60, d, random_params(rng, d, 1.0));
    const auto p = random_params(rng, d, 1.0);
    const double ridge = trial % 2 == 0 ? 0.0 : 0.5;
    const auto f = [&](const Eigen::VectorXd& t) {
      return log_likelihood(LogisticParams::from_stacked(t), s, ridge);
    };
    const Eigen::VectorXd analytic = gradient(p, s, ridge);
    const Eigen::VectorXd numeric = oracle::central_difference(f, p.stacked(), 1e-5);
    CHECK((analytic - numeric).norm() <= 1e-6 * std::max(1.0, analytic.norm()));

    const Eigen::MatrixXd h = hessian(p, s, ridge);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
    CHECK(eig.maxCoeff() <= 1e-10);
  }
}

TEST_CASE("Hessian matches differences of the gradient") {
  SplitMix64 rng(33);
  const auto s = random_sample(rng, 80, 3, random_params(rng, 3, 1.0));
  const auto p = random_params(rng, 3, 0.5);
  const Eigen::MatrixXd h = hessian(p, s);
  for (Eigen::Index k = 0; k < 4; ++k) {
    const auto f = [&](const Eigen::VectorXd& t) {
      return gradient(LogisticParams::from_stacked(t), s)[k];
    };
    const Eigen::VectorXd row = oracle::central_difference(f, p.stacked(), 1e-5);
    CHECK((row - h.row(k).transpose()).norm() <= 1e-6 * std::max(1.0, row.norm()));
  }
}

TEST_CASE("fit: balanced labels independent of x give zero parameters") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 0, 1, 1;
  const LabeledSample s(x, Eigen::Vector4d(0, 1, 0, 1), {"x"});
  const auto fit = fit_mle(s, exact());
  REQUIRE(fit.converged);
  CHECK(std::abs(fit.params.intercept) <= 1e-10);
  CHECK(std::abs(fit.params.coefficients[0]) <= 1e-10);
}

TEST_CASE("fit: intercept-only design recovers the logit of the sample mean") {
  for (int positives : {1, 3, 7, 12}) {
    const Eigen::Index n = 15;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    y.head(positives).setOnes();
    const LabeledSample s(Eigen::MatrixXd::Zero(n, 2), y, {"a", "b"});
    const auto fit = fit_mle(s, exact());
    REQUIRE(fit.converged);
    const double mean = static_cast<double>(positives) / static_cast<double>(n);
    CHECK(std::abs(fit.params.intercept - std::log(mean / (1 - mean))) <= 1e-8);
  }
}

TEST_CASE("fit: 1-D toy optimum matches an exhaustive grid search") {
  Eigen::MatrixXd x(10, 1);
  x << -2, -1.5, -1, -0.5, 0, 0.3, 0.8, 1.2, 1.9, 2.5;
  Eigen::VectorXd y(10);
  y << 0, 0, 1, 0, 0, 1, 0, 1, 1, 1;
  const LabeledSample s(x, y, {"x"});
  const auto fit = fit_mle(s, exact());
  REQUIRE(fit.converged);
  const auto best = oracle::grid_argmax_2d(
      [&](double b0, double b1) {
        return oracle::naive_log_likelihood(b0, Eigen::VectorXd::Constant(1, b1), x, y);
      },
      -10.0, 10.0, 0.01);
  CHECK(std::abs(fit.params.intercept - best.first) <= 0.02);
  CHECK(std::abs(fit.params.coefficients[0] - best.second) <= 0.02);
}

TEST_CASE("fit: trace is monotone and converged fits satisfy the gradient tolerance") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(10));
    const auto s = random_sample(rng, 50 + static_cast<Eigen::Index>(rng.below(150)), d,
                                 random_params(rng, d, 2.0));
    if (!has_both_labels(s.labels())) continue;
    const auto fit = fit_mle(s);
    for (std::size_t k = 1; k < fit.trace.size(); ++k) CHECK(fit.trace[k] >= fit.trace[k - 1]);
    if (fit.converged) {
      CHECK(fit.gradient_norm <= 1e-8);
      CHECK(gradient(fit.params, s, FitConfig{}.ridge).norm() <= 1e-8);
    }
  }
}

TEST_CASE("fit: rescaling a feature rescales its coefficient") {
  SplitMix64 rng(55);
  const auto s = random_sample(rng, 300, 3, random_params(rng, 3, 1.0));
  Eigen::MatrixXd scaled = s.features();
  const double factor = 4.0;
  scaled.col(1) *= factor;
  const LabeledSample t(scaled, s.labels(), s.feature_names());
  const auto a = fit_mle(s, exact());
  const auto b = fit_mle(t, exact());
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(b.params.coefficients[1] == doctest::Approx(a.params.coefficients[1] / factor).epsilon(1e-8));
  CHECK((score_rows(a.params, s.features()) - score_rows(b.params, t.features())).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fit: single-class samples") {
  const LabeledSample s(Eigen::MatrixXd::Identity(3, 2).eval(), Eigen::VectorXd::Ones(3), {"a", "b"});
  CHECK_THROWS_WITH_AS(fit_mle(s, exact()), doctest::Contains("separation/degenerate labels"),
                       NumericalError);
  FitConfig ridge;
  ridge.ridge = 1.0;
  const auto fit = fit_mle(s, ridge);
  CHECK(std::isfinite(fit.params.intercept));
  CHECK(fit.params.coefficients.allFinite());
}

TEST_CASE("classify boundary convention") {
  LogisticParams p = LogisticParams::zero(1);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  CHECK(classify(p, x, 0.5) == 1);
  p.intercept = std::log(0.49 / 0.51);
  CHECK(classify(p, x, 0.5) == 0);
  CHECK_THROWS_AS(classify(p, x, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(classify(p, x, 1.0), std::invalid_argument);
}

TEST_CASE("stacked round trip") {
  LogisticParams p{1.5, Eigen::Vector3d(1, -2, 3)};
  CHECK(LogisticParams::from_stacked(p.stacked()) == p);
  CHECK(p.stacked()[0] == 1.5);
}
