#include <doctest.h>

#include "neuroprior/baselines.hpp"
#include "neuroprior/matchfit.hpp"
#include "neuroprior/metrics.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace neuroprior;

namespace {

RegressionData problem(Eigen::Index n, Eigen::Index p, const Eigen::VectorXd& theta, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
  Eigen::VectorXd y = x * theta;
  for (Eigen::Index i = 0; i < n; ++i) y(i) += rng.normal();
  return RegressionData(x, y);
}

std::vector<char> gamma_of(int model, int p) {
  std::vector<char> g(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) g[static_cast<std::size_t>(j)] = (model >> j) & 1;
  return g;
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
  return out;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("gamma-space marginal agrees with the covariance-form oracle") {
    Eigen::VectorXd theta(4);
    theta << 0.8, 0.0, -0.5, 0.0;
    const auto data = problem(30, 4, theta, 1);
    const double c = 2.0;
    const double eta = 0.3;
    const auto ref = oracle::spsl_model_posterior(data.x(), data.y(), c, eta);
    std::vector<double> lp(16);
    for (int m = 0; m < 16; ++m) {
      const auto g = gamma_of(m, 4);
      lp[static_cast<std::size_t>(m)] = spsl_log_marginal(data, g, c) + spsl_log_model_prior(g, eta);
    }
    const double top = *std::max_element(lp.begin(), lp.end());
    double total = 0.0;
    for (double& v : lp) total += (v = std::exp(v - top));
    for (int m = 0; m < 16; ++m) CHECK(lp[static_cast<std::size_t>(m)] / total == doctest::Approx(ref[static_cast<std::size_t>(m)]).epsilon(1e-9));
  }

  TEST_CASE("single predictor Bayes factor in closed form") {
    Eigen::VectorXd theta(1);
    theta << 0.4;
    const auto data = problem(25, 1, theta, 2);
    const double c = 1.5;
    const double xx = data.column_sq_norms()(0);
    const double xy = data.x().col(0).dot(data.y());
    const double yy = data.y().squaredNorm();
    const double n = 25.0;
    const double expected = -0.5 * std::log(1.0 + c * xx) - 0.5 * n * std::log(1.0 - c * xy * xy / ((1.0 + c * xx) * yy));
    const double got = spsl_log_marginal(data, {1}, c) - spsl_log_marginal(data, {0}, c);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("gamma MCMC visits models in proportion to their posterior") {
    Eigen::VectorXd theta(5);
    theta << 0.5, 0.0, 0.3, 0.0, 0.0;
    const auto data = problem(40, 5, theta, 3);
    const auto ref = oracle::spsl_model_posterior(data.x(), data.y(), 1.0, 0.5);
    Eigen::VectorXd incl = Eigen::VectorXd::Zero(5);
    for (int m = 0; m < 32; ++m)
      for (int j = 0; j < 5; ++j)
        if ((m >> j) & 1) incl(j) += ref[static_cast<std::size_t>(m)];
    SamplerConfig cfg;
    cfg.iterations = 102000;
    cfg.burn_in = 2000;
    cfg.store_theta = false;
    cfg.trace = TraceStatistic::none;
    cfg.seed = 4;
    const auto out = spsl_gamma_mcmc(data, SpslGammaConfig{}, cfg);
    for (Eigen::Index j = 0; j < 5; ++j) CHECK(std::abs(out.inclusion_frequency(j) - incl(j)) < 0.015);
    CHECK(out.method == "spsl-gamma");
    CHECK(out.acceptance_rate() > 0.0);
  }

  TEST_CASE("incremental factor matches a dense recompute along the chain") {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(12);
    theta(0) = 1.0;
    theta(4) = -0.7;
    theta(9) = 0.5;
    const auto data = problem(50, 12, theta, 5);
    SamplerConfig cfg;
    cfg.iterations = 3000;
    cfg.burn_in = 0;
    cfg.seed = 6;
    const SpslGammaConfig spsl{0.8, 0.2, 0.7};
    const auto out = spsl_gamma_mcmc(data, spsl, cfg);
    double worst = 0.0;
    for (std::size_t s = 0; s < out.stored(); s += 7) {
      std::vector<char> g(12);
      for (Eigen::Index j = 0; j < 12; ++j) g[static_cast<std::size_t>(j)] = out.theta(static_cast<Eigen::Index>(s), j) != 0.0;
      const double dense = spsl_log_marginal(data, g, spsl.slab_variance) + spsl_log_model_prior(g, spsl.eta);
      worst = std::max(worst, std::abs(dense - out.trace[s]));
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("Bayesian Lasso and horseshoe follow a strong signal") {
    Eigen::VectorXd theta(5);
    theta << 3.0, 0.0, 0.0, -2.0, 0.0;
    const auto data = problem(100, 5, theta, 7);
    const Eigen::VectorXd ols = data.x().colPivHouseholderQr().solve(data.y());
    SamplerConfig cfg;
    cfg.iterations = 6000;
    cfg.burn_in = 1000;
    cfg.seed = 8;
    const auto bl = bayesian_lasso_gibbs(data, 1.0, cfg);
    const auto hs = horseshoe_gibbs(data, 1.0, cfg);
    CHECK(std::abs(bl.theta_mean(0) - ols(0)) < 0.15);
    CHECK(std::abs(hs.theta_mean(0) - ols(0)) < 0.15);
    CHECK(std::abs(hs.theta_mean(3) - ols(3)) < 0.15);
    CHECK(bl.sigma_sq_mean == doctest::Approx(1.0).epsilon(0.35));
    CHECK(hs.method == "horseshoe");
    CHECK(bl.method == "blasso");
  }

  TEST_CASE("data-free Bayesian Lasso reproduces the Laplace prior") {
    const RegressionData data(Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd::Zero(4));
    SamplerConfig cfg;
    cfg.iterations = 101000;
    cfg.burn_in = 1000;
    cfg.thin = 5;
    cfg.fixed_sigma_sq = 1.0;
    cfg.seed = 9;
    const double tau_w_sq = 0.25;
    const auto out = bayesian_lasso_gibbs(data, tau_w_sq, cfg);
    const double ks = oracle::ks_against_cdf(column(out.theta, 0), [&](double x) {
      return oracle::laplace_cdf(x, std::sqrt(tau_w_sq));
    });
    CHECK(ks < 0.02);
  }

  TEST_CASE("data-free horseshoe reproduces the scale mixture") {
    const RegressionData data(Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd::Zero(4));
    SamplerConfig cfg;
    cfg.iterations = 101000;
    cfg.burn_in = 1000;
    cfg.thin = 5;
    cfg.fixed_sigma_sq = 1.0;
    cfg.seed = 10;
    const double tau = 0.5;
    const auto out = horseshoe_gibbs(data, tau * tau, cfg);
    Rng rng(11);
    const auto ref = horseshoe_target(tau)(20000, rng);
    CHECK(ks_distance(column(out.theta, 1), ref) < 0.025);
  }

  TEST_CASE("coordinate-descent Lasso agrees with the oracle solver") {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(15);
    theta(1) = 1.2;
    theta(6) = -0.8;
    const auto data = problem(60, 15, theta, 12);
    for (double lambda : {0.5, 5.0, 30.0}) {
      const Eigen::VectorXd ours = lasso_coordinate_descent(data, lambda, nullptr, 1e-12);
      const Eigen::VectorXd ref = oracle::lasso_cd(data.x(), data.y(), lambda, 1e-12, 100000);
      CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-8);
    }
    const double lambda_max = (data.x().transpose() * data.y()).cwiseAbs().maxCoeff();
    CHECK(lasso_coordinate_descent(data, lambda_max * 1.0001).isZero());
  }

  TEST_CASE("cross-validated Lasso picks an interior penalty on a sparse signal") {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(30);
    theta(0) = 1.0;
    theta(3) = -1.0;
    theta(8) = 0.7;
    const auto data = problem(120, 30, theta, 13).standardize();
    const auto cv = lasso_cv(data, 10, 40, 1e-3, 14);
    CHECK(cv.grid.size() == 40);
    CHECK(cv.lambda < cv.grid.front());
    CHECK(cv.lambda > cv.grid.back());
    // The grid starts at the smallest penalty that zeroes the full-data fit.
    CHECK(lasso_coordinate_descent(data, cv.grid.front()).isZero());
    CHECK_FALSE(lasso_coordinate_descent(data, 0.99 * cv.grid.front()).isZero());
    const auto best = *std::min_element(cv.cv_error.begin(), cv.cv_error.end());
    CHECK(cv.cv_error[static_cast<std::size_t>(std::find(cv.grid.begin(), cv.grid.end(), cv.lambda) - cv.grid.begin())] == best);
    CHECK(cv.sigma_sq == doctest::Approx(1.0).epsilon(0.3));
    const auto again = lasso_cv(data, 10, 40, 1e-3, 14);
    CHECK(again.lambda == cv.lambda);
    CHECK_THROWS_AS(lasso_cv(data, 1), std::invalid_argument);
  }

  TEST_CASE("hard threshold selection") {
    Eigen::VectorXd m(5);
    m << 0.05, -0.2, 0.1, 0.0, 0.11;
    CHECK(hard_threshold_select(m, 1.0) == std::vector<std::size_t>{1, 4});
    CHECK(hard_threshold_select(m, 1.0, 0.0) == std::vector<std::size_t>{0, 1, 2, 4});
    CHECK(hard_threshold_select(m, 10.0).empty());
  }

  TEST_CASE("invalid baseline settings") {
    const RegressionData data(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3));
    SamplerConfig cfg;
    cfg.iterations = 10;
    cfg.burn_in = 0;
    CHECK_THROWS_AS(spsl_gamma_mcmc(data, SpslGammaConfig{1.0, 1.0, 0.7}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(bayesian_lasso_gibbs(data, 0.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(spsl_log_marginal(data, {1, 0}, 1.0), std::invalid_argument);
  }
}
