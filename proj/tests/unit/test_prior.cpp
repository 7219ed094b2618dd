#include <doctest.h>

#include "neuroprior/normal.hpp"
#include "neuroprior/prior.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <stdexcept>
#include <cmath>
#include <numeric>
#include <vector>

using namespace neuroprior;

TEST_SUITE("prior") {
  TEST_CASE("alpha0 from sparsity") {
    CHECK(alpha0_from_sparsity(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(alpha0_from_sparsity(normal_cdf(-2.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(alpha0_from_dimension(100, 1.0) == doctest::Approx(2.57582930354890076).epsilon(1e-12));
    CHECK_THROWS_AS(alpha0_from_sparsity(0.0), std::domain_error);
    CHECK_THROWS_AS(alpha0_from_sparsity(1.0), std::domain_error);
  }

  TEST_CASE("zero mass by activation kind") {
    NeuronizedPrior relu{ActivationSpec::relu(), 0.0, 1.0, false};
    CHECK(zero_mass(relu) == doctest::Approx(0.5));
    relu.alpha0 = -normal_quantile(0.01);
    CHECK(zero_mass(relu) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(zero_mass(NeuronizedPrior{ActivationSpec::identity(), 1.7, 1.0, false}) == 0.0);
    CHECK(zero_mass(NeuronizedPrior{make_horseshoe_like(), 0.0, 1.0, false}) == 0.0);
  }

  TEST_CASE("hyperparameter rules") {
    CHECK(default_tau_sq(1) == 1.0);
    CHECK(default_tau_sq(100) == doctest::Approx(1e-4).epsilon(1e-15));
    CHECK(default_tau_sq(1000) == doctest::Approx(1e-6).epsilon(1e-15));
    CHECK(tau_sq_from_lasso_cv(std::sqrt(2.0), 1.0) == doctest::Approx(1.0));
    CHECK(tau_sq_from_lasso_cv(2.0, 2.0) == doctest::Approx(1.0));
    CHECK(tau_sq_from_lasso_cv(0.1, 0.5) == doctest::Approx(100.0));
    CHECK_THROWS_AS(tau_sq_from_lasso_cv(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(tau_sq_from_lasso_cv(1.0, -1.0), std::domain_error);
    NeuronizedPrior bad;
    bad.tau_w_sq = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("ReLU atom matches Phi(alpha0)") {
    for (double a0 : {0.0, 1.2, -0.7}) {
      const NeuronizedPrior prior{ActivationSpec::relu(), a0, 1.0, false};
      // Pooled over 40 independent seeds of 10^5 draws each.
      const std::size_t s = 100000;
      double zeros = 0.0;
      for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto draws = sample_prior(prior, s, seed);
        zeros += static_cast<double>(std::count(draws.begin(), draws.end(), 0.0)) / s / 40.0;
      }
      const double q = normal_cdf(a0);
      CHECK(std::abs(zeros - q) <= 3.0 * std::sqrt(q * (1 - q) / (40.0 * s)));
      if (a0 == 0.0) CHECK(std::abs(zeros - 0.5) <= 0.01);
    }
  }

  TEST_CASE("scaling is exact under a common seed") {
    NeuronizedPrior unit{make_horseshoe_like(), 0.3, 1.0, false};
    NeuronizedPrior scaled = unit;
    scaled.tau_w_sq = 9.0;
    const auto a = sample_prior(unit, 1000, 5);
    const auto b = sample_prior(scaled, 1000, 5);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == 3.0 * a[i]);
    scaled.tau_w_sq = 1e-30;
    for (double v : sample_prior(scaled, 1000, 5)) CHECK(std::abs(v) < 1e-12);
  }

  TEST_CASE("sigma scaling multiplies the weight variance") {
    NeuronizedPrior p{ActivationSpec::identity(), 0.0, 1.0, true};
    const auto a = sample_prior(p, 100, 8, 4.0);
    p.sigma_scaled = false;
    const auto b = sample_prior(p, 100, 8, 4.0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(2.0 * b[i]));
  }

  TEST_CASE("prior draws are symmetric about zero") {
    for (const auto& act : {ActivationSpec::identity(), ActivationSpec::relu(), make_horseshoe_like()}) {
      const NeuronizedPrior prior{act, 0.0, 1.0, false};
      const auto d = sample_prior(prior, 1000000, 23);
      const double mean = std::accumulate(d.begin(), d.end(), 0.0) / d.size();
      double var = 0.0;
      for (double v : d) var += (v - mean) * (v - mean);
      var /= d.size();
      // Heavy tails make the variance estimate noisy; use the median absolute
      // value as a robust scale as well.
      std::vector<double> absd(d.size());
      std::transform(d.begin(), d.end(), absd.begin(), [](double v) { return std::abs(v); });
      std::nth_element(absd.begin(), absd.begin() + absd.size() / 2, absd.end());
      const double se = std::sqrt(var / d.size());
      CHECK(std::abs(mean) <= 3.0 * se);
    }
  }

  TEST_CASE("Identity prior density matches the Bessel-type integral") {
    const double tau = 1.0;
    const NeuronizedPrior prior{ActivationSpec::identity(), 0.0, tau * tau, false};
    const auto d = sample_prior(prior, 1000000, 99);
    auto exact = [tau](double th) {
      return oracle::integrate(
          [th, tau](double z) { return std::exp(-th * th / (2 * tau * tau * z * z) - z * z / 2) / z; }, 0.0, 50.0,
          1e-13);
    };
    std::vector<double> grid;
    for (double x = 0.5; x <= 3.0 + 1e-9; x += 0.125) grid.push_back(x);
    const double h = 0.04;
    std::vector<double> kde(grid.size(), 0.0);
    std::vector<double> ref(grid.size());
    for (double v : d) {
      const double a = std::abs(v);
      if (a < 0.3 || a > 3.3) continue;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double u = (a - grid[g]) / h;
        if (std::abs(u) < 6) kde[g] += std::exp(-0.5 * u * u);
      }
    }
    for (std::size_t g = 0; g < grid.size(); ++g) ref[g] = exact(grid[g]);
    const double ks = std::accumulate(kde.begin(), kde.end(), 0.0);
    const double rs = std::accumulate(ref.begin(), ref.end(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      CHECK(kde[g] / ks == doctest::Approx(ref[g] / rs).epsilon(0.05));
    }
  }

  TEST_CASE("sampling is deterministic given the seed") {
    const NeuronizedPrior prior{ActivationSpec::relu(), 0.5, 2.0, false};
    CHECK(sample_prior(prior, 500, 3) == sample_prior(prior, 500, 3));
    CHECK(sample_prior(prior, 500, 3) != sample_prior(prior, 500, 4));
    CHECK_THROWS_AS(sample_prior(prior, 0, 3), std::invalid_argument);
  }
}
