#include <doctest.h>

#include "neuroprior/metrics.hpp"
#include "neuroprior/rng.hpp"

#include <cmath>
#include <stdexcept>

using namespace neuroprior;

namespace {

std::vector<double> ar1_chain(std::size_t n, double phi, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  double prev = rng.normal() / std::sqrt(1.0 - phi * phi);
  for (auto& v : x) {
    prev = phi * prev + rng.normal();
    v = prev;
  }
  return x;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("mse and angle") {
    const Eigen::Vector3d a(1.0, 2.0, 2.0);
    const Eigen::Vector3d b(1.0, 0.0, 2.0);
    CHECK(mse(a, b) == doctest::Approx(4.0 / 3.0));
    CHECK(mse(a, a) == 0.0);
    CHECK_THROWS_AS(mse(a, Eigen::Vector2d::Zero()), std::invalid_argument);
    CHECK(angle(a, a).value == doctest::Approx(1.0));
    CHECK(angle(a, -a).value == doctest::Approx(-1.0));
    CHECK(angle(a, b).value == doctest::Approx(5.0 / (3.0 * std::sqrt(5.0))));
    const auto z = angle(Eigen::Vector3d::Zero(), a);
    CHECK(z.degenerate);
    CHECK(z.value == 0.0);
  }

  TEST_CASE("confusion counts and MCC") {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(6);
    theta(0) = 1.0;
    theta(3) = -0.5;
    const SelectionTruth truth(theta);
    const auto c = confusion({0, 2}, truth);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 3);
    CHECK(mcc({0, 3}, truth) == doctest::Approx(1.0));
    CHECK(mcc(Confusion{8, 40, 1, 2}) == doctest::Approx((8.0 * 40 - 1.0 * 2) / std::sqrt(9.0 * 10 * 41 * 42)));
    CHECK(mcc(Confusion{8, 40, 1, 2}) == doctest::Approx(318.0 / std::sqrt(154980.0)));
    CHECK(mcc(Confusion{0, 10, 0, 3}) == 0.0);
    CHECK(mcc({1, 2, 4, 5}, truth) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(confusion({9}, truth), std::invalid_argument);
  }

  TEST_CASE("autocorrelation matches the direct sum") {
    const auto x = ar1_chain(500, 0.5, 3);
    const auto rho = autocorrelation(x, 10);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= 500.0;
    double c0 = 0.0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    for (std::size_t t = 0; t <= 10; ++t) {
      double ct = 0.0;
      for (std::size_t i = 0; i + t < 500; ++i) ct += (x[i] - mean) * (x[i + t] - mean);
      CHECK(rho[t] == doctest::Approx(ct / c0).epsilon(1e-10).scale(1.0));
    }
  }

  TEST_CASE("ESS on iid and AR(1) chains") {
    const std::size_t n = 200000;
    Rng rng(4);
    std::vector<double> iid(n);
    for (auto& v : iid) v = rng.normal();
    const auto e_iid = ess(iid);
    CHECK(e_iid.value / n > 0.9);
    CHECK(e_iid.value <= static_cast<double>(n));

    const auto ar = ar1_chain(n, 0.9, 5);
    const double expected = n * (1.0 - 0.9) / (1.0 + 0.9);
    CHECK(ess(ar).value == doctest::Approx(expected).epsilon(0.1));

    // Affine invariance.
    std::vector<double> shifted(ar);
    for (auto& v : shifted) v = 3.0 * v - 7.0;
    CHECK(ess(shifted).value == doctest::Approx(ess(ar).value).epsilon(1e-9));

    const std::vector<double> flat(50, 2.5);
    const auto e = ess(flat);
    CHECK(e.degenerate);
    CHECK(e.value == 50.0);
    CHECK_THROWS_AS(ess(std::vector<double>(5, 1.0)), std::invalid_argument);
  }

  TEST_CASE("two-sample KS distance") {
    const std::vector<double> a{1, 2, 3, 4};
    CHECK(ks_distance(a, a) == 0.0);
    CHECK(ks_distance(a, std::vector<double>{10, 11}) == 1.0);
    CHECK(ks_distance(a, std::vector<double>{2.5}) == doctest::Approx(0.5));
    Rng rng(6);
    std::vector<double> x(20000);
    std::vector<double> y(20000);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal();
    CHECK(ks_distance(x, y) < 1.63 * std::sqrt(2.0 / 20000.0));
    for (auto& v : y) v += 0.5;
    // 2 Phi(0.25) - 1 for a unit-variance shift of 0.5.
    CHECK(ks_distance(x, y) == doctest::Approx(0.197413).epsilon(0.05));
  }

  TEST_CASE("MAP solution path runs from weak to strong shrinkage") {
    Rng rng(7);
    Eigen::MatrixXd x(60, 8);
    for (Eigen::Index i = 0; i < 60; ++i)
      for (Eigen::Index j = 0; j < 8; ++j) x(i, j) = rng.normal();
    Eigen::VectorXd y = 1.5 * x.col(0) - 1.0 * x.col(1);
    for (Eigen::Index i = 0; i < 60; ++i) y(i) += rng.normal();
    const RegressionData data(x, y);
    PathSpec spec;
    spec.prior = NeuronizedPrior{ActivationSpec::relu(), 0.0, 1.0, true};
    spec.kind = ScheduleKind::alpha0_path;
    spec.map.sigma_sq = 1.0;
    std::vector<double> grid;
    for (int g = 0; g <= 10; ++g) grid.push_back(0.5 * g);
    const auto path = solution_path(data, spec, grid);
    CHECK(path.rows() == 11);
    int first_nonzero = 0;
    int last_nonzero = 0;
    for (Eigen::Index j = 0; j < 8; ++j) {
      first_nonzero += path(0, j) != 0.0;
      last_nonzero += path(10, j) != 0.0;
    }
    CHECK(first_nonzero >= last_nonzero);
    CHECK(path(10, 0) != 0.0);
    // alpha0 = 5 is far in the tail: only the strong signals survive.
    CHECK(last_nonzero <= 3);

    spec.method = PathMethod::posterior_mean;
    spec.sampler.iterations = 400;
    spec.sampler.burn_in = 100;
    const auto pm = solution_path(data, spec, {0.0, 1.0, 2.0});
    CHECK(pm.rows() == 3);
    CHECK(pm(0, 0) == doctest::Approx(1.5).epsilon(0.2));
  }
}
