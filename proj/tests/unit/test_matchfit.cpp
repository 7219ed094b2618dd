#include <doctest.h>

#include "neuroprior/matchfit.hpp"
#include "neuroprior/metrics.hpp"
#include "neuroprior/prior.hpp"

#include <cmath>
#include <stdexcept>

using namespace neuroprior;

namespace {

MatchConfig small_config() {
  MatchConfig cfg;
  cfg.sample_size = 10000;
  cfg.steps = 1500;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_SUITE("matchfit") {
  TEST_CASE("distance to its own induced prior is zero") {
    auto cfg = small_config();
    // The frozen prior draws come from split stream 1; replaying that stream
    // through the identity spline reproduces them exactly.
    const auto breakpoints = uniform_breakpoints(cfg.knot_lower, cfg.knot_upper, cfg.basis_count);
    const auto phi = CubicBSpline::greville_abscissae(breakpoints);
    const ActivationSpec act = ActivationSpec::spline(breakpoints, phi);
    const TargetSampler self = [&](std::size_t count, Rng&) {
      Rng stream = Rng(cfg.seed).split(1);
      std::vector<double> out(count);
      for (auto& v : out) {
        const double t = stream.normal() - cfg.alpha0;
        const double w = std::sqrt(cfg.tau_w_sq) * stream.normal();
        v = act(t) * w;
      }
      return out;
    };
    const FrozenDraws draws(self, cfg);
    CHECK(match_distance(phi, draws, MatchDistance::order_stat_l2) == 0.0);
    CHECK(match_distance(phi, draws, MatchDistance::ks) == 0.0);
  }

  TEST_CASE("Wasserstein-1 of a shifted sample is the shift") {
    std::vector<double> a{-1.0, 0.5, 2.0, 3.0};
    std::vector<double> b = a;
    for (auto& v : b) v += 0.75;
    CHECK(sorted_sample_distance(a, b, MatchDistance::wasserstein1) == doctest::Approx(0.75));
    CHECK(sorted_sample_distance(a, b, MatchDistance::order_stat_l2) == doctest::Approx(4 * 0.5625));
    CHECK_THROWS_AS(sorted_sample_distance(a, std::vector<double>{1.0}, MatchDistance::order_stat_l2),
                    std::invalid_argument);
  }

  TEST_CASE("distance responds to coefficients and rejects non-monotone splines") {
    const auto cfg = small_config();
    const FrozenDraws draws(laplace_target(1.0), cfg);
    auto phi = CubicBSpline::greville_abscissae(draws.breakpoints());
    const double d0 = match_distance(phi, draws, MatchDistance::order_stat_l2);
    phi[5] += 0.3;
    CHECK(match_distance(phi, draws, MatchDistance::order_stat_l2) != d0);
    phi[5] = phi[4] - 1.0;
    CHECK(std::isinf(match_distance(phi, draws, MatchDistance::order_stat_l2)));
    CHECK_THROWS_AS(match_distance(std::vector<double>(3, 0.0), draws, MatchDistance::ks), std::invalid_argument);
  }

  TEST_CASE("fit is deterministic and its distance is reproducible") {
    const auto cfg = small_config();
    const auto a = fit_activation(laplace_target(0.7), cfg);
    const auto b = fit_activation(laplace_target(0.7), cfg);
    CHECK(a.coefficients == b.coefficients);
    const FrozenDraws draws(laplace_target(0.7), cfg);
    CHECK(match_distance(a.coefficients, draws, cfg.distance) == a.distance);
    CHECK(a.distance <= a.initial_distance);
    CHECK(is_nondecreasing_on_grid([&](double t) { return a.activation(t); }));
  }

  TEST_CASE("fitting a Laplace target gives a near-Identity activation") {
    auto cfg = small_config();
    cfg.steps = 4000;
    const double scale = 0.55;
    const auto res = fit_activation(laplace_target(scale), cfg);
    const NeuronizedPrior fitted{res.activation, 0.0, 1.0, false};
    const auto draws = sample_prior(fitted, 100000, 41);
    Rng rng(42);
    const auto target = laplace_target(scale)(100000, rng);
    CHECK(ks_distance(draws, target) < 0.05);
  }

  TEST_CASE("fitting a horseshoe target") {
    auto cfg = small_config();
    cfg.steps = 4000;
    // Order-statistic L2 is dominated by the extreme Cauchy-like draws.
    cfg.distance = MatchDistance::ks;
    const auto res = fit_activation(horseshoe_target(1.0), cfg);
    CHECK(res.distance < res.initial_distance);
    const NeuronizedPrior fitted{res.activation, 0.0, 1.0, false};
    const auto draws = sample_prior(fitted, 100000, 43);
    Rng rng(44);
    const auto target = horseshoe_target(1.0)(100000, rng);
    CHECK(ks_distance(draws, target) < 0.05);
  }

  TEST_CASE("fitting a ReLU-induced prior") {
    auto cfg = small_config();
    cfg.basis_count = 41;  // odd count puts a breakpoint at zero
    cfg.knot_lower = -3.0;
    cfg.knot_upper = 3.0;
    cfg.steps = 4000;
    cfg.distance = MatchDistance::ks;
    // Start from the hinge: zero on every basis reaching left of 0, Greville
    // abscissae elsewhere. Annealing cannot create the atom from a continuous start.
    const auto breakpoints = uniform_breakpoints(cfg.knot_lower, cfg.knot_upper, cfg.basis_count);
    auto phi = CubicBSpline::greville_abscissae(breakpoints);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (breakpoints[i < 3 ? 0 : i - 3] < 0.0) phi[i] = 0.0;
    }
    cfg.initial_coefficients = phi;
    const NeuronizedPrior relu{ActivationSpec::relu(), 0.0, 1.0, false};
    const TargetSampler target = [&](std::size_t count, Rng& rng) {
      return sample_prior(relu, count, rng.next_u64());
    };
    const auto res = fit_activation(target, cfg);
    const auto draws = sample_prior(NeuronizedPrior{res.activation, 0.0, 1.0, false}, 100000, 45);
    CHECK(ks_distance(draws, sample_prior(relu, 100000, 46)) < 0.02);
  }

  TEST_CASE("an unbeatable start is flagged") {
    auto cfg = small_config();
    cfg.steps = 50;
    cfg.optimizer = MatchOptimizer::grid;
    cfg.grid_sweeps = 1;
    cfg.grid_points = 2;
    cfg.step_fraction = 1e-300;
    const auto res = fit_activation(laplace_target(1.0), cfg);
    CHECK(res.no_improvement);
    CHECK(res.distance == res.initial_distance);
  }

  TEST_CASE("config validation") {
    MatchConfig cfg;
    cfg.sample_size = 100;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.cooling = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK(match_distance_from_string("w1") == MatchDistance::wasserstein1);
    CHECK_THROWS_AS(match_optimizer_from_string("bfgs"), std::invalid_argument);
  }
}
