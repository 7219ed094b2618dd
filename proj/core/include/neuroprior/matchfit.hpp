#pragma once

#include "neuroprior/activation.hpp"
#include "neuroprior/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace neuroprior {

enum class MatchDistance { order_stat_l2, ks, wasserstein1 };
enum class MatchOptimizer { grid, anneal };
std::string_view to_string(MatchDistance d) noexcept;
std::string_view to_string(MatchOptimizer o) noexcept;
MatchDistance match_distance_from_string(std::string_view name);
MatchOptimizer match_optimizer_from_string(std::string_view name);

struct MatchConfig {
  std::size_t sample_size = 100000;
  std::size_t basis_count = 10;
  /// Breakpoint range of the spline in t = alpha - alpha0.
  double knot_lower = -5.0;
  double knot_upper = 5.0;
  double alpha0 = 0.0;
  double tau_w_sq = 1.0;
  MatchDistance distance = MatchDistance::order_stat_l2;
  MatchOptimizer optimizer = MatchOptimizer::anneal;
  /// Annealing: 0 selects 5% of the starting distance.
  double initial_temperature = 0.0;
  double cooling = 0.995;
  std::size_t steps = 50000;
  /// Proposal sd = step_fraction * max(1, max |initial coefficient|).
  double step_fraction = 0.1;
  /// Grid search: points per side and coordinate sweeps.
  std::size_t grid_points = 10;
  std::size_t grid_sweeps = 20;
  /// Starting coefficients; the identity map (Greville abscissae) when unset.
  std::optional<std::vector<double>> initial_coefficients;
  std::uint64_t seed = 1;

  void validate() const;
};

/// i.i.d. target draws.
using TargetSampler = std::function<std::vector<double>(std::size_t count, Rng& rng)>;

/// Laplace with the given scale (rate 1/scale).
TargetSampler laplace_target(double scale);
/// theta ~ N(0, tau^2 lambda^2), lambda ~ half-Cauchy(0, 1).
TargetSampler horseshoe_target(double tau);
/// Uses `samples` as is when count matches, otherwise resamples with replacement.
TargetSampler empirical_target(std::vector<double> samples);

/// The (alpha_i, w_i) pairs and target draws, generated once and reused for
/// every coefficient vector, with the spline basis cached per draw.
class FrozenDraws {
 public:
  FrozenDraws(const TargetSampler& target, const MatchConfig& config);

  [[nodiscard]] std::size_t size() const noexcept { return w_.size(); }
  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  [[nodiscard]] const std::vector<double>& sorted_target() const noexcept { return target_; }

  /// Sorted neuronized draws T_phi(alpha_i - alpha0) w_i.
  [[nodiscard]] std::vector<double> sorted_draws(std::span<const double> phi) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> t_;
  std::vector<double> w_;
  std::vector<CubicBSpline::LocalBasis> basis_;
  std::vector<char> region_;  // -1 below, 0 inside, 1 above the breakpoints
  std::vector<double> target_;
};

/// D between two sorted samples. order_stat_l2 and wasserstein1 require equal
/// sizes (std::invalid_argument otherwise).
double sorted_sample_distance(std::span<const double> a, std::span<const double> b, MatchDistance distance);

/// D(phi) on the frozen draws; +infinity when the spline is not nondecreasing.
double match_distance(std::span<const double> phi, const FrozenDraws& draws, MatchDistance distance);

struct MatchResult {
  ActivationSpec activation = ActivationSpec::identity();
  std::vector<double> coefficients;
  double distance = 0.0;
  double initial_distance = 0.0;
  /// Optimizer never improved on the starting point.
  bool no_improvement = false;
};

MatchResult fit_activation(const TargetSampler& target, const MatchConfig& config);

}  // namespace neuroprior
