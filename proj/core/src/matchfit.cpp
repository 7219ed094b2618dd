#include "neuroprior/matchfit.hpp"

#include "neuroprior/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace neuroprior {

std::string_view to_string(MatchDistance d) noexcept {
  switch (d) {
    case MatchDistance::order_stat_l2:
      return "order_stat_l2";
    case MatchDistance::ks:
      return "ks";
    case MatchDistance::wasserstein1:
      return "wasserstein1";
  }
  return "unknown";
}

std::string_view to_string(MatchOptimizer o) noexcept { return o == MatchOptimizer::grid ? "grid" : "anneal"; }

MatchDistance match_distance_from_string(std::string_view name) {
  if (name == "order_stat_l2" || name == "l2") return MatchDistance::order_stat_l2;
  if (name == "ks") return MatchDistance::ks;
  if (name == "wasserstein1" || name == "w1") return MatchDistance::wasserstein1;
  throw std::invalid_argument("unknown match distance '" + std::string(name) + "'");
}

MatchOptimizer match_optimizer_from_string(std::string_view name) {
  if (name == "grid") return MatchOptimizer::grid;
  if (name == "anneal") return MatchOptimizer::anneal;
  throw std::invalid_argument("unknown match optimizer '" + std::string(name) + "'");
}

void MatchConfig::validate() const {
  if (sample_size < 10000) throw std::invalid_argument("match: sample size must be at least 10^4");
  if (basis_count < 4) throw std::invalid_argument("match: basis count must be at least 4");
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("match: cooling factor must lie in (0, 1)");
  if (!(knot_upper > knot_lower)) throw std::invalid_argument("match: knot range is empty");
  if (!(tau_w_sq > 0.0)) throw std::invalid_argument("match: tau_w_sq must be positive");
  if (!(step_fraction > 0.0)) throw std::invalid_argument("match: step fraction must be positive");
  if (initial_coefficients && initial_coefficients->size() != basis_count) {
    throw std::invalid_argument("match: initial coefficients must have basis_count entries");
  }
}

TargetSampler laplace_target(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace_target: scale must be positive");
  return [scale](std::size_t count, Rng& rng) {
    std::vector<double> out(count);
    for (auto& v : out) v = rng.laplace(scale);
    return out;
  };
}

TargetSampler horseshoe_target(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("horseshoe_target: tau must be positive");
  return [tau](std::size_t count, Rng& rng) {
    std::vector<double> out(count);
    for (auto& v : out) {
      const double lambda = rng.half_cauchy();
      v = tau * lambda * rng.normal();
    }
    return out;
  };
}

TargetSampler empirical_target(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical_target: no samples");
  return [samples = std::move(samples)](std::size_t count, Rng& rng) {
    if (count == samples.size()) return samples;
    std::vector<double> out(count);
    for (auto& v : out) v = samples[rng.uniform_index(samples.size())];
    return out;
  };
}

FrozenDraws::FrozenDraws(const TargetSampler& target, const MatchConfig& config) {
  config.validate();
  breakpoints_ = uniform_breakpoints(config.knot_lower, config.knot_upper, config.basis_count);
  const std::size_t s = config.sample_size;
  Rng base(config.seed);
  Rng prior_rng = base.split(1);
  Rng target_rng = base.split(2);
  t_.resize(s);
  w_.resize(s);
  const double tau = std::sqrt(config.tau_w_sq);
  for (std::size_t i = 0; i < s; ++i) {
    t_[i] = prior_rng.normal() - config.alpha0;
    w_[i] = tau * prior_rng.normal();
  }
  const CubicBSpline shape(breakpoints_, std::vector<double>(CubicBSpline::basis_count(breakpoints_.size()), 0.0));
  basis_.resize(s);
  region_.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    if (t_[i] < shape.lower()) {
      region_[i] = -1;
    } else if (t_[i] > shape.upper()) {
      region_[i] = 1;
    } else {
      region_[i] = 0;
      basis_[i] = shape.local_basis(t_[i]);
    }
  }
  target_ = target(s, target_rng);
  if (target_.size() != s) throw std::invalid_argument("match: target sampler returned the wrong count");
  std::sort(target_.begin(), target_.end());
}

std::vector<double> FrozenDraws::sorted_draws(std::span<const double> phi) const {
  const std::size_t k = phi.size();
  const std::size_t m = breakpoints_.size() - 1;
  const double lo = breakpoints_.front();
  const double hi = breakpoints_.back();
  const double lower_slope = 3.0 * (phi[1] - phi[0]) / (breakpoints_[1] - breakpoints_[0]);
  const double upper_slope = 3.0 * (phi[k - 1] - phi[k - 2]) / (breakpoints_[m] - breakpoints_[m - 1]);
  std::vector<double> out(w_.size());
  for (std::size_t i = 0; i < w_.size(); ++i) {
    double t;
    switch (region_[i]) {
      case -1:
        t = phi[0] + lower_slope * (t_[i] - lo);
        break;
      case 1:
        t = phi[k - 1] + upper_slope * (t_[i] - hi);
        break;
      default: {
        const auto& b = basis_[i];
        const double* c = phi.data() + b.first;
        t = b.values[0] * c[0] + b.values[1] * c[1] + b.values[2] * c[2] + b.values[3] * c[3];
      }
    }
    out[i] = t * w_[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

double sorted_sample_distance(std::span<const double> a, std::span<const double> b, MatchDistance distance) {
  if (distance == MatchDistance::ks) return ks_distance(a, b);
  if (a.size() != b.size()) throw std::invalid_argument("match distance: sample sizes differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += distance == MatchDistance::order_stat_l2 ? d * d : std::abs(d);
  }
  return distance == MatchDistance::order_stat_l2 ? sum : sum / static_cast<double>(a.size());
}

double match_distance(std::span<const double> phi, const FrozenDraws& draws, MatchDistance distance) {
  if (phi.size() != CubicBSpline::basis_count(draws.breakpoints().size())) {
    throw std::invalid_argument("match distance: coefficient count does not match the basis");
  }
  const CubicBSpline spline(draws.breakpoints(), std::vector<double>(phi.begin(), phi.end()));
  if (!is_nondecreasing_on_grid([&spline](double t) { return spline(t); })) {
    return std::numeric_limits<double>::infinity();
  }
  const auto sorted = draws.sorted_draws(phi);
  return sorted_sample_distance(sorted, draws.sorted_target(), distance);
}

MatchResult fit_activation(const TargetSampler& target, const MatchConfig& config) {
  const FrozenDraws draws(target, config);
  std::vector<double> phi = config.initial_coefficients.value_or(
      CubicBSpline::greville_abscissae(draws.breakpoints()));
  const double initial = match_distance(phi, draws, config.distance);
  if (!std::isfinite(initial)) throw std::invalid_argument("match: initial coefficients are not monotone");
  double scale = 1.0;
  for (double c : phi) scale = std::max(scale, std::abs(c));
  const double step = config.step_fraction * scale;

  std::vector<double> best = phi;
  double best_d = initial;
  Rng rng(config.seed, 3);

  if (config.optimizer == MatchOptimizer::anneal) {
    double temperature = config.initial_temperature > 0.0 ? config.initial_temperature : 0.05 * initial;
    double current_d = initial;
    for (std::size_t s = 0; s < config.steps; ++s) {
      const auto k = static_cast<std::size_t>(rng.uniform_index(phi.size()));
      const double old = phi[k];
      phi[k] += step * rng.normal();
      const double d = match_distance(phi, draws, config.distance);
      const bool accept = d <= current_d ||
                          (temperature > 0.0 && std::isfinite(d) && rng.uniform() < std::exp((current_d - d) / temperature));
      if (accept) {
        current_d = d;
        if (d < best_d) {
          best_d = d;
          best = phi;
        }
      } else {
        phi[k] = old;
      }
      temperature *= config.cooling;
    }
  } else {
    // Coordinate grid search with a halving step.
    double h = step;
    for (std::size_t sweep = 0; sweep < config.grid_sweeps; ++sweep) {
      bool improved = false;
      for (std::size_t k = 0; k < best.size(); ++k) {
        std::vector<double> trial = best;
        for (std::size_t g = 1; g <= config.grid_points; ++g) {
          for (double sign : {-1.0, 1.0}) {
            trial[k] = best[k] + sign * h * static_cast<double>(g) / static_cast<double>(config.grid_points);
            const double d = match_distance(trial, draws, config.distance);
            if (d < best_d) {
              best_d = d;
              best[k] = trial[k];
              improved = true;
            }
          }
        }
      }
      if (!improved) h *= 0.5;
    }
  }

  MatchResult result;
  result.initial_distance = initial;
  result.no_improvement = !(best_d < initial);
  result.coefficients = best;
  result.distance = best_d;
  result.activation = ActivationSpec::spline(draws.breakpoints(), best);
  return result;
}

}  // namespace neuroprior
