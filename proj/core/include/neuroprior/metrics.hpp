#pragma once

#include "neuroprior/data.hpp"
#include "neuroprior/map.hpp"
#include "neuroprior/sampler.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace neuroprior {

/// ||theta_hat - theta0||^2 / p. Throws std::invalid_argument on length mismatch.
double mse(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta0);

struct FlaggedValue {
  double value = 0.0;
  /// Set when the input was degenerate (zero vector, constant chain).
  bool degenerate = false;
};

/// Cosine similarity; 0 with the degenerate flag when either vector is zero.
FlaggedValue angle(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta0);

struct SelectionTruth {
  Eigen::VectorXd theta0;
  std::vector<char> support;
  explicit SelectionTruth(Eigen::VectorXd theta);
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

/// `selected` holds 0-based indices.
Confusion confusion(const std::vector<std::size_t>& selected, const SelectionTruth& truth);
/// Matthews correlation; 0 when any denominator factor vanishes.
double mcc(const Confusion& c);
double mcc(const std::vector<std::size_t>& selected, const SelectionTruth& truth);

/// N / (1 + 2 sum rho(t)) with the sum stopped at the first t where
/// rho(t) + rho(t+1) <= 0, clipped to (0, N]. Autocorrelations come from an
/// FFT. A constant chain returns N with the degenerate flag. Needs N >= 10.
FlaggedValue ess(std::span<const double> chain);

/// Sample autocorrelations rho(0..max_lag) (biased estimator, divisor N).
std::vector<double> autocorrelation(std::span<const double> chain, std::size_t max_lag);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::span<const double> a, std::span<const double> b);

enum class PathMethod { map, posterior_mean };

struct PathSpec {
  PathMethod method = PathMethod::map;
  NeuronizedPrior prior;
  /// Which prior hyperparameter the grid varies.
  ScheduleKind kind = ScheduleKind::alpha0_path;
  MapConfig map;
  SamplerConfig sampler;
};

/// Row g is the estimate at grid[g], warm-started from row g-1. The grid is
/// used in the given order (weak to strong shrinkage).
Eigen::MatrixXd solution_path(const RegressionData& data, const PathSpec& spec, const std::vector<double>& grid);

}  // namespace neuroprior
