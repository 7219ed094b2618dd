#pragma once

#include "neuroprior/data.hpp"
#include "neuroprior/prior.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace neuroprior {

enum class ScheduleKind { alpha0_path, tau_path };
std::string_view to_string(ScheduleKind kind) noexcept;
ScheduleKind schedule_kind_from_string(std::string_view name);

struct WarmStartSchedule {
  ScheduleKind kind = ScheduleKind::tau_path;
  std::vector<double> values;
};

/// alpha0_path: `length` equispaced values from 0 to target.
/// tau_path: tau_w^2 = p^C with C equispaced from 0 to log(target)/log(p),
/// i.e. geometric from 1 to target.
WarmStartSchedule build_schedule(ScheduleKind kind, double target, std::size_t p, std::size_t length = 20);

/// One-dimensional objective maximized for alpha_j.
///   profile:  -alpha^2/2 + b^2 T^2 / (2 sigma^2 v), the exact maximum over w_j
///             of the joint log posterior; every coordinate update is an ascent step.
///   marginal: the sampler's w-integrated target, which adds -log(v)/2.
enum class AlphaObjective { profile, marginal };
std::string_view to_string(AlphaObjective objective) noexcept;
AlphaObjective alpha_objective_from_string(std::string_view name);

struct MapConfig {
  /// Stop a stage when the objective improves by less than tolerance * |objective|.
  double tolerance = 1e-8;
  std::size_t max_sweeps = 500;
  AlphaObjective objective = AlphaObjective::profile;
  /// Fixed noise variance; sigma2_plugin is used when unset.
  std::optional<double> sigma_sq;
  /// Starting point for the first stage (zeros when unset).
  std::optional<Eigen::VectorXd> initial_alpha;
  std::optional<Eigen::VectorXd> initial_w;
  /// Recompute the log posterior around every coordinate update and record
  /// the largest decrease.
  bool audit = false;
};

struct AlphaUpdateResult {
  double alpha = 0.0;
  double w = 0.0;
  double objective = 0.0;
};

/// Maximizes the chosen alpha objective over (-inf, alpha0] and (alpha0, inf)
/// separately (brackets [-8, min(alpha0, 8)] and [max(alpha0, -8), 8]) and
/// keeps the better one, with ties resolved in favour of the current alpha's
/// region; the current value is also a candidate. w_j is set to m_j.
/// b = X_j' r_j with predictor j removed from r.
AlphaUpdateResult optimize_alpha_j(double current_alpha, double b, double col_sq_norm, const NeuronizedPrior& prior,
                                   double sigma_sq, AlphaObjective objective = AlphaObjective::profile);

/// Joint log posterior with sigma^2 held fixed:
/// -||y - X theta||^2/(2 sigma^2) - ||alpha||^2/2 - ||w||^2/(2 sigma^2 tau^2).
double map_objective(const RegressionData& data, const NeuronizedPrior& prior, const Eigen::VectorXd& alpha,
                     const Eigen::VectorXd& w, double sigma_sq);

struct MapStage {
  double hyperparameter = 0.0;
  std::vector<double> objective_trace;  ///< objective after each sweep
  std::size_t sweeps = 0;
  bool converged = false;
};

struct MapResult {
  Eigen::VectorXd theta_hat;
  Eigen::VectorXd alpha;
  Eigen::VectorXd w;
  double objective = 0.0;
  double sigma_sq = 0.0;
  std::vector<MapStage> stages;
  /// Largest decrease of the exact log posterior over single coordinate
  /// updates (only with audit; 0 means never decreased).
  double max_update_decrease = 0.0;
};

/// Coordinate ascent over (alpha_j, w_j) pairs, warm-started
/// along `schedule`. The schedule overrides prior.alpha0 or prior.tau_w_sq.
MapResult run_map(const RegressionData& data, const NeuronizedPrior& prior, const WarmStartSchedule& schedule,
                  const MapConfig& config = {});

/// Least-squares residual variance on the top-k predictors by |corr(X_j, y)|,
/// k = min(p, floor(max_fraction n), n - 1). Throws for n < 2.
double sigma2_plugin(const RegressionData& data, double max_fraction = 0.1);

}  // namespace neuroprior
