#pragma once

#include "neuroprior/data.hpp"
#include "neuroprior/gaussian_draw.hpp"
#include "neuroprior/prior.hpp"
#include "neuroprior/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace neuroprior {

/// Full MCMC state. residual caches y - X theta(alpha, w).
struct ChainState {
  Eigen::VectorXd alpha;
  Eigen::VectorXd w;
  double sigma_sq = 1.0;
  Eigen::VectorXd residual;
};

enum class AlphaUpdate { random_walk, exact_relu };
std::string_view to_string(AlphaUpdate update) noexcept;
AlphaUpdate alpha_update_from_string(std::string_view name);

/// Scalar recorded for every stored draw (used for mixing diagnostics).
enum class TraceStatistic { log_posterior, rss, none };
std::string_view to_string(TraceStatistic statistic) noexcept;
TraceStatistic trace_statistic_from_string(std::string_view name);

struct SamplerConfig {
  /// Total sweeps including burn-in.
  std::size_t iterations = 22000;
  std::size_t burn_in = 2000;
  std::size_t thin = 1;
  int inner_repeats = 10;
  double rw_proposal_sd = 2.0;
  AlphaUpdate alpha_update = AlphaUpdate::random_walk;
  WUpdate w_update = WUpdate::automatic;
  /// Inverse-gamma prior on sigma^2; (0, 0) is the 1/sigma^2 prior.
  double sigma_shape = 0.0;
  double sigma_rate = 0.0;
  /// Holds sigma^2 at this value instead of sampling it.
  std::optional<double> fixed_sigma_sq;
  std::uint64_t seed = 1;
  bool store_theta = true;
  bool store_alpha_w = false;
  TraceStatistic trace = TraceStatistic::log_posterior;
  /// Stop sampling once post-burn-in wall-clock exceeds this (0 = no limit).
  double time_budget_seconds = 0.0;
  std::optional<ChainState> initial_state;

  void validate() const;
};

/// Draws after burn-in and thinning, plus running summaries over every
/// post-burn-in sweep. Shared by all samplers in the library.
struct PosteriorSamples {
  std::string method;
  Eigen::MatrixXd theta;  ///< stored x p (empty when not stored)
  Eigen::MatrixXd alpha;  ///< stored x p, only with store_alpha_w
  Eigen::MatrixXd w;
  std::vector<double> sigma_sq;
  std::vector<double> trace;
  /// Post-burn-in seconds elapsed when each stored draw was taken.
  std::vector<double> elapsed;
  Eigen::VectorXd theta_mean;
  /// Fraction of post-burn-in sweeps with theta_j != 0.
  Eigen::VectorXd inclusion_frequency;
  double sigma_sq_mean = 0.0;
  std::size_t post_burn_sweeps = 0;
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
  double burn_in_seconds = 0.0;
  double sampling_seconds = 0.0;
  /// Last state of a neuronized chain (for warm starts); unset for baselines.
  std::optional<ChainState> final_state;

  [[nodiscard]] std::size_t stored() const noexcept { return sigma_sq.size(); }
  [[nodiscard]] double acceptance_rate() const noexcept {
    return proposals == 0 ? 0.0 : static_cast<double>(accepts) / static_cast<double>(proposals);
  }
};

/// Accumulates PosteriorSamples sweep by sweep; used by every sampler.
class SampleRecorder {
 public:
  SampleRecorder(std::string method, Eigen::Index p, const SamplerConfig& config);
  /// Whether the next record() call will store a draw (so callers can skip
  /// computing the trace statistic otherwise).
  [[nodiscard]] bool will_store_next() const noexcept { return (out_.post_burn_sweeps + 1) % thin_ == 0; }
  /// Call once per post-burn-in sweep. Returns true if the draw was stored.
  bool record(const Eigen::VectorXd& theta, double sigma_sq, double trace_value, double elapsed,
              const Eigen::VectorXd* alpha = nullptr, const Eigen::VectorXd* w = nullptr);
  [[nodiscard]] PosteriorSamples finish(double burn_in_seconds, double sampling_seconds,
                                        std::uint64_t proposals, std::uint64_t accepts);

 private:
  PosteriorSamples out_;
  std::vector<double> theta_rows_;
  std::vector<double> alpha_rows_;
  std::vector<double> w_rows_;
  Eigen::VectorXd theta_sum_;
  Eigen::VectorXd nonzero_count_;
  double sigma_sum_ = 0.0;
  std::size_t thin_;
  bool store_theta_;
  bool store_alpha_w_;
  Eigen::Index p_;
};

/// theta_j = T(alpha_j - alpha0) w_j for every j.
Eigen::VectorXd theta_of(const ActivationSpec& activation, double alpha0, const Eigen::VectorXd& alpha,
                         const Eigen::VectorXd& w);

/// log target for alpha_j with w_j integrated out, given b = X_j' r_j where
/// r_j excludes predictor j:  -log(v)/2 - alpha^2/2 + b^2 T^2 / (2 sigma^2 v),
/// v = ||X_j||^2 T^2 + 1/tau^2 (the same as v m^2 / (2 sigma^2) with m = b T / v).
double log_marginal_alpha_target(double alpha, double b, double col_sq_norm, const NeuronizedPrior& prior,
                                 double sigma_sq);

/// alpha_j | w_j for the ReLU activation: with probability kappa
/// N(0, 1) truncated to (-inf, alpha0], otherwise N(mean, sd^2) truncated to (alpha0, inf).
struct ReluAlphaConditional {
  double kappa = 0.0;
  double mean = 0.0;
  double sd = 1.0;
  double alpha0 = 0.0;

  [[nodiscard]] double cdf(double x) const;
  double sample(Rng& rng) const;
};

/// b = X_j' r_j with r_j excluding predictor j.
ReluAlphaConditional relu_alpha_conditional(double w, double b, double col_sq_norm, double alpha0,
                                            double sigma_sq);

/// Exact log posterior of (alpha, w, sigma^2) up to a constant, for the
/// sigma-scaled prior and an inverse-gamma(shape, rate) prior on sigma^2.
double log_posterior(const RegressionData& data, const NeuronizedPrior& prior, const ChainState& state,
                     double sigma_shape = 0.0, double sigma_rate = 0.0);

/// Inverse-gamma((n+p)/2 + a0, ||r||^2/2 + w'w/(2 tau^2) + b0) draw.
double gibbs_sigma_sq(const ChainState& state, const NeuronizedPrior& prior, double a0, double b0, Rng& rng);

/// MCMC for the neuronized prior. Throws std::runtime_error if
/// the state turns non-finite, naming the sweep.
PosteriorSamples run_chain(const RegressionData& data, const NeuronizedPrior& prior,
                           const SamplerConfig& config);

}  // namespace neuroprior
