#include "neuroprior/sampler.hpp"

#include "neuroprior/normal.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace neuroprior {

std::string_view to_string(AlphaUpdate update) noexcept {
  return update == AlphaUpdate::random_walk ? "random_walk" : "exact_relu";
}

AlphaUpdate alpha_update_from_string(std::string_view name) {
  if (name == "random_walk" || name == "rw") return AlphaUpdate::random_walk;
  if (name == "exact_relu" || name == "exact") return AlphaUpdate::exact_relu;
  throw std::invalid_argument("unknown alpha update '" + std::string(name) + "'");
}

std::string_view to_string(TraceStatistic statistic) noexcept {
  switch (statistic) {
    case TraceStatistic::log_posterior:
      return "log_posterior";
    case TraceStatistic::rss:
      return "rss";
    case TraceStatistic::none:
      return "none";
  }
  return "unknown";
}

TraceStatistic trace_statistic_from_string(std::string_view name) {
  if (name == "log_posterior") return TraceStatistic::log_posterior;
  if (name == "rss") return TraceStatistic::rss;
  if (name == "none") return TraceStatistic::none;
  throw std::invalid_argument("unknown trace statistic '" + std::string(name) + "'");
}

void SamplerConfig::validate() const {
  if (iterations < burn_in) throw std::invalid_argument("sampler: iterations must be >= burn_in");
  if (thin < 1) throw std::invalid_argument("sampler: thin must be >= 1");
  if (inner_repeats < 1) throw std::invalid_argument("sampler: inner_repeats must be >= 1");
  if (!(rw_proposal_sd > 0.0)) throw std::invalid_argument("sampler: proposal sd must be positive");
  if (sigma_shape < 0.0 || sigma_rate < 0.0) throw std::invalid_argument("sampler: sigma prior must be >= 0");
  if (fixed_sigma_sq && !(*fixed_sigma_sq > 0.0)) {
    throw std::invalid_argument("sampler: fixed sigma^2 must be positive");
  }
  if (time_budget_seconds < 0.0) throw std::invalid_argument("sampler: time budget must be >= 0");
}

// ---------------------------------------------------------------------------
// SampleRecorder

SampleRecorder::SampleRecorder(std::string method, Eigen::Index p, const SamplerConfig& config)
    : theta_sum_(Eigen::VectorXd::Zero(p)),
      nonzero_count_(Eigen::VectorXd::Zero(p)),
      thin_(config.thin),
      store_theta_(config.store_theta),
      store_alpha_w_(config.store_alpha_w),
      p_(p) {
  out_.method = std::move(method);
  const std::size_t expected =
      config.time_budget_seconds > 0.0 ? 0 : (config.iterations - config.burn_in) / config.thin;
  out_.sigma_sq.reserve(expected);
  out_.trace.reserve(expected);
  out_.elapsed.reserve(expected);
  if (store_theta_) theta_rows_.reserve(expected * static_cast<std::size_t>(p));
}

bool SampleRecorder::record(const Eigen::VectorXd& theta, double sigma_sq, double trace_value, double elapsed,
                            const Eigen::VectorXd* alpha, const Eigen::VectorXd* w) {
  ++out_.post_burn_sweeps;
  theta_sum_ += theta;
  for (Eigen::Index j = 0; j < p_; ++j) {
    if (theta(j) != 0.0) nonzero_count_(j) += 1.0;
  }
  sigma_sum_ += sigma_sq;
  if (out_.post_burn_sweeps % thin_ != 0) return false;
  out_.sigma_sq.push_back(sigma_sq);
  out_.trace.push_back(trace_value);
  out_.elapsed.push_back(elapsed);
  if (store_theta_) theta_rows_.insert(theta_rows_.end(), theta.data(), theta.data() + p_);
  if (store_alpha_w_ && alpha != nullptr && w != nullptr) {
    alpha_rows_.insert(alpha_rows_.end(), alpha->data(), alpha->data() + p_);
    w_rows_.insert(w_rows_.end(), w->data(), w->data() + p_);
  }
  return true;
}

namespace {

Eigen::MatrixXd rows_to_matrix(const std::vector<double>& rows, Eigen::Index p) {
  if (rows.empty()) return Eigen::MatrixXd(0, p);
  const Eigen::Index count = static_cast<Eigen::Index>(rows.size()) / p;
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      rows.data(), count, p);
}

}  // namespace

PosteriorSamples SampleRecorder::finish(double burn_in_seconds, double sampling_seconds,
                                        std::uint64_t proposals, std::uint64_t accepts) {
  const double count = static_cast<double>(out_.post_burn_sweeps);
  if (out_.post_burn_sweeps > 0) {
    out_.theta_mean = theta_sum_ / count;
    out_.inclusion_frequency = nonzero_count_ / count;
    out_.sigma_sq_mean = sigma_sum_ / count;
  } else {
    out_.theta_mean = Eigen::VectorXd::Zero(p_);
    out_.inclusion_frequency = Eigen::VectorXd::Zero(p_);
  }
  out_.theta = rows_to_matrix(theta_rows_, p_);
  out_.alpha = rows_to_matrix(alpha_rows_, p_);
  out_.w = rows_to_matrix(w_rows_, p_);
  out_.burn_in_seconds = burn_in_seconds;
  out_.sampling_seconds = sampling_seconds;
  out_.proposals = proposals;
  out_.accepts = accepts;
  return std::move(out_);
}

// ---------------------------------------------------------------------------
// Conditionals

Eigen::VectorXd theta_of(const ActivationSpec& activation, double alpha0, const Eigen::VectorXd& alpha,
                         const Eigen::VectorXd& w) {
  Eigen::VectorXd theta(alpha.size());
  for (Eigen::Index j = 0; j < alpha.size(); ++j) theta(j) = activation(alpha(j) - alpha0) * w(j);
  return theta;
}

double log_marginal_alpha_target(double alpha, double b, double col_sq_norm, const NeuronizedPrior& prior,
                                 double sigma_sq) {
  const double t = prior.activation(alpha - prior.alpha0);
  const double t2 = t * t;
  const double v = col_sq_norm * t2 + 1.0 / prior.tau_w_sq;
  return -0.5 * std::log(v) - 0.5 * alpha * alpha + b * b * t2 / (2.0 * sigma_sq * v);
}

double ReluAlphaConditional::cdf(double x) const {
  if (x <= alpha0) {
    return kappa * std::exp(normal_log_cdf(x) - normal_log_cdf(alpha0));
  }
  const double lo = (alpha0 - mean) / sd;
  const double hi = (x - mean) / sd;
  // Mass of (alpha0, x] relative to (alpha0, inf), from the upper tails.
  const double log_tail_lo = normal_log_sf(lo);
  const double ratio = -std::expm1(normal_log_sf(hi) - log_tail_lo);
  return kappa + (1.0 - kappa) * ratio;
}

double ReluAlphaConditional::sample(Rng& rng) const {
  if (rng.uniform() < kappa) return sample_truncated_normal_below(rng, 0.0, 1.0, alpha0);
  return sample_truncated_normal_above(rng, mean, sd, alpha0);
}

ReluAlphaConditional relu_alpha_conditional(double w, double b, double col_sq_norm, double alpha0,
                                            double sigma_sq) {
  // With r~ = r_j + X_j alpha0 w:  X_j' r~ = b + alpha0 w ||X_j||^2 and
  // ||r~||^2 - ||r_j||^2 = 2 alpha0 w b + alpha0^2 w^2 ||X_j||^2.
  const double w2x = w * w * col_sq_norm;
  const double denom = w2x + sigma_sq;
  const double xr_tilde = b + alpha0 * w * col_sq_norm;
  ReluAlphaConditional c;
  c.alpha0 = alpha0;
  c.mean = w * xr_tilde / denom;
  const double var = sigma_sq / denom;
  c.sd = std::sqrt(var);
  const double delta_rss = 2.0 * alpha0 * w * b + alpha0 * alpha0 * w2x;
  const double log_slab = normal_log_sf((alpha0 - c.mean) / c.sd) + std::log(c.sd) +
                          c.mean * c.mean / (2.0 * var) - delta_rss / (2.0 * sigma_sq);
  const double log_spike = normal_log_cdf(alpha0);
  // kappa = A / (A + B) evaluated as a logistic of the log ratio.
  const double diff = log_slab - log_spike;
  c.kappa = diff > 0.0 ? std::exp(-diff) / (1.0 + std::exp(-diff)) : 1.0 / (1.0 + std::exp(diff));
  return c;
}

double log_posterior(const RegressionData& data, const NeuronizedPrior& prior, const ChainState& state,
                     double sigma_shape, double sigma_rate) {
  const double n = static_cast<double>(data.n());
  const double p = static_cast<double>(data.p());
  const double s2 = state.sigma_sq;
  const double log_s2 = std::log(s2);
  return -0.5 * (n + p) * log_s2 - state.residual.squaredNorm() / (2.0 * s2) -
         0.5 * state.alpha.squaredNorm() - state.w.squaredNorm() / (2.0 * s2 * prior.tau_w_sq) -
         (sigma_shape + 1.0) * log_s2 - sigma_rate / s2;
}

double gibbs_sigma_sq(const ChainState& state, const NeuronizedPrior& prior, double a0, double b0, Rng& rng) {
  const double n = static_cast<double>(state.residual.size());
  const double p = static_cast<double>(state.w.size());
  const double shape = 0.5 * (n + p) + a0;
  const double rate = 0.5 * state.residual.squaredNorm() + state.w.squaredNorm() / (2.0 * prior.tau_w_sq) + b0;
  return rng.inverse_gamma(shape, rate);
}

// ---------------------------------------------------------------------------
// Neuronized-prior chain

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class ChainRunner {
 public:
  ChainRunner(const RegressionData& data, const NeuronizedPrior& prior, const SamplerConfig& config)
      : data_(data),
        prior_(prior),
        config_(config),
        rng_(config.seed),
        p_(data.p()),
        strategy_(resolve_w_update(config.w_update, prior.activation.kind() == ActivationKind::relu, data.n(),
                                   data.p())) {
    prior_.validate();
    config_.validate();
    if (!prior_.sigma_scaled) {
      // w ~ N(0, tau^2) is the sigma-scaled prior with tau^2 / sigma^2, which
      // only stays fixed when sigma^2 does.
      if (!config_.fixed_sigma_sq) {
        throw std::invalid_argument("sampler: an unscaled weight prior needs a fixed sigma^2");
      }
      prior_.tau_w_sq /= *config_.fixed_sigma_sq;
      prior_.sigma_scaled = true;
    }
    if (config_.alpha_update == AlphaUpdate::exact_relu && prior_.activation.kind() != ActivationKind::relu) {
      throw std::invalid_argument("sampler: exact alpha update requires the ReLU activation");
    }
    if (strategy_ == WUpdate::block_relu && prior_.activation.kind() != ActivationKind::relu) {
      throw std::invalid_argument("sampler: block_relu w update requires the ReLU activation");
    }
    if (strategy_ != WUpdate::fast_np) {
      gram_ = data.x().transpose() * data.x();
      xty_ = data.x().transpose() * data.y();
    }
    init_state();
  }

  PosteriorSamples run() {
    SampleRecorder recorder(method_name(), p_, config_);
    const auto start = Clock::now();
    for (std::size_t it = 0; it < config_.burn_in; ++it) sweep(it);
    const double burn_seconds = seconds_since(start);
    const auto sampling_start = Clock::now();
    const bool budgeted = config_.time_budget_seconds > 0.0;
    double elapsed = 0.0;
    for (std::size_t it = config_.burn_in; it < config_.iterations; ++it) {
      sweep(it);
      elapsed = seconds_since(sampling_start);
      const bool store = recorder.will_store_next();
      const double stat = store ? trace_value() : 0.0;
      recorder.record(theta_, state_.sigma_sq, stat, elapsed, &state_.alpha, &state_.w);
      if (budgeted && elapsed >= config_.time_budget_seconds) break;
    }
    auto out = recorder.finish(burn_seconds, seconds_since(sampling_start), proposals_, accepts_);
    out.final_state = state_;
    return out;
  }

 private:
  std::string method_name() const {
    std::string name = "neuronized-";
    name += to_string(prior_.activation.kind());
    name += config_.alpha_update == AlphaUpdate::exact_relu ? "-exact" : "-rw";
    return name;
  }

  void init_state() {
    if (config_.initial_state) {
      state_ = *config_.initial_state;
      if (state_.alpha.size() != p_ || state_.w.size() != p_) {
        throw std::invalid_argument("sampler: initial state has wrong dimension");
      }
    } else {
      state_.alpha = Eigen::VectorXd::Zero(p_);
      state_.w = Eigen::VectorXd::Zero(p_);
      state_.sigma_sq = 1.0;
    }
    if (config_.fixed_sigma_sq) state_.sigma_sq = *config_.fixed_sigma_sq;
    t_.resize(p_);
    for (Eigen::Index j = 0; j < p_; ++j) t_(j) = prior_.activation(state_.alpha(j) - prior_.alpha0);
    theta_ = t_.cwiseProduct(state_.w);
    resync_residual();
  }

  void resync_residual() {
    state_.residual = data_.y();
    for (Eigen::Index j = 0; j < p_; ++j) {
      if (theta_(j) != 0.0) state_.residual.noalias() -= theta_(j) * data_.x().col(j);
    }
  }

  double trace_value() const {
    switch (config_.trace) {
      case TraceStatistic::log_posterior:
        return log_posterior(data_, prior_, state_, config_.sigma_shape, config_.sigma_rate);
      case TraceStatistic::rss:
        return state_.residual.squaredNorm();
      case TraceStatistic::none:
        break;
    }
    return 0.0;
  }

  void sweep(std::size_t iteration) {
    // Joint w | alpha, sigma^2.
    const WDrawInputs in{data_.x(), data_.y(), gram_.size() ? &gram_ : nullptr, xty_.size() ? &xty_ : nullptr,
                         t_, prior_.tau_w_sq, state_.sigma_sq};
    state_.w = w_draw(strategy_, in, rng_);
    theta_ = t_.cwiseProduct(state_.w);
    resync_residual();

    const double sigma_sq = state_.sigma_sq;
    const double inv_tau_sq = 1.0 / prior_.tau_w_sq;
    const auto& norms = data_.column_sq_norms();
    for (Eigen::Index j = 0; j < p_; ++j) {
      const auto xj = data_.x().col(j);
      if (theta_(j) != 0.0) state_.residual.noalias() += theta_(j) * xj;
      const double b = xj.dot(state_.residual);
      double alpha = state_.alpha(j);
      double w = state_.w(j);
      double t = t_(j);
      if (config_.alpha_update == AlphaUpdate::random_walk) {
        double current = log_marginal_alpha_target(alpha, b, norms(j), prior_, sigma_sq);
        for (int m = 0; m < config_.inner_repeats; ++m) {
          const double proposal = alpha + config_.rw_proposal_sd * rng_.normal();
          const double target = log_marginal_alpha_target(proposal, b, norms(j), prior_, sigma_sq);
          ++proposals_;
          if (std::log(rng_.uniform()) < target - current) {
            alpha = proposal;
            current = target;
            ++accepts_;
          }
        }
        t = prior_.activation(alpha - prior_.alpha0);
        const double v = norms(j) * t * t + inv_tau_sq;
        w = b * t / v + std::sqrt(sigma_sq / v) * rng_.normal();
      } else {
        for (int m = 0; m < config_.inner_repeats; ++m) {
          alpha = relu_alpha_conditional(w, b, norms(j), prior_.alpha0, sigma_sq).sample(rng_);
          t = alpha > prior_.alpha0 ? alpha - prior_.alpha0 : 0.0;
          const double v = norms(j) * t * t + inv_tau_sq;
          w = b * t / v + std::sqrt(sigma_sq / v) * rng_.normal();
        }
      }
      state_.alpha(j) = alpha;
      state_.w(j) = w;
      t_(j) = t;
      theta_(j) = t * w;
      if (theta_(j) != 0.0) state_.residual.noalias() -= theta_(j) * xj;
    }

    if (config_.fixed_sigma_sq) {
      state_.sigma_sq = *config_.fixed_sigma_sq;
    } else {
      state_.sigma_sq = gibbs_sigma_sq(state_, prior_, config_.sigma_shape, config_.sigma_rate, rng_);
    }
    if (!std::isfinite(state_.sigma_sq) || !state_.alpha.allFinite() || !state_.w.allFinite()) {
      std::ostringstream msg;
      msg << "sampler: non-finite state at sweep " << iteration << " (sigma^2=" << state_.sigma_sq
          << ", max|alpha|=" << state_.alpha.cwiseAbs().maxCoeff() << ", max|w|=" << state_.w.cwiseAbs().maxCoeff()
          << ")";
      throw std::runtime_error(msg.str());
    }
  }

  const RegressionData& data_;
  NeuronizedPrior prior_;
  SamplerConfig config_;
  Rng rng_;
  Eigen::Index p_;
  WUpdate strategy_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd xty_;
  ChainState state_;
  Eigen::VectorXd t_;
  Eigen::VectorXd theta_;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepts_ = 0;
};

}  // namespace

PosteriorSamples run_chain(const RegressionData& data, const NeuronizedPrior& prior, const SamplerConfig& config) {
  return ChainRunner(data, prior, config).run();
}

}  // namespace neuroprior
