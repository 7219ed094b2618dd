#include "neuroprior/baselines.hpp"

#include "neuroprior/gaussian_draw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace neuroprior {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Burn-in, budget and recording logic shared by the baseline samplers.
template <class Sweep, class Trace>
PosteriorSamples drive_chain(const std::string& method, Eigen::Index p, const SamplerConfig& config,
                             const Eigen::VectorXd& theta, const double& sigma_sq, Sweep&& sweep, Trace&& trace,
                             const std::uint64_t& proposals, const std::uint64_t& accepts) {
  config.validate();
  SampleRecorder recorder(method, p, config);
  const auto start = Clock::now();
  for (std::size_t it = 0; it < config.burn_in; ++it) sweep(it);
  const double burn_seconds = seconds_since(start);
  const auto sampling_start = Clock::now();
  for (std::size_t it = config.burn_in; it < config.iterations; ++it) {
    sweep(it);
    const double elapsed = seconds_since(sampling_start);
    const double stat = recorder.will_store_next() && config.trace != TraceStatistic::none ? trace() : 0.0;
    recorder.record(theta, sigma_sq, stat, elapsed);
    if (config.time_budget_seconds > 0.0 && elapsed >= config.time_budget_seconds) break;
  }
  return recorder.finish(burn_seconds, seconds_since(sampling_start), proposals, accepts);
}

void check_finite(double sigma_sq, const Eigen::VectorXd& theta, std::size_t iteration, const char* method) {
  if (!std::isfinite(sigma_sq) || !theta.allFinite()) {
    std::ostringstream msg;
    msg << method << ": non-finite state at sweep " << iteration << " (sigma^2=" << sigma_sq << ")";
    throw std::runtime_error(msg.str());
  }
}

// Cholesky factor of A = X_g'X_g + I/c for the included set, with z = L^{-1} X_g'y.
struct ModelFactor {
  std::vector<Eigen::Index> index;
  Eigen::MatrixXd l;
  Eigen::VectorXd z;

  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(index.size()); }

  double log_det() const { return 2.0 * l.diagonal().array().log().sum(); }

  void add(Eigen::Index j, const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double inv_c) {
    const Eigen::Index k = size();
    Eigen::VectorXd a(k);
    for (Eigen::Index i = 0; i < k; ++i) a(i) = gram(index[static_cast<std::size_t>(i)], j);
    Eigen::VectorXd row = k > 0 ? Eigen::VectorXd(l.triangularView<Eigen::Lower>().solve(a)) : Eigen::VectorXd();
    double d2 = gram(j, j) + inv_c - row.squaredNorm();
    if (!(d2 > 0.0)) d2 = 1e-10;
    const double d = std::sqrt(d2);
    l.conservativeResize(k + 1, k + 1);
    l.col(k).setZero();
    if (k > 0) l.row(k).head(k) = row.transpose();
    l(k, k) = d;
    z.conservativeResize(k + 1);
    z(k) = (xty(j) - (k > 0 ? row.dot(z.head(k)) : 0.0)) / d;
    index.push_back(j);
  }

  void remove_at(Eigen::Index q, const Eigen::VectorXd& xty) {
    const Eigen::Index k = size();
    const Eigen::Index tail = k - q - 1;
    Eigen::MatrixXd next(k - 1, k - 1);
    next.setZero();
    next.topLeftCorner(q, q) = l.topLeftCorner(q, q);
    if (tail > 0) {
      next.bottomLeftCorner(tail, q) = l.bottomLeftCorner(tail, q);
      // Trailing block absorbs the removed column: L33 L33' + v v'.
      Eigen::MatrixXd l33 = l.bottomRightCorner(tail, tail);
      Eigen::VectorXd v = l.col(q).tail(tail);
      for (Eigen::Index c = 0; c < tail; ++c) {
        const double r = std::hypot(l33(c, c), v(c));
        const double cs = r / l33(c, c);
        const double sn = v(c) / l33(c, c);
        l33(c, c) = r;
        for (Eigen::Index i = c + 1; i < tail; ++i) {
          l33(i, c) = (l33(i, c) + sn * v(i)) / cs;
          v(i) = cs * v(i) - sn * l33(i, c);
        }
      }
      next.bottomRightCorner(tail, tail) = l33;
    }
    l = std::move(next);
    index.erase(index.begin() + q);
    Eigen::VectorXd b(k - 1);
    for (Eigen::Index i = 0; i < k - 1; ++i) b(i) = xty(index[static_cast<std::size_t>(i)]);
    z = k > 1 ? Eigen::VectorXd(l.triangularView<Eigen::Lower>().solve(b)) : Eigen::VectorXd();
  }

  void flip(Eigen::Index j, const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double inv_c) {
    const auto it = std::find(index.begin(), index.end(), j);
    if (it == index.end()) {
      add(j, gram, xty, inv_c);
    } else {
      remove_at(static_cast<Eigen::Index>(it - index.begin()), xty);
    }
  }
};

double factor_log_marginal(const ModelFactor& f, double yty, double n, double slab) {
  const double s = std::max(yty - f.z.squaredNorm(), std::numeric_limits<double>::min());
  return -0.5 * static_cast<double>(f.size()) * std::log(slab) - 0.5 * f.log_det() - 0.5 * n * std::log(s);
}

}  // namespace

double spsl_log_marginal(const RegressionData& data, const std::vector<char>& gamma, double slab_variance) {
  if (static_cast<Eigen::Index>(gamma.size()) != data.p()) throw std::invalid_argument("spsl: gamma size mismatch");
  if (!(slab_variance > 0.0)) throw std::invalid_argument("spsl: slab variance must be positive");
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    if (gamma[static_cast<std::size_t>(j)]) idx.push_back(j);
  }
  const auto k = static_cast<Eigen::Index>(idx.size());
  const double yty = data.y().squaredNorm();
  const double n = static_cast<double>(data.n());
  if (k == 0) return -0.5 * n * std::log(std::max(yty, std::numeric_limits<double>::min()));
  Eigen::MatrixXd xg(data.n(), k);
  for (Eigen::Index i = 0; i < k; ++i) xg.col(i) = data.x().col(idx[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd a = xg.transpose() * xg;
  a.diagonal().array() += 1.0 / slab_variance;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    a.diagonal().array() += 1e-10;
    llt.compute(a);
  }
  const Eigen::VectorXd z = llt.matrixL().solve(xg.transpose() * data.y());
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double s = std::max(yty - z.squaredNorm(), std::numeric_limits<double>::min());
  return -0.5 * static_cast<double>(k) * std::log(slab_variance) - 0.5 * log_det - 0.5 * n * std::log(s);
}

double spsl_log_model_prior(const std::vector<char>& gamma, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("spsl: eta must lie in (0, 1)");
  const auto k = static_cast<double>(std::count(gamma.begin(), gamma.end(), char{1}));
  const auto p = static_cast<double>(gamma.size());
  return k * std::log(eta) + (p - k) * std::log1p(-eta);
}

PosteriorSamples spsl_gamma_mcmc(const RegressionData& data, const SpslGammaConfig& spsl,
                                 const SamplerConfig& config) {
  if (!(spsl.slab_variance > 0.0)) throw std::invalid_argument("spsl: slab variance must be positive");
  if (!(spsl.eta > 0.0 && spsl.eta < 1.0)) throw std::invalid_argument("spsl: eta must lie in (0, 1)");
  const Eigen::Index p = data.p();
  const double n = static_cast<double>(data.n());
  const Eigen::MatrixXd gram = data.x().transpose() * data.x();
  const Eigen::VectorXd xty = data.x().transpose() * data.y();
  const double yty = data.y().squaredNorm();
  const double inv_c = 1.0 / spsl.slab_variance;
  const double log_eta_ratio = std::log(spsl.eta) - std::log1p(-spsl.eta);

  Rng rng(config.seed);
  ModelFactor current;
  double log_post = factor_log_marginal(current, yty, n, spsl.slab_variance);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  double sigma_sq = config.fixed_sigma_sq.value_or(1.0);
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;

  auto sweep = [&](std::size_t iteration) {
    ModelFactor proposal = current;
    const bool single = p < 2 || rng.uniform() < spsl.single_flip_probability;
    const auto j1 = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(p)));
    double delta_k = 0.0;
    auto flip = [&](Eigen::Index j) {
      const bool was_in = std::find(proposal.index.begin(), proposal.index.end(), j) != proposal.index.end();
      delta_k += was_in ? -1.0 : 1.0;
      proposal.flip(j, gram, xty, inv_c);
    };
    flip(j1);
    if (!single) {
      auto j2 = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(p - 1)));
      if (j2 >= j1) ++j2;
      flip(j2);
    }
    // Model prior ratio is eta/(1-eta) per added variable.
    const double candidate = factor_log_marginal(proposal, yty, n, spsl.slab_variance);
    const double log_ratio = candidate - log_post + delta_k * log_eta_ratio;
    ++proposals;
    if (std::log(rng.uniform()) < log_ratio) {
      current = std::move(proposal);
      log_post = candidate;
      ++accepts;
    }

    // sigma^2 | gamma, y and theta_gamma | sigma^2, gamma, y.
    const double s = std::max(yty - current.z.squaredNorm(), std::numeric_limits<double>::min());
    sigma_sq = config.fixed_sigma_sq ? *config.fixed_sigma_sq : rng.inverse_gamma(0.5 * n, 0.5 * s);
    theta.setZero();
    const Eigen::Index k = current.size();
    if (k > 0) {
      Eigen::VectorXd e(k);
      for (Eigen::Index i = 0; i < k; ++i) e(i) = rng.normal();
      const Eigen::VectorXd tg =
          current.l.triangularView<Eigen::Lower>().transpose().solve(current.z + std::sqrt(sigma_sq) * e);
      for (Eigen::Index i = 0; i < k; ++i) theta(current.index[static_cast<std::size_t>(i)]) = tg(i);
    }
    check_finite(sigma_sq, theta, iteration, "spsl-gamma");
  };
  auto trace = [&]() {
    if (config.trace == TraceStatistic::rss) return (data.y() - data.x() * theta).squaredNorm();
    const double k = static_cast<double>(current.size());
    return log_post + k * std::log(spsl.eta) + (static_cast<double>(p) - k) * std::log1p(-spsl.eta);
  };
  return drive_chain("spsl-gamma", p, config, theta, sigma_sq, sweep, trace, proposals, accepts);
}

namespace {

enum class LocalPrior { laplace, horseshoe };

PosteriorSamples scale_mixture_gibbs(const RegressionData& data, double tau_w_sq, const SamplerConfig& config,
                                     LocalPrior kind) {
  if (!(tau_w_sq > 0.0)) throw std::invalid_argument("baseline: tau_w_sq must be positive");
  const Eigen::Index p = data.p();
  const double n = static_cast<double>(data.n());
  const WUpdate strategy = resolve_w_update(config.w_update == WUpdate::block_relu ? WUpdate::full : config.w_update,
                                            false, data.n(), p);
  Eigen::MatrixXd gram;
  Eigen::VectorXd xty;
  if (strategy != WUpdate::fast_np) {
    gram = data.x().transpose() * data.x();
    xty = data.x().transpose() * data.y();
  }
  Rng rng(config.seed);
  // Local variance multipliers: theta_j | . ~ N(0, sigma^2 * scale_sq_j) with
  // scale_sq = tau_j^2 (Laplace) or tau^2 lambda_j^2 (horseshoe). eta_j stores
  // 1/tau_j^2 or 1/lambda_j^2.
  Eigen::VectorXd eta = Eigen::VectorXd::Ones(p);
  Eigen::VectorXd scale(p);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = data.y();
  double sigma_sq = config.fixed_sigma_sq.value_or(1.0);
  const double lambda_sq = 1.0 / tau_w_sq;
  std::uint64_t none = 0;

  auto local_scale_sq = [&](Eigen::Index j) {
    return kind == LocalPrior::laplace ? 1.0 / eta(j) : tau_w_sq / eta(j);
  };

  auto sweep = [&](std::size_t iteration) {
    for (Eigen::Index j = 0; j < p; ++j) scale(j) = std::sqrt(local_scale_sq(j));
    // theta = scale .* w with w | . drawn as a unit-prior-variance weight vector.
    const WDrawInputs in{data.x(), data.y(), gram.size() ? &gram : nullptr, xty.size() ? &xty : nullptr, scale, 1.0,
                         sigma_sq};
    theta = scale.cwiseProduct(w_draw(strategy, in, rng));
    residual = data.y() - data.x() * theta;

    double penalty = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double th2 = theta(j) * theta(j);
      if (kind == LocalPrior::laplace) {
        const double mu = th2 > 0.0 ? std::sqrt(lambda_sq * sigma_sq / th2) : std::numeric_limits<double>::infinity();
        eta(j) = rng.inverse_gaussian(mu, lambda_sq);
        eta(j) = std::max(eta(j), std::numeric_limits<double>::min());
      } else {
        // eta | theta ∝ exp(-mu eta) / (1 + eta): slice u under 1/(1+eta), then
        // Exp(mu) truncated to eta < (1-u)/u by inverse CDF.
        const double mu = th2 / (2.0 * sigma_sq * tau_w_sq);
        const double u = rng.uniform() / (1.0 + eta(j));
        const double bound = (1.0 - u) / u;
        const double v = rng.uniform();
        double next;
        if (mu * bound < 1e-12) {
          next = v * bound;
        } else {
          next = -std::log1p(v * std::expm1(-mu * bound)) / mu;
        }
        eta(j) = std::clamp(next, std::numeric_limits<double>::min(), bound);
      }
      penalty += th2 / local_scale_sq(j);
    }
    if (config.fixed_sigma_sq) {
      sigma_sq = *config.fixed_sigma_sq;
    } else {
      const double shape = 0.5 * (n + static_cast<double>(p)) + config.sigma_shape;
      const double rate = 0.5 * residual.squaredNorm() + 0.5 * penalty + config.sigma_rate;
      sigma_sq = rng.inverse_gamma(shape, rate);
    }
    check_finite(sigma_sq, theta, iteration, kind == LocalPrior::laplace ? "blasso" : "horseshoe");
  };

  auto trace = [&]() {
    if (config.trace == TraceStatistic::rss) return residual.squaredNorm();
    // Joint log density of (theta, local scales, sigma^2) in the sampler's own coordinates.
    const double log_s2 = std::log(sigma_sq);
    double value = -0.5 * (n + static_cast<double>(p)) * log_s2 - residual.squaredNorm() / (2.0 * sigma_sq) -
                   (config.sigma_shape + 1.0) * log_s2 - config.sigma_rate / sigma_sq;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double s2 = local_scale_sq(j);
      value += -0.5 * std::log(s2) - theta(j) * theta(j) / (2.0 * sigma_sq * s2);
      if (kind == LocalPrior::laplace) {
        value += -0.5 * lambda_sq * s2;
      } else {
        const double lam2 = 1.0 / eta(j);
        value += -0.5 * std::log(lam2) - std::log1p(lam2);
      }
    }
    return value;
  };
  return drive_chain(kind == LocalPrior::laplace ? "blasso" : "horseshoe", p, config, theta, sigma_sq, sweep, trace,
                     none, none);
}

}  // namespace

PosteriorSamples bayesian_lasso_gibbs(const RegressionData& data, double tau_w_sq, const SamplerConfig& config) {
  return scale_mixture_gibbs(data, tau_w_sq, config, LocalPrior::laplace);
}

PosteriorSamples horseshoe_gibbs(const RegressionData& data, double tau_w_sq, const SamplerConfig& config) {
  return scale_mixture_gibbs(data, tau_w_sq, config, LocalPrior::horseshoe);
}

std::vector<std::size_t> hard_threshold_select(const Eigen::VectorXd& theta_mean, double sigma_hat, double c) {
  std::vector<std::size_t> out;
  const double cut = c * sigma_hat;
  for (Eigen::Index j = 0; j < theta_mean.size(); ++j) {
    if (std::abs(theta_mean(j)) > cut) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

Eigen::VectorXd lasso_coordinate_descent(const RegressionData& data, double lambda, const Eigen::VectorXd* start,
                                         double tolerance, std::size_t max_sweeps) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lasso: lambda must be non-negative");
  const Eigen::MatrixXd& x = data.x();
  const Eigen::VectorXd& norms = data.column_sq_norms();
  Eigen::VectorXd theta = start ? *start : Eigen::VectorXd::Zero(data.p());
  if (theta.size() != data.p()) throw std::invalid_argument("lasso: start has the wrong length");
  Eigen::VectorXd r = data.y() - x * theta;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double biggest = 0.0;
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      if (norms(j) == 0.0) continue;
      const double z = x.col(j).dot(r) + norms(j) * theta(j);
      const double next = std::copysign(std::max(std::abs(z) - lambda, 0.0), z) / norms(j);
      const double delta = next - theta(j);
      if (delta != 0.0) {
        r.noalias() -= delta * x.col(j);
        theta(j) = next;
        biggest = std::max(biggest, std::abs(delta));
      }
    }
    if (biggest <= tolerance) break;
  }
  return theta;
}

LassoCvResult lasso_cv(const RegressionData& data, std::size_t folds, std::size_t grid_size, double min_ratio,
                       std::uint64_t seed) {
  const Eigen::Index n = data.n();
  if (folds < 2 || static_cast<Eigen::Index>(folds) > n) {
    throw std::invalid_argument("lasso_cv: need 2 <= folds <= n");
  }
  if (grid_size < 2 || !(min_ratio > 0.0 && min_ratio < 1.0)) {
    throw std::invalid_argument("lasso_cv: need grid_size >= 2 and 0 < min_ratio < 1");
  }
  const double nd = static_cast<double>(n);
  const double lambda_max = (data.x().transpose() * data.y()).cwiseAbs().maxCoeff();
  if (!(lambda_max > 0.0)) throw std::invalid_argument("lasso_cv: X'y is zero");

  LassoCvResult out;
  for (std::size_t g = 0; g < grid_size; ++g) {
    const double frac = static_cast<double>(g) / static_cast<double>(grid_size - 1);
    out.grid.push_back(lambda_max * std::pow(min_ratio, frac));
  }
  out.cv_error.assign(grid_size, 0.0);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_index(i + 1))]);
  }
  std::vector<std::size_t> fold_of(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < order.size(); ++k) fold_of[static_cast<std::size_t>(order[k])] = k % folds;

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i) (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    const RegressionData fit(data.x()(train, Eigen::all), data.y()(train));
    const Eigen::MatrixXd x_test = data.x()(test, Eigen::all);
    const Eigen::VectorXd y_test = data.y()(test);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(data.p());
    for (std::size_t g = 0; g < grid_size; ++g) {
      theta = lasso_coordinate_descent(fit, static_cast<double>(train.size()) / nd * out.grid[g], &theta);
      out.cv_error[g] += (y_test - x_test * theta).squaredNorm() / nd;
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(out.cv_error.begin(), out.cv_error.end()) - out.cv_error.begin());
  out.lambda = out.grid[best];
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(data.p());
  for (std::size_t g = 0; g <= best; ++g) theta = lasso_coordinate_descent(data, out.grid[g], &theta);
  out.theta = theta;
  out.sigma_sq = (data.y() - data.x() * theta).squaredNorm() / nd;
  return out;
}

}  // namespace neuroprior
