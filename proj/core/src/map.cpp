#include "neuroprior/map.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace neuroprior {

std::string_view to_string(ScheduleKind kind) noexcept {
  return kind == ScheduleKind::alpha0_path ? "alpha0" : "tau";
}

ScheduleKind schedule_kind_from_string(std::string_view name) {
  if (name == "alpha0" || name == "alpha0_path") return ScheduleKind::alpha0_path;
  if (name == "tau" || name == "tau_path") return ScheduleKind::tau_path;
  throw std::invalid_argument("unknown schedule kind '" + std::string(name) + "'");
}

std::string_view to_string(AlphaObjective objective) noexcept {
  return objective == AlphaObjective::profile ? "profile" : "marginal";
}

AlphaObjective alpha_objective_from_string(std::string_view name) {
  if (name == "profile") return AlphaObjective::profile;
  if (name == "marginal") return AlphaObjective::marginal;
  throw std::invalid_argument("unknown alpha objective '" + std::string(name) + "'");
}

WarmStartSchedule build_schedule(ScheduleKind kind, double target, std::size_t p, std::size_t length) {
  if (length == 0) throw std::invalid_argument("build_schedule: length must be positive");
  if (p == 0) throw std::invalid_argument("build_schedule: p must be positive");
  WarmStartSchedule s{kind, std::vector<double>(length)};
  const double denom = length > 1 ? static_cast<double>(length - 1) : 1.0;
  if (kind == ScheduleKind::alpha0_path) {
    if (!std::isfinite(target)) throw std::invalid_argument("build_schedule: alpha0 target must be finite");
    for (std::size_t i = 0; i < length; ++i) s.values[i] = target * static_cast<double>(i) / denom;
    if (length == 1) s.values[0] = target;
  } else {
    if (!(target > 0.0)) throw std::invalid_argument("build_schedule: tau^2 target must be positive");
    const double c_end = p > 1 ? std::log(target) / std::log(static_cast<double>(p)) : 0.0;
    for (std::size_t i = 0; i < length; ++i) {
      const double c = c_end * static_cast<double>(i) / denom;
      // p^C, written so that p = 1 still interpolates geometrically.
      s.values[i] = p > 1 ? std::pow(static_cast<double>(p), c) : std::pow(target, static_cast<double>(i) / denom);
    }
    s.values.back() = target;
    if (length == 1) s.values[0] = target;
  }
  return s;
}

namespace {

struct AlphaObjectiveFn {
  double b;
  double col_sq_norm;
  const NeuronizedPrior& prior;
  double sigma_sq;
  AlphaObjective kind;

  double operator()(double alpha) const {
    const double t = prior.activation(alpha - prior.alpha0);
    const double t2 = t * t;
    const double v = col_sq_norm * t2 + 1.0 / prior.tau_w_sq;
    double value = -0.5 * alpha * alpha + b * b * t2 / (2.0 * sigma_sq * v);
    if (kind == AlphaObjective::marginal) value -= 0.5 * std::log(v);
    return value;
  }
};

struct Candidate {
  double alpha;
  double value;
};

Candidate maximize_on(const AlphaObjectiveFn& f, double lo, double hi) {
  if (!(hi > lo)) return {lo, f(lo)};
  auto neg = [&f](double a) { return -f(a); };
  constexpr int bits = std::numeric_limits<double>::digits / 2;
  std::uintmax_t max_iter = 200;
  if (!std::isfinite(f(lo)) || !std::isfinite(f(hi))) {
    // Shrink towards the middle once before giving up on the bracket.
    const double mid = 0.5 * (lo + hi);
    lo = 0.5 * (lo + mid);
    hi = 0.5 * (hi + mid);
  }
  if (std::isfinite(f(lo)) && std::isfinite(f(hi))) {
    const auto [x, fx] = boost::math::tools::brent_find_minima(neg, lo, hi, bits, max_iter);
    Candidate best{x, -fx};
    // Brent never evaluates the bracket ends; the maximum may sit on one.
    for (double edge : {lo, hi}) {
      const double v = f(edge);
      if (v > best.value) best = {edge, v};
    }
    if (std::isfinite(best.value)) return best;
  }
  Candidate best{0.0, -std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= 200; ++i) {
    const double a = -8.0 + 16.0 * i / 200.0;
    const double v = f(a);
    if (std::isfinite(v) && v > best.value) best = {a, v};
  }
  return best;
}

}  // namespace

AlphaUpdateResult optimize_alpha_j(double current_alpha, double b, double col_sq_norm, const NeuronizedPrior& prior,
                                   double sigma_sq, AlphaObjective objective) {
  const AlphaObjectiveFn f{b, col_sq_norm, prior, sigma_sq, objective};
  const double a0 = prior.alpha0;
  Candidate left = maximize_on(f, -8.0, std::min(a0, 8.0));
  Candidate right = maximize_on(f, std::max(a0, -8.0), 8.0);
  // Keep points on their own side of alpha0 so the region is unambiguous.
  if (left.alpha > a0) left = {a0, f(a0)};
  const bool current_left = current_alpha <= a0;
  Candidate best = current_left ? left : right;
  const Candidate& other = current_left ? right : left;
  if (other.value > best.value) best = other;
  const double current_value = f(current_alpha);
  if (!(best.value > current_value)) best = {current_alpha, current_value};

  const double t = prior.activation(best.alpha - a0);
  const double v = col_sq_norm * t * t + 1.0 / prior.tau_w_sq;
  return {best.alpha, b * t / v, best.value};
}

double map_objective(const RegressionData& data, const NeuronizedPrior& prior, const Eigen::VectorXd& alpha,
                     const Eigen::VectorXd& w, double sigma_sq) {
  Eigen::VectorXd theta(alpha.size());
  for (Eigen::Index j = 0; j < alpha.size(); ++j) theta(j) = prior.activation(alpha(j) - prior.alpha0) * w(j);
  const Eigen::VectorXd r = data.y() - data.x() * theta;
  return -r.squaredNorm() / (2.0 * sigma_sq) - 0.5 * alpha.squaredNorm() -
         w.squaredNorm() / (2.0 * sigma_sq * prior.tau_w_sq);
}

namespace {

class MapRunner {
 public:
  MapRunner(const RegressionData& data, NeuronizedPrior prior, const MapConfig& config, double sigma_sq)
      : data_(data), prior_(std::move(prior)), config_(config), sigma_sq_(sigma_sq), p_(data.p()) {
    alpha_ = config.initial_alpha.value_or(Eigen::VectorXd::Zero(p_));
    w_ = config.initial_w.value_or(Eigen::VectorXd::Zero(p_));
    if (alpha_.size() != p_ || w_.size() != p_) throw std::invalid_argument("run_map: initial state has wrong size");
    theta_.resize(p_);
    if (!prior_.sigma_scaled) {
      // With sigma^2 fixed, an unscaled weight prior is the scaled one with tau^2 / sigma^2.
      tau_divisor_ = sigma_sq_;
      prior_.tau_w_sq /= tau_divisor_;
      prior_.sigma_scaled = true;
    }
  }

  MapStage run_stage(double hyper, ScheduleKind kind) {
    if (kind == ScheduleKind::alpha0_path) {
      prior_.alpha0 = hyper;
    } else {
      prior_.tau_w_sq = hyper / tau_divisor_;
    }
    prior_.validate();
    refresh();
    MapStage stage;
    stage.hyperparameter = hyper;
    double previous = objective();
    for (std::size_t s = 0; s < config_.max_sweeps; ++s) {
      sweep();
      const double current = objective();
      stage.objective_trace.push_back(current);
      ++stage.sweeps;
      const double gain = current - previous;
      previous = current;
      if (gain < config_.tolerance * std::max(1.0, std::abs(current))) {
        stage.converged = true;
        break;
      }
    }
    return stage;
  }

  MapResult result(std::vector<MapStage> stages) const {
    MapResult r;
    r.theta_hat = theta_;
    r.alpha = alpha_;
    r.w = w_;
    r.objective = map_objective(data_, prior_, alpha_, w_, sigma_sq_);
    r.sigma_sq = sigma_sq_;
    r.stages = std::move(stages);
    r.max_update_decrease = max_decrease_;
    return r;
  }

 private:
  void refresh() {
    for (Eigen::Index j = 0; j < p_; ++j) theta_(j) = prior_.activation(alpha_(j) - prior_.alpha0) * w_(j);
    r_ = data_.y();
    for (Eigen::Index j = 0; j < p_; ++j) {
      if (theta_(j) != 0.0) r_.noalias() -= theta_(j) * data_.x().col(j);
    }
  }

  double objective() const {
    return -r_.squaredNorm() / (2.0 * sigma_sq_) - 0.5 * alpha_.squaredNorm() -
           w_.squaredNorm() / (2.0 * sigma_sq_ * prior_.tau_w_sq);
  }

  void sweep() {
    const auto& norms = data_.column_sq_norms();
    for (Eigen::Index j = 0; j < p_; ++j) {
      const double before = config_.audit ? objective() : 0.0;
      const auto xj = data_.x().col(j);
      if (theta_(j) != 0.0) r_.noalias() += theta_(j) * xj;
      const double b = xj.dot(r_);
      const auto upd = optimize_alpha_j(alpha_(j), b, norms(j), prior_, sigma_sq_, config_.objective);
      alpha_(j) = upd.alpha;
      w_(j) = upd.w;
      theta_(j) = prior_.activation(upd.alpha - prior_.alpha0) * upd.w;
      if (theta_(j) != 0.0) r_.noalias() -= theta_(j) * xj;
      if (config_.audit) max_decrease_ = std::max(max_decrease_, before - objective());
    }
  }

  const RegressionData& data_;
  NeuronizedPrior prior_;
  MapConfig config_;
  double sigma_sq_;
  Eigen::Index p_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd w_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd r_;
  double max_decrease_ = 0.0;
  double tau_divisor_ = 1.0;
};

}  // namespace

MapResult run_map(const RegressionData& data, const NeuronizedPrior& prior, const WarmStartSchedule& schedule,
                  const MapConfig& config) {
  if (schedule.values.empty()) throw std::invalid_argument("run_map: empty schedule");
  if (!(config.tolerance >= 0.0) || config.max_sweeps == 0) throw std::invalid_argument("run_map: bad config");
  const double sigma_sq = config.sigma_sq ? *config.sigma_sq : sigma2_plugin(data);
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("run_map: sigma^2 must be positive");
  MapRunner runner(data, prior, config, sigma_sq);
  std::vector<MapStage> stages;
  stages.reserve(schedule.values.size());
  for (double value : schedule.values) stages.push_back(runner.run_stage(value, schedule.kind));
  return runner.result(std::move(stages));
}

double sigma2_plugin(const RegressionData& data, double max_fraction) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (n < 2) throw std::invalid_argument("sigma2_plugin: need n >= 2");
  const auto cap = static_cast<Eigen::Index>(std::floor(max_fraction * static_cast<double>(n)));
  const Eigen::Index k = std::min({p, cap, n - 1});
  const Eigen::VectorXd& y = data.y();
  if (k <= 0) return y.squaredNorm() / static_cast<double>(n);

  const Eigen::VectorXd yc = y.array() - y.mean();
  std::vector<double> score(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXd xc = data.x().col(j).array() - data.x().col(j).mean();
    const double denom = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
    score[static_cast<std::size_t>(j)] = denom > 0.0 ? std::abs(xc.dot(yc)) / denom : 0.0;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&score](Eigen::Index a, Eigen::Index b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  Eigen::MatrixXd xs(n, k);
  for (Eigen::Index i = 0; i < k; ++i) xs.col(i) = data.x().col(order[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd gram = xs.transpose() * xs;
  const Eigen::VectorXd xty = xs.transpose() * y;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const double scale = gram.diagonal().maxCoeff();
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12 || !ldlt.isPositive()) {
    gram.diagonal().array() += 1e-8 * std::max(scale, 1.0);
    ldlt.compute(gram);
  }
  const Eigen::VectorXd coef = ldlt.solve(xty);
  return (y - xs * coef).squaredNorm() / static_cast<double>(n);
}

}  // namespace neuroprior
