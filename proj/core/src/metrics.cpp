#include "neuroprior/metrics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace neuroprior {

double mse(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta0) {
  if (theta_hat.size() != theta0.size() || theta0.size() == 0) {
    throw std::invalid_argument("mse: vectors must be non-empty and equal length");
  }
  return (theta_hat - theta0).squaredNorm() / static_cast<double>(theta0.size());
}

FlaggedValue angle(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta0) {
  if (theta_hat.size() != theta0.size()) throw std::invalid_argument("angle: length mismatch");
  const double a = theta_hat.norm();
  const double b = theta0.norm();
  if (a == 0.0 || b == 0.0) return {0.0, true};
  return {std::clamp(theta0.dot(theta_hat) / (a * b), -1.0, 1.0), false};
}

SelectionTruth::SelectionTruth(Eigen::VectorXd theta) : theta0(std::move(theta)) {
  support.resize(static_cast<std::size_t>(theta0.size()));
  for (Eigen::Index j = 0; j < theta0.size(); ++j) support[static_cast<std::size_t>(j)] = theta0(j) != 0.0;
}

Confusion confusion(const std::vector<std::size_t>& selected, const SelectionTruth& truth) {
  std::vector<char> chosen(truth.support.size(), 0);
  for (std::size_t j : selected) {
    if (j >= chosen.size()) throw std::invalid_argument("confusion: selected index out of range");
    chosen[j] = 1;
  }
  Confusion c;
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    if (chosen[j]) {
      (truth.support[j] ? c.tp : c.fp)++;
    } else {
      (truth.support[j] ? c.fn : c.tn)++;
    }
  }
  return c;
}

double mcc(const Confusion& c) {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double d = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (d == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(d);
}

double mcc(const std::vector<std::size_t>& selected, const SelectionTruth& truth) {
  return mcc(confusion(selected, truth));
}

std::vector<double> autocorrelation(std::span<const double> chain, std::size_t max_lag) {
  const std::size_t n = chain.size();
  if (n == 0) throw std::invalid_argument("autocorrelation: empty chain");
  double mean = 0.0;
  for (double v : chain) mean += v;
  mean /= static_cast<double>(n);
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<double> padded(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = chain[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (auto& f : freq) f = std::complex<double>(std::norm(f), 0.0);
  std::vector<double> acov;
  fft.inv(acov, freq);
  max_lag = std::min(max_lag, n - 1);
  std::vector<double> rho(max_lag + 1, 0.0);
  if (!(acov[0] > 0.0)) return rho;
  for (std::size_t t = 0; t <= max_lag; ++t) rho[t] = acov[t] / acov[0];
  return rho;
}

FlaggedValue ess(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 10) throw std::invalid_argument("ess: chain must have at least 10 draws");
  const auto [lo, hi] = std::minmax_element(chain.begin(), chain.end());
  const double nd = static_cast<double>(n);
  if (*lo == *hi) return {nd, true};
  const auto rho = autocorrelation(chain, n - 1);
  double sum = 0.0;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    if (rho[t] + rho[t + 1] <= 0.0) break;
    sum += rho[t];
  }
  const double denom = 1.0 + 2.0 * sum;
  double value = denom > 0.0 ? nd / denom : nd;
  value = std::min(value, nd);
  return {value, false};
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: samples must be non-empty");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

Eigen::MatrixXd solution_path(const RegressionData& data, const PathSpec& spec, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("solution_path: empty grid");
  Eigen::MatrixXd path(static_cast<Eigen::Index>(grid.size()), data.p());
  if (spec.method == PathMethod::map) {
    MapConfig cfg = spec.map;
    if (!cfg.sigma_sq) cfg.sigma_sq = sigma2_plugin(data);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const MapResult r = run_map(data, spec.prior, WarmStartSchedule{spec.kind, {grid[g]}}, cfg);
      path.row(static_cast<Eigen::Index>(g)) = r.theta_hat.transpose();
      cfg.initial_alpha = r.alpha;
      cfg.initial_w = r.w;
    }
    return path;
  }
  SamplerConfig cfg = spec.sampler;
  NeuronizedPrior prior = spec.prior;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (spec.kind == ScheduleKind::alpha0_path) {
      prior.alpha0 = grid[g];
    } else {
      prior.tau_w_sq = grid[g];
    }
    const PosteriorSamples s = run_chain(data, prior, cfg);
    path.row(static_cast<Eigen::Index>(g)) = s.theta_mean.transpose();
    cfg.initial_state = s.final_state;
  }
  return path;
}

}  // namespace neuroprior
