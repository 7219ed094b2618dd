#include "neuroprior/gaussian_draw.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace neuroprior {

std::string_view to_string(WUpdate strategy) noexcept {
  switch (strategy) {
    case WUpdate::automatic:
      return "auto";
    case WUpdate::full:
      return "full";
    case WUpdate::block_relu:
      return "block_relu";
    case WUpdate::fast_np:
      return "fast_np";
  }
  return "unknown";
}

WUpdate w_update_from_string(std::string_view name) {
  if (name == "auto") return WUpdate::automatic;
  if (name == "full") return WUpdate::full;
  if (name == "block_relu") return WUpdate::block_relu;
  if (name == "fast_np") return WUpdate::fast_np;
  throw std::invalid_argument("unknown w update '" + std::string(name) + "'");
}

WUpdate resolve_w_update(WUpdate requested, bool relu_activation, Eigen::Index n, Eigen::Index p) {
  if (requested != WUpdate::automatic) return requested;
  if (relu_activation) return WUpdate::block_relu;
  if (p > 2 * n) return WUpdate::fast_np;
  return WUpdate::full;
}

namespace {

// Cholesky with a single 1e-10 diagonal jitter retry.
Eigen::LLT<Eigen::MatrixXd> factorize(Eigen::MatrixXd a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt;
  a.diagonal().array() += 1e-10;
  llt.compute(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("w update: precision matrix is not positive definite");
  }
  return llt;
}

Eigen::MatrixXd gram_of(const WDrawInputs& in) {
  return in.gram != nullptr ? *in.gram : Eigen::MatrixXd(in.x.transpose() * in.x);
}

Eigen::VectorXd xty_of(const WDrawInputs& in) {
  return in.xty != nullptr ? *in.xty : Eigen::VectorXd(in.x.transpose() * in.y);
}

}  // namespace

GaussianMoments w_conditional_moments(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& t, double tau_sq, double sigma_sq) {
  const Eigen::MatrixXd xd = x * t.asDiagonal();
  Eigen::MatrixXd precision = xd.transpose() * xd;
  precision.diagonal().array() += 1.0 / tau_sq;
  const Eigen::MatrixXd inv = precision.ldlt().solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
  return {inv * (xd.transpose() * y), sigma_sq * inv};
}

Eigen::VectorXd w_draw_full(const WDrawInputs& in, const Eigen::VectorXd& z) {
  const Eigen::MatrixXd g = gram_of(in);
  Eigen::MatrixXd a = in.t.asDiagonal() * g * in.t.asDiagonal();
  a.diagonal().array() += 1.0 / in.tau_sq;
  const auto llt = factorize(std::move(a));
  const Eigen::VectorXd rhs = in.t.cwiseProduct(xty_of(in));
  Eigen::VectorXd w = llt.solve(rhs);
  // L L' = A, so L'^{-1} z has covariance A^{-1}.
  w += std::sqrt(in.sigma_sq) * llt.matrixU().solve(z);
  return w;
}

Eigen::VectorXd w_draw_block_relu(const WDrawInputs& in, const Eigen::VectorXd& z) {
  const Eigen::Index p = in.t.size();
  const double sigma = std::sqrt(in.sigma_sq);
  const double prior_sd = sigma * std::sqrt(in.tau_sq);
  std::vector<Eigen::Index> active;
  Eigen::VectorXd w(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (in.t(j) != 0.0) {
      active.push_back(j);
    } else {
      w(j) = prior_sd * z(j);
    }
  }
  if (active.empty()) return w;
  const auto k = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd a(k, k);
  Eigen::VectorXd rhs(k);
  Eigen::VectorXd zs(k);
  const Eigen::VectorXd xty = xty_of(in);
  if (in.gram != nullptr) {
    const Eigen::MatrixXd& g = *in.gram;
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c <= r; ++c) {
        a(r, c) = in.t(active[r]) * g(active[r], active[c]) * in.t(active[c]);
        a(c, r) = a(r, c);
      }
    }
  } else {
    Eigen::MatrixXd xa(in.x.rows(), k);
    for (Eigen::Index r = 0; r < k; ++r) xa.col(r) = in.x.col(active[r]) * in.t(active[r]);
    a = xa.transpose() * xa;
  }
  for (Eigen::Index r = 0; r < k; ++r) {
    a(r, r) += 1.0 / in.tau_sq;
    rhs(r) = in.t(active[r]) * xty(active[r]);
    zs(r) = z(active[r]);
  }
  const auto llt = factorize(std::move(a));
  const Eigen::VectorXd wa = llt.solve(rhs) + sigma * llt.matrixU().solve(zs);
  for (Eigen::Index r = 0; r < k; ++r) w(active[r]) = wa(r);
  return w;
}

Eigen::VectorXd w_draw_fast_np(const WDrawInputs& in, const Eigen::VectorXd& z, const Eigen::VectorXd& delta) {
  // Target N(S Phi' a, S) with Phi = X D / sigma, a = y / sigma, prior
  // covariance sigma^2 tau^2 I and S = (Phi'Phi + I / (sigma^2 tau^2))^{-1}.
  const double sigma = std::sqrt(in.sigma_sq);
  const double prior_sd = sigma * std::sqrt(in.tau_sq);
  const Eigen::VectorXd u = prior_sd * z;
  const Eigen::MatrixXd xd = in.x * in.t.asDiagonal();
  const Eigen::VectorXd v = xd * u / sigma + delta;
  // Phi Delta Phi' + I = tau^2 X D^2 X' + I.
  Eigen::MatrixXd m = in.tau_sq * (xd * xd.transpose());
  m.diagonal().array() += 1.0;
  const auto llt = factorize(std::move(m));
  const Eigen::VectorXd s = llt.solve(in.y / sigma - v);
  // Delta Phi' s = sigma tau^2 D X' s.
  return u + sigma * in.tau_sq * (xd.transpose() * s);
}

Eigen::VectorXd w_draw(WUpdate strategy, const WDrawInputs& in, Rng& rng) {
  const Eigen::Index p = in.t.size();
  Eigen::VectorXd z(p);
  for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
  switch (strategy) {
    case WUpdate::full:
      return w_draw_full(in, z);
    case WUpdate::block_relu:
      return w_draw_block_relu(in, z);
    case WUpdate::fast_np: {
      Eigen::VectorXd delta(in.x.rows());
      for (Eigen::Index i = 0; i < delta.size(); ++i) delta(i) = rng.normal();
      return w_draw_fast_np(in, z, delta);
    }
    case WUpdate::automatic:
      break;
  }
  throw std::invalid_argument("w_draw: strategy must be resolved before drawing");
}

}  // namespace neuroprior
