#pragma once

#include "neuroprior/rng.hpp"

#include <Eigen/Dense>

#include <string_view>

namespace neuroprior {

/// How the joint weight vector w | alpha, sigma^2 is drawn.
enum class WUpdate { automatic, full, block_relu, fast_np };

std::string_view to_string(WUpdate strategy) noexcept;
WUpdate w_update_from_string(std::string_view name);

/// Conditional law of w given the activation values t_j = T(alpha_j - alpha0):
/// w ~ N(mean, covariance) with
///   covariance = sigma^2 (D X'X D + I / tau^2)^{-1},  mean = (D X'X D + I / tau^2)^{-1} D X'y,
/// D = diag(t). Dense reference computation.
struct GaussianMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};
GaussianMoments w_conditional_moments(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& t, double tau_sq, double sigma_sq);

/// Inputs shared by the w-draw strategies. `gram` (X'X) and `xty` (X'y) are
/// only read by full and block_relu; fast_np reads x and y.
struct WDrawInputs {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& y;
  const Eigen::MatrixXd* gram = nullptr;
  const Eigen::VectorXd* xty = nullptr;
  const Eigen::VectorXd& t;
  double tau_sq = 1.0;
  double sigma_sq = 1.0;
};

/// The draws below are affine maps of caller-supplied standard normals, so a
/// test can recover the implied mean (all-zero normals) and covariance
/// (unit-vector normals) exactly. `z` has length p; fast_np additionally
/// takes `delta` of length n.

/// Cholesky of the p x p precision.
Eigen::VectorXd w_draw_full(const WDrawInputs& in, const Eigen::VectorXd& z);
/// Coordinates with t_j == 0 decouple to N(0, sigma^2 tau^2); only the active
/// block is factorized.
Eigen::VectorXd w_draw_block_relu(const WDrawInputs& in, const Eigen::VectorXd& z);
/// Data-augmentation sampler with one n x n solve; O(n^2 p).
Eigen::VectorXd w_draw_fast_np(const WDrawInputs& in, const Eigen::VectorXd& z, const Eigen::VectorXd& delta);

/// Picks the strategy (automatic resolves by activation and shape) and draws
/// the normals from rng.
Eigen::VectorXd w_draw(WUpdate strategy, const WDrawInputs& in, Rng& rng);

/// Resolution rule for WUpdate::automatic.
WUpdate resolve_w_update(WUpdate requested, bool relu_activation, Eigen::Index n, Eigen::Index p);

}  // namespace neuroprior
