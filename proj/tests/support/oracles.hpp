#pragma once

// Reference computations used only by the tests. Each one is written
// independently of the library code path it checks.

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace oracle {

/// Adaptive Gauss-Kronrod integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tolerance = 1e-12);

/// Physicists' Gauss-Hermite nodes and weights (weight exp(-x^2)) via Golub-Welsch.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Rule gauss_hermite(int n);

/// Plain coordinate descent for 1/2 ||y - X b||^2 + lambda ||b||_1.
Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda, double tolerance = 1e-14,
                         int max_sweeps = 100000);

double soft_threshold(double z, double gamma);

/// Posterior model probabilities for every gamma in {0,1}^p (bit j of the
/// index = gamma_j) under the conjugate spike-and-slab with slab N(0, sigma^2 c),
/// pi(sigma^2) ~ 1/sigma^2 and inclusion probability eta. Uses dense determinants.
std::vector<double> spsl_model_posterior(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double c, double eta);

/// Empirical KS distance against a continuous CDF.
double ks_against_cdf(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Laplace(scale) CDF.
double laplace_cdf(double x, double scale);

}  // namespace oracle
