#pragma once

#include "neuroprior/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>

namespace neuroprior {

/// Design matrix and response, plus the affine transform applied by
/// standardize() so coefficients can be mapped back to the original scale.
class RegressionData {
 public:
  RegressionData() = default;
  /// Throws std::invalid_argument on dimension mismatch, empty input, or
  /// non-finite entries.
  RegressionData(Eigen::MatrixXd x, Eigen::VectorXd y);

  [[nodiscard]] const Eigen::MatrixXd& x() const noexcept { return x_; }
  [[nodiscard]] const Eigen::VectorXd& y() const noexcept { return y_; }
  [[nodiscard]] Eigen::Index n() const noexcept { return x_.rows(); }
  [[nodiscard]] Eigen::Index p() const noexcept { return x_.cols(); }
  /// ||X_j||^2 for every column.
  [[nodiscard]] const Eigen::VectorXd& column_sq_norms() const noexcept { return col_sq_norms_; }

  [[nodiscard]] const Eigen::VectorXd& x_means() const noexcept { return x_means_; }
  [[nodiscard]] const Eigen::VectorXd& x_scales() const noexcept { return x_scales_; }
  [[nodiscard]] double y_mean() const noexcept { return y_mean_; }
  [[nodiscard]] bool standardized() const noexcept { return standardized_; }

  /// Centered y, centered X with unit-variance columns (divisor n). Constant
  /// columns throw std::invalid_argument naming the column.
  [[nodiscard]] RegressionData standardize() const;

  /// Coefficients on the standardized scale -> original scale; the intercept
  /// is returned through `intercept` when non-null.
  [[nodiscard]] Eigen::VectorXd back_map(const Eigen::VectorXd& theta,
                                         double* intercept = nullptr) const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd col_sq_norms_;
  Eigen::VectorXd x_means_;
  Eigen::VectorXd x_scales_;
  double y_mean_ = 0.0;
  bool standardized_ = false;
};

enum class DesignKind { independent, ar1 };
enum class SignalKind { low_dim, high_dim };

struct Scenario {
  Eigen::Index n = 200;
  Eigen::Index p = 50;
  DesignKind design = DesignKind::independent;
  double rho = 0.0;
  SignalKind signal = SignalKind::low_dim;
  double magnitude = 0.3;
  double sigma_sq = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Rows i.i.d. N(0, Sigma) with Sigma_lk = rho^{|l-k|} (identity for independent).
Eigen::MatrixXd gen_design(const Scenario& scenario, Rng& rng);
Eigen::VectorXd gen_coefficients(const Scenario& scenario, Rng& rng);
Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta0, double sigma_sq,
                             Rng& rng);

struct SimulatedDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd theta0;
};

/// X, theta0 and y drawn in that order from streams of scenario.seed.
SimulatedDataset simulate(const Scenario& scenario);

struct CsvOptions {
  bool header = false;
  char delimiter = ',';
};

/// Numeric matrix from a delimited text file. Errors name the offending row
/// (1-based, counting the header) and column.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path, const CsvOptions& options = {});

/// Loads X from one file and y (single column) from another.
RegressionData load_csv(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                        const CsvOptions& options = {});
/// Loads a single file whose column `response_column` (0-based) is y.
RegressionData load_csv(const std::filesystem::path& path, Eigen::Index response_column,
                        const CsvOptions& options = {});

void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::string& header = {});

}  // namespace neuroprior
