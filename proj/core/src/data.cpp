#include "neuroprior/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace neuroprior {

RegressionData::RegressionData(Eigen::MatrixXd x, Eigen::VectorXd y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() < 1 || x_.cols() < 1) throw std::invalid_argument("data: X must be at least 1x1");
  if (y_.size() != x_.rows()) {
    throw std::invalid_argument("data: y has " + std::to_string(y_.size()) + " entries but X has " +
                                std::to_string(x_.rows()) + " rows");
  }
  if (!x_.allFinite()) throw std::invalid_argument("data: X has non-finite entries");
  if (!y_.allFinite()) throw std::invalid_argument("data: y has non-finite entries");
  col_sq_norms_ = x_.colwise().squaredNorm().transpose();
  x_means_ = Eigen::VectorXd::Zero(x_.cols());
  x_scales_ = Eigen::VectorXd::Ones(x_.cols());
}

RegressionData RegressionData::standardize() const {
  const auto n = static_cast<double>(x_.rows());
  Eigen::VectorXd means = x_.colwise().mean().transpose();
  Eigen::MatrixXd centered = x_.rowwise() - means.transpose();
  Eigen::VectorXd scales = (centered.colwise().squaredNorm().transpose() / n).cwiseSqrt();
  for (Eigen::Index j = 0; j < scales.size(); ++j) {
    if (!(scales(j) > 0.0)) {
      throw std::invalid_argument("standardize: column " + std::to_string(j + 1) + " is constant");
    }
  }
  centered.array().rowwise() /= scales.transpose().array();
  const double ymean = y_.mean();
  RegressionData out(std::move(centered), y_.array() - ymean);
  // Compose with any earlier transform so back_map always targets the raw scale.
  out.x_means_ = x_means_ + x_scales_.cwiseProduct(means);
  out.x_scales_ = x_scales_.cwiseProduct(scales);
  out.y_mean_ = y_mean_ + ymean;
  out.standardized_ = true;
  return out;
}

Eigen::VectorXd RegressionData::back_map(const Eigen::VectorXd& theta, double* intercept) const {
  if (theta.size() != p()) throw std::invalid_argument("back_map: coefficient length mismatch");
  Eigen::VectorXd raw = theta.cwiseQuotient(x_scales_);
  if (intercept != nullptr) *intercept = y_mean_ - x_means_.dot(raw);
  return raw;
}

void Scenario::validate() const {
  if (n < 1 || p < 1) throw std::invalid_argument("scenario: n and p must be positive");
  if (design == DesignKind::ar1 && !(rho > -1.0 && rho < 1.0)) {
    throw std::invalid_argument("scenario: rho must lie in (-1, 1)");
  }
  if (!(magnitude >= 0.0)) throw std::invalid_argument("scenario: signal magnitude must be nonnegative");
  if (signal == SignalKind::high_dim && p < 5) throw std::invalid_argument("scenario: high_dim needs p >= 5");
  if (!(sigma_sq >= 0.0)) throw std::invalid_argument("scenario: sigma_sq must be nonnegative");
}

Eigen::MatrixXd gen_design(const Scenario& scenario, Rng& rng) {
  scenario.validate();
  Eigen::MatrixXd x(scenario.n, scenario.p);
  const double rho = scenario.design == DesignKind::ar1 ? scenario.rho : 0.0;
  const double innovation_sd = std::sqrt(1.0 - rho * rho);
  for (Eigen::Index i = 0; i < scenario.n; ++i) {
    double prev = rng.normal();
    x(i, 0) = prev;
    for (Eigen::Index j = 1; j < scenario.p; ++j) {
      prev = rho * prev + innovation_sd * rng.normal();
      x(i, j) = prev;
    }
  }
  return x;
}

Eigen::VectorXd gen_coefficients(const Scenario& scenario, Rng& rng) {
  scenario.validate();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(scenario.p);
  auto sign = [&rng] { return rng.uniform() < 0.5 ? -1.0 : 1.0; };
  if (scenario.signal == SignalKind::high_dim) {
    constexpr double pattern[] = {0.4, 0.45, 0.5, 0.55, 0.6};
    for (int j = 0; j < 5; ++j) theta(j) = sign() * scenario.magnitude * pattern[j];
    return theta;
  }
  const auto p = static_cast<std::size_t>(scenario.p);
  const auto k = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(p) - 1e-12));
  // Partial Fisher-Yates for a uniform k-subset.
  std::vector<std::size_t> idx(p);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto r = i + static_cast<std::size_t>(rng.uniform_index(p - i));
    std::swap(idx[i], idx[r]);
  }
  for (std::size_t i = 0; i < k; ++i) theta(static_cast<Eigen::Index>(idx[i])) = sign() * scenario.magnitude;
  return theta;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta0, double sigma_sq,
                             Rng& rng) {
  if (x.cols() != theta0.size()) throw std::invalid_argument("gen_response: dimension mismatch");
  if (!(sigma_sq >= 0.0)) throw std::invalid_argument("gen_response: sigma_sq must be nonnegative");
  Eigen::VectorXd y = x * theta0;
  const double sd = std::sqrt(sigma_sq);
  if (sd > 0.0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sd * rng.normal();
  }
  return y;
}

SimulatedDataset simulate(const Scenario& scenario) {
  Rng base(scenario.seed);
  Rng design_rng = base.split(1);
  Rng coef_rng = base.split(2);
  Rng noise_rng = base.split(3);
  SimulatedDataset out;
  out.x = gen_design(scenario, design_rng);
  out.theta0 = gen_coefficients(scenario, coef_rng);
  out.y = gen_response(out.x, out.theta0, scenario.sigma_sq, noise_rng);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col, const std::string& file) {
  cell = trim(cell);
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw std::runtime_error(file + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                             ": not a finite number: '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  const std::string file = path.string();
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto pos = rest.find(options.delimiter);
      values.push_back(parse_cell(rest.substr(0, pos), line_no, count + 1, file));
      ++count;
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw std::runtime_error(file + ": row " + std::to_string(line_no) + " has " + std::to_string(count) +
                               " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw std::runtime_error(file + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
    }
  }
  return m;
}

RegressionData load_csv(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                        const CsvOptions& options) {
  Eigen::MatrixXd x = read_csv_matrix(x_path, options);
  Eigen::MatrixXd y = read_csv_matrix(y_path, options);
  if (y.cols() != 1) throw std::runtime_error(y_path.string() + ": response file must have one column");
  if (y.rows() != x.rows()) {
    throw std::runtime_error("row count mismatch: " + x_path.string() + " has " + std::to_string(x.rows()) +
                             ", " + y_path.string() + " has " + std::to_string(y.rows()));
  }
  return RegressionData(std::move(x), y.col(0));
}

RegressionData load_csv(const std::filesystem::path& path, Eigen::Index response_column,
                        const CsvOptions& options) {
  const Eigen::MatrixXd m = read_csv_matrix(path, options);
  if (response_column < 0 || response_column >= m.cols()) {
    throw std::runtime_error(path.string() + ": response column " + std::to_string(response_column + 1) +
                             " out of range");
  }
  if (m.cols() < 2) throw std::runtime_error(path.string() + ": need at least one predictor column");
  Eigen::MatrixXd x(m.rows(), m.cols() - 1);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j != response_column) x.col(k++) = m.col(j);
  }
  return RegressionData(std::move(x), m.col(response_column));
}

void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.precision(17);
  if (!header.empty()) out << header << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

}  // namespace neuroprior
