#include "neuroprior/activation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace neuroprior {

std::string_view to_string(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::relu:
      return "relu";
    case ActivationKind::identity:
      return "identity";
    case ActivationKind::signed_exp_quad:
      return "signed_exp_quad";
    case ActivationKind::spline:
      return "spline";
  }
  return "unknown";
}

ActivationKind activation_kind_from_string(std::string_view name) {
  if (name == "relu") return ActivationKind::relu;
  if (name == "identity") return ActivationKind::identity;
  if (name == "signed_exp_quad") return ActivationKind::signed_exp_quad;
  if (name == "spline") return ActivationKind::spline;
  throw std::invalid_argument("unknown activation kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// CubicBSpline

CubicBSpline::CubicBSpline(std::vector<double> breakpoints, std::vector<double> coefficients)
    : breakpoints_(std::move(breakpoints)), coefficients_(std::move(coefficients)) {
  if (breakpoints_.size() < 2) {
    throw std::invalid_argument("spline: need at least two breakpoints (K >= 4)");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw std::invalid_argument("spline: breakpoints must be strictly increasing");
    }
  }
  if (coefficients_.size() != basis_count(breakpoints_.size())) {
    throw std::invalid_argument("spline: expected " +
                                std::to_string(basis_count(breakpoints_.size())) +
                                " coefficients, got " + std::to_string(coefficients_.size()));
  }
  for (double c : coefficients_) {
    if (!std::isfinite(c)) throw std::invalid_argument("spline: non-finite coefficient");
  }
  const std::size_t m = breakpoints_.size() - 1;
  const std::size_t k = coefficients_.size();
  // Derivative of a clamped cubic at its end knots.
  lower_slope_ = 3.0 * (coefficients_[1] - coefficients_[0]) / (breakpoints_[1] - breakpoints_[0]);
  upper_slope_ = 3.0 * (coefficients_[k - 1] - coefficients_[k - 2]) /
                 (breakpoints_[m] - breakpoints_[m - 1]);
}

double CubicBSpline::knot(std::ptrdiff_t i) const noexcept {
  // Extended knot vector: breakpoint 0 repeated four times, the interior
  // breakpoints once, and the last breakpoint four times.
  const auto m = static_cast<std::ptrdiff_t>(breakpoints_.size()) - 1;
  const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(i - kDegree, 0, m);
  return breakpoints_[static_cast<std::size_t>(j)];
}

CubicBSpline::LocalBasis CubicBSpline::local_basis(double t) const {
  const std::size_t m = breakpoints_.size() - 1;
  // Interval index s with breakpoints[s] <= t < breakpoints[s + 1]; the right
  // end belongs to the last interval.
  std::size_t s;
  if (t >= breakpoints_[m]) {
    s = m - 1;
  } else if (t <= breakpoints_[0]) {
    s = 0;
  } else {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    s = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  }
  const auto span = static_cast<std::ptrdiff_t>(s) + kDegree;  // knot index

  // Cox-de Boor triangle for the four nonzero basis functions.
  std::array<double, 4> n{1.0, 0.0, 0.0, 0.0};
  std::array<double, 4> left{};
  std::array<double, 4> right{};
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = t - knot(span + 1 - j);
    right[j] = knot(span + j) - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  return LocalBasis{s, n};
}

double CubicBSpline::operator()(double t) const {
  if (t < lower()) return coefficients_.front() + lower_slope_ * (t - lower());
  if (t > upper()) return coefficients_.back() + upper_slope_ * (t - upper());
  return evaluate(local_basis(t));
}

std::vector<double> CubicBSpline::greville_abscissae(std::span<const double> breakpoints) {
  const std::size_t m = breakpoints.size() - 1;
  const std::size_t k = basis_count(breakpoints.size());
  auto knot_at = [&](std::ptrdiff_t i) {
    const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(i - kDegree, 0, static_cast<std::ptrdiff_t>(m));
    return breakpoints[static_cast<std::size_t>(j)];
  };
  std::vector<double> g(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    g[i] = (knot_at(ii + 1) + knot_at(ii + 2) + knot_at(ii + 3)) / 3.0;
  }
  return g;
}

// ---------------------------------------------------------------------------
// ActivationSpec

ActivationSpec::ActivationSpec(ActivationKind kind,
                               std::variant<std::monostate, SignedExpQuadParams, CubicBSpline> params)
    : kind_(kind), params_(std::move(params)) {}

ActivationSpec ActivationSpec::relu() { return ActivationSpec(ActivationKind::relu, std::monostate{}); }

ActivationSpec ActivationSpec::identity() {
  return ActivationSpec(ActivationKind::identity, std::monostate{});
}

ActivationSpec ActivationSpec::signed_exp_quad(double quadratic, double linear, double intercept) {
  if (!(quadratic > 0.0 && quadratic <= 0.5)) {
    throw std::invalid_argument("signed_exp_quad: quadratic coefficient must lie in (0, 1/2]");
  }
  if (!(linear > 0.0) || !std::isfinite(linear)) {
    throw std::invalid_argument("signed_exp_quad: linear coefficient must be positive");
  }
  if (!std::isfinite(intercept)) {
    throw std::invalid_argument("signed_exp_quad: intercept must be finite");
  }
  ActivationSpec spec(ActivationKind::signed_exp_quad, SignedExpQuadParams{quadratic, linear, intercept});
  spec.require_monotone();
  return spec;
}

ActivationSpec ActivationSpec::spline(std::vector<double> breakpoints, std::vector<double> coefficients) {
  ActivationSpec spec(ActivationKind::spline,
                      CubicBSpline(std::move(breakpoints), std::move(coefficients)));
  spec.require_monotone();
  return spec;
}

void ActivationSpec::require_monotone() const {
  if (!is_nondecreasing_on_grid([this](double t) { return (*this)(t); })) {
    throw std::invalid_argument("activation is not nondecreasing on [-10, 10]");
  }
}

ActivationValue ActivationSpec::eval_checked(double t) const noexcept {
  switch (kind_) {
    case ActivationKind::relu:
      return {t > 0.0 ? t : 0.0, false};
    case ActivationKind::identity:
      return {t, false};
    case ActivationKind::signed_exp_quad: {
      const auto& p = std::get<SignedExpQuadParams>(params_);
      const double sgn = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
      const double log_value = p.quadratic * sgn * t * t + p.linear * t + p.intercept;
      if (log_value > kLogSaturationCap) return {std::exp(kLogSaturationCap), true};
      return {std::exp(log_value), false};
    }
    case ActivationKind::spline:
      return {std::get<CubicBSpline>(params_)(t), false};
  }
  return {0.0, false};
}

bool ActivationSpec::strictly_positive() const noexcept {
  return kind_ == ActivationKind::signed_exp_quad;
}

const SignedExpQuadParams& ActivationSpec::signed_exp_quad_params() const {
  if (kind_ != ActivationKind::signed_exp_quad) {
    throw std::invalid_argument("activation is not of signed_exp_quad kind");
  }
  return std::get<SignedExpQuadParams>(params_);
}

const CubicBSpline& ActivationSpec::spline_curve() const {
  if (kind_ != ActivationKind::spline) throw std::invalid_argument("activation is not of spline kind");
  return std::get<CubicBSpline>(params_);
}

ActivationSpec make_horseshoe_like() { return ActivationSpec::signed_exp_quad(0.37, 0.89, 0.08); }

double spline_eval(const ActivationSpec& activation, double t) { return activation.spline_curve()(t); }

std::vector<double> fit_spline_coefficients(std::span<const double> breakpoints,
                                            std::span<const double> xs,
                                            std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("fit_spline_coefficients: xs and ys must be non-empty and equal length");
  }
  const std::size_t k = CubicBSpline::basis_count(breakpoints.size());
  // Basis evaluation only needs a spline object; coefficients are placeholders.
  const CubicBSpline shape(std::vector<double>(breakpoints.begin(), breakpoints.end()),
                           std::vector<double>(k, 0.0));
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()),
                                                 static_cast<Eigen::Index>(k));
  Eigen::VectorXd target(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::clamp(xs[i], shape.lower(), shape.upper());
    const auto basis = shape.local_basis(x);
    for (std::size_t r = 0; r < 4; ++r) {
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(basis.first + r)) = basis.values[r];
    }
    target(static_cast<Eigen::Index>(i)) = ys[i];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
  return {coef.data(), coef.data() + coef.size()};
}

std::vector<double> uniform_breakpoints(double lower, double upper, std::size_t basis_count) {
  if (basis_count < 4) throw std::invalid_argument("uniform_breakpoints: basis_count must be >= 4");
  if (!(upper > lower)) throw std::invalid_argument("uniform_breakpoints: upper must exceed lower");
  const std::size_t count = basis_count - 2;
  std::vector<double> b(count);
  for (std::size_t i = 0; i < count; ++i) {
    b[i] = lower + (upper - lower) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  b.back() = upper;
  return b;
}

}  // namespace neuroprior
