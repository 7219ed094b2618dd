#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace neuroprior {

enum class ActivationKind { relu, identity, signed_exp_quad, spline };

std::string_view to_string(ActivationKind kind) noexcept;
ActivationKind activation_kind_from_string(std::string_view name);

/// T(t) = exp(quadratic * sgn(t) * t^2 + linear * t + intercept).
struct SignedExpQuadParams {
  double quadratic = 0.37;
  double linear = 0.89;
  double intercept = 0.08;
};

/// Clamped cubic B-spline over strictly increasing breakpoints, extended
/// linearly (value and slope matched) outside the breakpoint range.
///
/// With m + 1 breakpoints there are K = m + 3 basis functions, so the
/// coefficient vector has length breakpoints.size() + 2 and K >= 4 needs at
/// least two breakpoints.
class CubicBSpline {
 public:
  static constexpr int kDegree = 3;

  CubicBSpline(std::vector<double> breakpoints, std::vector<double> coefficients);

  /// Basis functions that are nonzero at t: the first index and the four values.
  /// Only meaningful for t inside [front, back] of the breakpoints.
  struct LocalBasis {
    std::size_t first = 0;
    std::array<double, 4> values{};
  };
  [[nodiscard]] LocalBasis local_basis(double t) const;

  [[nodiscard]] double operator()(double t) const;

  /// Evaluate with a precomputed local basis (t inside the range).
  [[nodiscard]] double evaluate(const LocalBasis& basis) const noexcept {
    const double* c = coefficients_.data() + basis.first;
    return basis.values[0] * c[0] + basis.values[1] * c[1] + basis.values[2] * c[2] +
           basis.values[3] * c[3];
  }

  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  [[nodiscard]] double lower() const noexcept { return breakpoints_.front(); }
  [[nodiscard]] double upper() const noexcept { return breakpoints_.back(); }
  [[nodiscard]] double lower_slope() const noexcept { return lower_slope_; }
  [[nodiscard]] double upper_slope() const noexcept { return upper_slope_; }

  /// Coefficients that reproduce f(t) = t exactly (Greville abscissae).
  [[nodiscard]] static std::vector<double> greville_abscissae(std::span<const double> breakpoints);
  static std::size_t basis_count(std::size_t breakpoint_count) noexcept {
    return breakpoint_count + 2;
  }

 private:
  [[nodiscard]] double knot(std::ptrdiff_t i) const noexcept;

  std::vector<double> breakpoints_;
  std::vector<double> coefficients_;
  double lower_slope_ = 0.0;
  double upper_slope_ = 0.0;
};

struct ActivationValue {
  double value = 0.0;
  bool saturated = false;
};

/// A nondecreasing activation T. Immutable once constructed; every named
/// constructor validates its parameters and checks monotonicity on the grid
/// [-10, 10] with step 0.01, throwing std::invalid_argument on failure.
class ActivationSpec {
 public:
  /// log T is capped here for the signed-exp-quad kind.
  static constexpr double kLogSaturationCap = 700.0;
  static constexpr double kGridLower = -10.0;
  static constexpr double kGridUpper = 10.0;
  static constexpr double kGridStep = 0.01;

  static ActivationSpec relu();
  static ActivationSpec identity();
  /// Requires 0 < quadratic <= 1/2 and linear > 0.
  static ActivationSpec signed_exp_quad(double quadratic, double linear, double intercept);
  static ActivationSpec spline(std::vector<double> breakpoints, std::vector<double> coefficients);

  [[nodiscard]] ActivationKind kind() const noexcept { return kind_; }

  [[nodiscard]] double operator()(double t) const noexcept {
    switch (kind_) {
      case ActivationKind::relu:
        return t > 0.0 ? t : 0.0;
      case ActivationKind::identity:
        return t;
      default:
        return eval_checked(t).value;
    }
  }

  /// Same as operator() but reports whether the signed-exp-quad cap was hit.
  [[nodiscard]] ActivationValue eval_checked(double t) const noexcept;

  /// True when T(t) == 0 on a set of positive prior probability under
  /// t = alpha - alpha0, alpha ~ N(0, 1).
  [[nodiscard]] bool has_zero_region() const noexcept { return kind_ == ActivationKind::relu; }
  /// T(t) > 0 for every t.
  [[nodiscard]] bool strictly_positive() const noexcept;

  [[nodiscard]] const SignedExpQuadParams& signed_exp_quad_params() const;
  [[nodiscard]] const CubicBSpline& spline_curve() const;

 private:
  ActivationSpec(ActivationKind kind, std::variant<std::monostate, SignedExpQuadParams, CubicBSpline> params);
  void require_monotone() const;

  ActivationKind kind_;
  std::variant<std::monostate, SignedExpQuadParams, CubicBSpline> params_;
};

/// The constants fitted to mimic the horseshoe prior: exp{0.37 sgn(t) t^2 + 0.89 t + 0.08}.
ActivationSpec make_horseshoe_like();

/// Evaluate a spline-kind activation. Throws std::invalid_argument for other kinds.
double spline_eval(const ActivationSpec& activation, double t);

/// Grid check f(t_{i+1}) >= f(t_i) over [lower, upper] (tolerance is absolute).
template <class F>
bool is_nondecreasing_on_grid(const F& f, double lower = ActivationSpec::kGridLower,
                              double upper = ActivationSpec::kGridUpper,
                              double step = ActivationSpec::kGridStep, double tolerance = 1e-12) {
  const auto steps = static_cast<long>((upper - lower) / step + 0.5);
  double previous = f(lower);
  for (long i = 1; i <= steps; ++i) {
    const double current = f(lower + static_cast<double>(i) * step);
    if (current < previous - tolerance) return false;
    previous = current;
  }
  return true;
}

/// Least-squares fit of spline coefficients to (xs, ys) on the given
/// breakpoints. The result is not forced to be monotone; ActivationSpec::spline
/// will reject a non-monotone fit.
std::vector<double> fit_spline_coefficients(std::span<const double> breakpoints,
                                            std::span<const double> xs,
                                            std::span<const double> ys);

/// Equally spaced breakpoints giving `basis_count` cubic basis functions.
std::vector<double> uniform_breakpoints(double lower, double upper, std::size_t basis_count);

}  // namespace neuroprior
