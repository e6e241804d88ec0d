#pragma once

#include <cstddef>
#include <optional>

#include "hettrans/lambda_curve.hpp"
#include "hettrans/smoothers.hpp"

namespace hettrans {

/// Default constant in front of the (log(n)^2 / (n h_y))^(1/4) rate of t_n.
inline constexpr double kDefaultTnConstant = 0.25;

struct ComponentEstimates {
  double y0_hat = 0.0;
  double b_tilde = 0.0;
  double alpha2_hat = 0.0;
  double t_n = 0.0;
  std::optional<double> var_y0;
  std::optional<double> var_b_tilde;

  /// B lies in (0, inf); a nonpositive B̃ is kept but should be reported.
  bool b_tilde_suspicious() const noexcept { return !(b_tilde > 0.0); }
};

/// Root of λ̂ with the smallest |y|. Every sign change on the grid is polished
/// by bisection to |λ̂| < 1e-10. Throws NoRoot if λ̂ keeps its sign.
double estimate_y0(const LambdaCurve& curve);

/// c_t * (log(n)^2 / (n h_y))^(1/4)
double compute_t_n(std::size_t n, double h_y, double c_t = kDefaultTnConstant);

/// B̃ = -λ̂'(ŷ0)
double estimate_b_tilde(const LambdaCurve& curve, double y0_hat);

/// α̂2 = -exp(b (∫_{y2}^{ŷ0-t} 1/λ̂ - ∫_{y1}^{ŷ0+t} 1/λ̂)).
/// Requires y2 < ŷ0 - t < ŷ0 + t < y1 (BadAnchors otherwise).
double estimate_alpha2(const LambdaCurve& curve, double y0_hat, double b, double y1, double y2,
                       double t_n);

/// Kernel plug-in ingredients at one (y, x).
struct DensityTerms {
  double p = 0.0;
  double p_y = 0.0;
  double p_x = 0.0;
  double f = 0.0;
  double f_x = 0.0;

  double phi_y() const noexcept { return p_y / f; }
  double phi_x() const noexcept { return p_x / f - p * f_x / (f * f); }
};

DensityTerms density_terms(const SmootherState& state, double y, std::span<const double> x);

// Coefficients of the linear expansion of λ̂ - λ.
double d_p0(const DensityTerms& t) noexcept;
double d_py(const DensityTerms& t) noexcept;
double d_px(const DensityTerms& t) noexcept;
double d_f0(const DensityTerms& t) noexcept;
double d_fx(const DensityTerms& t) noexcept;

/// ∫ v(w)^2 D̂_{p,y}(y0, w)^2 f̂_{Y,X}(y0, w) dw by the trapezoid rule over the
/// weight support. Nodes where f̂ or Φ̂_y fall below their floors are skipped.
double dpy_weighted_integral(const SmootherState& state, double y0, const WeightFunction& weight);

/// Plug-in asymptotic variance of ŷ0: (∫K^2 / b^2) * dpy_weighted_integral.
double var_y0_plugin(const SmootherState& state, double y0_hat, double b,
                     const WeightFunction& weight);

/// Plug-in asymptotic variance of B̃: (∫K'^2) * dpy_weighted_integral.
double var_b_tilde_plugin(const SmootherState& state, double y0_hat, const WeightFunction& weight);

}  // namespace hettrans
