#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hettrans/anchors.hpp"
#include "hettrans/lambda_curve.hpp"

namespace hettrans {

/// Which estimate of B enters the transformation: B̃ from the components, or
/// an externally supplied B̂ (in which case α̂2 is recomputed with it).
struct BChoice {
  bool use_hat = false;
  double b_hat = 0.0;

  static BChoice tilde() { return {}; }
  static BChoice hat(double b) { return {true, b}; }
};

/// Linearised transformation estimate pinned at h(ŷ0) = 0 and h(y1) = 1:
///
///   exp(-b ∫_{y1}^y 1/λ̂)          for y >= ŷ0 + t_n
///   linear ramp to 0 at ŷ0        on (ŷ0 - t_n, ŷ0 + t_n)
///   α̂2 exp(-b ∫_{y2}^y 1/λ̂)       for y <= ŷ0 - t_n
///
/// Integrals are served from cumulative tables anchored at y1 and y2, so a
/// point evaluation is one lookup plus a short local quadrature.
class TransformCurve {
 public:
  double operator()(double y) const;

  const LambdaCurve& lambda() const noexcept { return curve_; }
  double y0() const noexcept { return y0_; }
  double b() const noexcept { return b_; }
  double alpha2() const noexcept { return alpha2_; }
  double t_n() const noexcept { return t_n_; }
  double y1() const noexcept { return y1_; }
  double y2() const noexcept { return y2_; }
  double lo() const noexcept { return curve_.lo(); }
  double hi() const noexcept { return curve_.hi(); }

  /// ∫_{y1}^y 1/λ̂ for y >= ŷ0 + t_n, from the cache.
  double upper_integral(double y) const;
  /// ∫_{y2}^y 1/λ̂ for y <= ŷ0 - t_n, from the cache.
  double lower_integral(double y) const;

 private:
  friend TransformCurve build_transform(const LambdaCurve&, const ComponentEstimates&, BChoice,
                                        double, double);
  explicit TransformCurve(LambdaCurve curve) : curve_(std::move(curve)) {}

  LambdaCurve curve_;
  double y0_ = 0.0;
  double b_ = 0.0;
  double alpha2_ = 0.0;
  double t_n_ = 0.0;
  double y1_ = 0.0;
  double y2_ = 0.0;
  std::vector<double> upper_nodes_;
  std::vector<double> upper_cache_;
  std::vector<double> lower_nodes_;
  std::vector<double> lower_cache_;
  double upper_edge_ = 0.0;
  double lower_edge_ = 0.0;
};

/// Requires y2 < ŷ0 - t_n and y1 > ŷ0 + t_n (BadAnchors otherwise).
TransformCurve build_transform(const LambdaCurve& curve, const ComponentEstimates& components,
                               BChoice b_choice, double y1, double y2);

/// Trapezoid approximation of ∫_lo^hi (ĥ - truth)^2 on n_grid equidistant
/// points; lo must not be below ŷ0 + t_n.
double mise(const TransformCurve& t, const std::function<double(double)>& truth, double lo,
            double hi, std::size_t n_grid);

}  // namespace hettrans
