#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hettrans/numerics.hpp"
#include "hettrans/smoothers.hpp"

namespace hettrans {

enum class WeightKind { Indicator, SmoothBump };

/// Weight function v: a product over coordinates of either the indicator of
/// [a, b] or a C-infinity bump that is 1 on the inner 80% of [a, b] and tapers
/// to 0 at the endpoints.
class WeightFunction {
 public:
  WeightFunction(std::vector<Interval> support, WeightKind kind = WeightKind::Indicator);

  double operator()(std::span<const double> x) const noexcept;
  const std::vector<Interval>& support() const noexcept { return support_; }
  WeightKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return support_.size(); }

 private:
  std::vector<Interval> support_;
  WeightKind kind_;
};

enum class AggregationMode { MeanOverPoints, Trapezoid };

/// Φ̂_y below this drops the regressor point from the λ̂ aggregate.
inline constexpr double kPhiYFloor = 1e-6;

struct LambdaOptions {
  std::size_t n_x = 100;
  AggregationMode mode = AggregationMode::MeanOverPoints;
  std::size_t grid_size = 256;
  /// Extra range the y-grid must cover besides [q_0.01(Y), q_0.99(Y)], e.g.
  /// the anchors y1, y2.
  std::optional<Interval> cover;
  unsigned threads = 1;
};

/// λ̂ on a y-grid, interpolated by a monotone piecewise cubic (PCHIP).
///
/// ∫ 1/λ̂ is the exact integral of the piecewise-linear interpolant of 1/λ̂ on
/// a refined grid (at least 16 sub-intervals per node interval and at least
/// 4096 overall), which makes the integral exactly additive and antisymmetric.
class LambdaCurve {
 public:
  /// `derivative_step` is the base step of the central difference in
  /// derivative(); the effective step is max(derivative_step, grid spacing).
  LambdaCurve(std::vector<double> grid, std::vector<double> values, double derivative_step);

  const std::vector<double>& grid() const noexcept;
  const std::vector<double>& values() const noexcept;
  double lo() const noexcept { return grid().front(); }
  double hi() const noexcept { return grid().back(); }
  double derivative_step() const noexcept;

  /// Throws OutOfRange outside [lo, hi].
  double operator()(double y) const;
  double derivative(double y) const;
  double integral_inverse(double from, double to) const;

  /// Copy of this curve on which integral_inverse refuses any interval that
  /// meets (center - radius, center + radius).
  LambdaCurve with_excluded(double center, double radius) const;
  const std::optional<Interval>& excluded() const noexcept { return excluded_; }

  /// Regressor evaluations dropped by the Φ̂_y floor while building (diagnostic).
  std::size_t dropped_points() const noexcept { return dropped_points_; }
  void set_dropped_points(std::size_t n) noexcept { dropped_points_ = n; }
  /// Grid nodes with no usable regressor point, filled by linear interpolation.
  std::size_t filled_points() const noexcept { return filled_points_; }
  void set_filled_points(std::size_t n) noexcept { filled_points_ = n; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::optional<Interval> excluded_;
  std::size_t dropped_points_ = 0;
  std::size_t filled_points_ = 0;
};

/// Tensor-product grid with composite-trapezoid weights.
struct TensorGrid {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
};

/// `per_axis` equidistant nodes on each interval, combined as a tensor product.
TensorGrid make_tensor_grid(const std::vector<Interval>& box, std::size_t per_axis);

/// Regressor evaluation points for λ̂: for MeanOverPoints an equidistant grid
/// between the smallest and largest observation of each coordinate, for
/// Trapezoid an equidistant grid over the weight support. For d > 1 the grid
/// is a tensor product with ceil(n_x^(1/d)) points per coordinate.
TensorGrid lambda_x_points(const SmootherState& state, const WeightFunction& weight,
                           const LambdaOptions& options);

/// λ̂(y) = aggregate over regressor points x of v(x) Φ̂_x(y,x)/Φ̂_y(y,x).
LambdaCurve build_lambda(const SmootherState& state, const WeightFunction& weight,
                         const LambdaOptions& options = {});

}  // namespace hettrans
