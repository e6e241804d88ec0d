#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hettrans/kernels.hpp"

namespace hettrans {

/// n paired observations (Y_i, X_i) with X_i in R^d, stored row-major.
class Dataset {
 public:
  Dataset(std::vector<double> y, std::vector<double> x_row_major, std::size_t dim);
  static Dataset univariate(std::vector<double> y, std::vector<double> x);

  std::size_t size() const noexcept { return y_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  double y(std::size_t i) const noexcept { return y_[i]; }
  std::span<const double> x(std::size_t i) const noexcept { return {x_.data() + i * dim_, dim_}; }
  std::span<const double> ys() const noexcept { return y_; }
  std::span<const double> xs() const noexcept { return x_; }
  std::vector<double> column(std::size_t j) const;

 private:
  std::vector<double> y_;
  std::vector<double> x_;
  std::size_t dim_;
};

struct Bandwidths {
  double h_y = 0.0;
  double h_x = 0.0;

  bool operator==(const Bandwidths&) const = default;
};

struct PhiPartials {
  double phi = 0.0;
  double phi_y = 0.0;
  double phi_x = 0.0;
};

/// Kernel weights of the observations that contribute at a fixed regressor
/// point, plus f̂ and f̂_x there. Lets callers sweep many y values at one x.
struct LocalWeights {
  std::vector<std::size_t> index;
  std::vector<double> weight;       // 𝐊_{h_x}(x - X_i)
  std::vector<double> weight_dx;    // ∂/∂x_j 𝐊_{h_x}(x - X_i)
  double f = 0.0;
  double f_x = 0.0;
};

/// Density floor below which Φ̂ and its partials are not evaluated.
inline constexpr double kDensityFloor = 1e-8;

/// Immutable bundle of data, kernel and bandwidths exposing the kernel plug-in
/// estimates f̂, f̂_x, p̂, p̂_y, p̂_x and Φ̂ with its partials. `deriv_index` is
/// the regressor coordinate j the x-derivatives are taken in (0-based).
class SmootherState {
 public:
  SmootherState(Dataset data, Kernel kernel, Bandwidths bw, std::size_t deriv_index = 0);

  const Dataset& data() const noexcept { return data_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  const Bandwidths& bandwidths() const noexcept { return bw_; }
  std::size_t deriv_index() const noexcept { return deriv_index_; }
  double y_min() const noexcept { return y_min_; }
  double y_max() const noexcept { return y_max_; }

  double f_hat(std::span<const double> x) const;
  double f_x_hat(std::span<const double> x) const;
  double p_hat(double y, std::span<const double> x) const;
  double p_y_hat(double y, std::span<const double> x) const;
  double p_x_hat(double y, std::span<const double> x) const;

  /// (Φ̂, Φ̂_y, Φ̂_x); throws DensityTooSmall when f̂(x) <= kDensityFloor.
  PhiPartials phi_partials(double y, std::span<const double> x) const;

  LocalWeights local_weights(std::span<const double> x) const;
  PhiPartials phi_partials(const LocalWeights& w, double y) const;
  double phi(const LocalWeights& w, double y) const;

  /// Smallest y with Φ̂(y, x) >= tau, found by a 512-point scan over
  /// [min Y - h_y, max Y + h_y] followed by bisection.
  double cond_quantile(double tau, std::span<const double> x) const;
  double cond_quantile(double tau, const LocalWeights& w) const;

 private:
  void check_point(std::span<const double> x) const;

  Dataset data_;
  Kernel kernel_;
  Bandwidths bw_;
  std::size_t deriv_index_;
  double y_min_;
  double y_max_;
};

/// Least-squares cross-validation criterion ∫f̂² - (2/n) Σ f̂_{-i}(Y_i) for the
/// marginal density of `sorted_y` (ascending) at bandwidth h.
double cv_criterion(std::span<const double> sorted_y, const Kernel& kernel, double h);

/// 1.06 * min(sd, IQR/1.34) * n^(-1/5) for a univariate sample.
double reference_bandwidth(std::span<const double> values);

/// h_y minimising cv_criterion over 40 log-spaced multiples in [0.05, 2] of
/// the reference bandwidth, refined by golden-section search.
double select_h_y_cv(const Dataset& data, const Kernel& kernel);

/// Normal reference rule for h_x: 1.06 * s * n^(-1/(4+d)) with s the geometric
/// mean over coordinates of min(sd, IQR/1.34).
double select_h_x_reference(const Dataset& data);

}  // namespace hettrans
