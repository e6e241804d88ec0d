#pragma once

#include <span>
#include <vector>

namespace hettrans {

enum class KernelFamily { Epanechnikov, Gaussian, HigherOrder };

/// A univariate smoothing kernel K together with K', the antiderivative
/// 𝒦(u) = ∫_{-∞}^u K and the product kernel built from it.
///
/// Compact families live on [-1, 1] and are stored as polynomials, so every
/// quantity (including 𝒦) is evaluated in closed form. HigherOrder(m) is the
/// Epanechnikov kernel multiplied by an even polynomial of degree m-2 chosen so
/// that the moments of order 1..m-1 vanish.
class Kernel {
 public:
  static Kernel epanechnikov();
  static Kernel gaussian();
  /// `order` must be even and at least 4.
  static Kernel higher_order(int order);

  KernelFamily family() const noexcept { return family_; }
  int order() const noexcept { return order_; }

  double eval(double u) const noexcept;
  double derivative(double u) const noexcept;
  double integral(double u) const noexcept;
  /// Π_j K(u_j); the empty product is 1.
  double product(std::span<const double> u) const noexcept;

  /// Half-width of the support (infinity for the Gaussian).
  double radius() const noexcept;
  /// ∫ K(u)^2 du
  double roughness() const noexcept { return roughness_; }
  /// ∫ K'(u)^2 du
  double derivative_roughness() const noexcept { return derivative_roughness_; }
  /// Factor turning a Gaussian-scale bandwidth into an equivalent one for this
  /// kernel (ratio of canonical bandwidths). HigherOrder kernels use the factor
  /// of their Epanechnikov base.
  double gaussian_equivalence() const noexcept;
  /// (K * K)(t) = ∫ K(s) K(t - s) ds, used by least-squares cross-validation.
  double self_convolution(double t) const noexcept;

 private:
  Kernel(KernelFamily family, int order, std::vector<double> coeffs);

  KernelFamily family_;
  int order_;
  // Ascending polynomial coefficients of K, K' and 𝒦 on [-1, 1].
  std::vector<double> k_;
  std::vector<double> dk_;
  std::vector<double> ik_;
  double roughness_ = 0.0;
  double derivative_roughness_ = 0.0;
};

}  // namespace hettrans
