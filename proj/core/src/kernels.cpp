#include "hettrans/kernels.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "hettrans/errors.hpp"

namespace hettrans {
namespace {

double horner(const std::vector<double>& c, double u) noexcept {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> out(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) out[i - 1] = c[i] * static_cast<double>(i);
  return out;
}

// Antiderivative normalised to vanish at u = -1.
std::vector<double> poly_integral_from_minus_one(const std::vector<double>& c) {
  std::vector<double> out(c.size() + 1, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) out[i + 1] = c[i] / static_cast<double>(i + 1);
  out[0] = -horner(out, -1.0);
  return out;
}

double poly_integral_over_support(const std::vector<double>& c) {
  const auto anti = poly_integral_from_minus_one(c);
  return horner(anti, 1.0);
}

// Coefficients of the order-m kernel P(u) * 0.75(1 - u^2) with P even.
std::vector<double> higher_order_coefficients(int order) {
  const auto terms = static_cast<std::size_t>(order / 2);
  // Even moments of the Epanechnikov kernel: 3 / ((2i+1)(2i+3)).
  auto moment = [](std::size_t i) {
    const double a = 2.0 * static_cast<double>(i);
    return 3.0 / ((a + 1.0) * (a + 3.0));
  };
  std::vector<std::vector<double>> m(terms, std::vector<double>(terms + 1, 0.0));
  for (std::size_t k = 0; k < terms; ++k) {
    for (std::size_t j = 0; j < terms; ++j) m[k][j] = moment(j + k);
    m[k][terms] = k == 0 ? 1.0 : 0.0;
  }
  // Gaussian elimination with partial pivoting; the system is tiny.
  for (std::size_t col = 0; col < terms; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < terms; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    std::swap(m[col], m[pivot]);
    for (std::size_t r = 0; r < terms; ++r) {
      if (r == col) continue;
      const double factor = m[r][col] / m[col][col];
      for (std::size_t j = col; j <= terms; ++j) m[r][j] -= factor * m[col][j];
    }
  }
  std::vector<double> p(2 * terms - 1, 0.0);
  for (std::size_t j = 0; j < terms; ++j) p[2 * j] = m[j][terms] / m[j][j];
  return poly_mul(p, {0.75, 0.0, -0.75});
}

constexpr double kInvSqrt2Pi = 0.3989422804014327;

}  // namespace

Kernel::Kernel(KernelFamily family, int order, std::vector<double> coeffs)
    : family_(family), order_(order), k_(std::move(coeffs)) {
  if (family_ == KernelFamily::Gaussian) {
    roughness_ = 1.0 / (2.0 * std::sqrt(std::numbers::pi));
    derivative_roughness_ = 1.0 / (4.0 * std::sqrt(std::numbers::pi));
    return;
  }
  dk_ = poly_derivative(k_);
  ik_ = poly_integral_from_minus_one(k_);
  roughness_ = poly_integral_over_support(poly_mul(k_, k_));
  derivative_roughness_ = poly_integral_over_support(poly_mul(dk_, dk_));
}

Kernel Kernel::epanechnikov() { return Kernel(KernelFamily::Epanechnikov, 2, {0.75, 0.0, -0.75}); }

Kernel Kernel::gaussian() { return Kernel(KernelFamily::Gaussian, 2, {}); }

Kernel Kernel::higher_order(int order) {
  if (order < 4 || order % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "higher-order kernels need an even order >= 4");
  return Kernel(KernelFamily::HigherOrder, order, higher_order_coefficients(order));
}

double Kernel::eval(double u) const noexcept {
  if (family_ == KernelFamily::Gaussian) return kInvSqrt2Pi * std::exp(-0.5 * u * u);
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return horner(k_, u);
}

double Kernel::derivative(double u) const noexcept {
  if (family_ == KernelFamily::Gaussian) return -u * kInvSqrt2Pi * std::exp(-0.5 * u * u);
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return horner(dk_, u);
}

double Kernel::integral(double u) const noexcept {
  if (family_ == KernelFamily::Gaussian) return 0.5 * std::erfc(-u / std::numbers::sqrt2);
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return horner(ik_, u);
}

double Kernel::product(std::span<const double> u) const noexcept {
  double acc = 1.0;
  for (double v : u) {
    acc *= eval(v);
    if (acc == 0.0) break;
  }
  return acc;
}

double Kernel::radius() const noexcept {
  return family_ == KernelFamily::Gaussian ? std::numeric_limits<double>::infinity() : 1.0;
}

double Kernel::gaussian_equivalence() const noexcept {
  if (family_ == KernelFamily::Gaussian) return 1.0;
  // (R(K) / mu_2(K)^2)^(1/5) for Epanechnikov over the same for the Gaussian.
  return std::pow(15.0 * 2.0 * std::sqrt(std::numbers::pi), 0.2);
}

double Kernel::self_convolution(double t) const noexcept {
  if (family_ == KernelFamily::Gaussian)
    return std::exp(-0.25 * t * t) / (2.0 * std::sqrt(std::numbers::pi));
  const double a = std::abs(t);
  if (a >= 2.0) return 0.0;
  // K(s)K(t-s) is a polynomial on the overlap [t-1, 1] (t >= 0), so a
  // 20-point Gauss-Legendre rule is exact up to order 19 kernels.
  auto integrand = [&](double s) { return horner(k_, s) * horner(k_, a - s); };
  return boost::math::quadrature::gauss<double, 20>::integrate(integrand, a - 1.0, 1.0);
}

}  // namespace hettrans
