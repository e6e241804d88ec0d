#include "hettrans/anchors.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hettrans/errors.hpp"
#include "hettrans/numerics.hpp"

namespace hettrans {

double estimate_y0(const LambdaCurve& curve) {
  const auto& grid = curve.grid();
  const auto& values = curve.values();
  auto lambda = [&](double y) { return curve(y); };
  double best = std::numeric_limits<double>::quiet_NaN();
  auto consider = [&](double root) {
    if (std::isnan(best) || std::abs(root) < std::abs(best)) best = root;
  };
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (values[g] == 0.0) {
      consider(grid[g]);
      continue;
    }
    if (g + 1 < grid.size() && values[g + 1] != 0.0 && (values[g] > 0.0) != (values[g + 1] > 0.0))
      consider(bisect_root(lambda, grid[g], grid[g + 1], 1e-10));
  }
  if (std::isnan(best)) throw Error(ErrorCode::NoRoot, "lambda estimate has no sign change");
  return best;
}

double compute_t_n(std::size_t n, double h_y, double c_t) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "t_n needs n >= 2");
  if (!(h_y > 0.0) || !(c_t > 0.0))
    throw Error(ErrorCode::InvalidArgument, "t_n needs positive h_y and c_t");
  const double log_n = std::log(static_cast<double>(n));
  return c_t * std::pow(log_n * log_n / (static_cast<double>(n) * h_y), 0.25);
}

double estimate_b_tilde(const LambdaCurve& curve, double y0_hat) {
  return -curve.derivative(y0_hat);
}

double estimate_alpha2(const LambdaCurve& curve, double y0_hat, double b, double y1, double y2,
                       double t_n) {
  if (!(t_n > 0.0)) throw Error(ErrorCode::BadAnchors, "t_n must be positive");
  if (!(y2 < y0_hat - t_n && y0_hat + t_n < y1))
    throw Error(ErrorCode::BadAnchors, "anchors must satisfy y2 < y0 - t_n < y0 + t_n < y1 (y0 = " +
                                           std::to_string(y0_hat) + ", t_n = " +
                                           std::to_string(t_n) + ")");
  const double lower = curve.integral_inverse(y2, y0_hat - t_n);
  const double upper = curve.integral_inverse(y1, y0_hat + t_n);
  return -std::exp(b * (lower - upper));
}

DensityTerms density_terms(const SmootherState& state, double y, std::span<const double> x) {
  const LocalWeights w = state.local_weights(x);
  DensityTerms t;
  t.f = w.f;
  t.f_x = w.f_x;
  const double n = static_cast<double>(state.data().size());
  const double hy = state.bandwidths().h_y;
  for (std::size_t k = 0; k < w.index.size(); ++k) {
    const double u = (y - state.data().y(w.index[k])) / hy;
    const double cdf = state.kernel().integral(u);
    t.p += cdf * w.weight[k];
    t.p_x += cdf * w.weight_dx[k];
    t.p_y += state.kernel().eval(u) * w.weight[k];
  }
  t.p /= n;
  t.p_x /= n;
  t.p_y /= n * hy;
  return t;
}

double d_p0(const DensityTerms& t) noexcept { return -t.f_x / (t.phi_y() * t.f * t.f); }

double d_py(const DensityTerms& t) noexcept {
  const double py = t.phi_y();
  return -t.phi_x() / (py * py * t.f);
}

double d_px(const DensityTerms& t) noexcept { return 1.0 / (t.phi_y() * t.f); }

double d_f0(const DensityTerms& t) noexcept {
  const double py = t.phi_y();
  const double f2 = t.f * t.f;
  return 2.0 * t.p * t.f_x / (py * f2 * t.f) - t.p_x / (py * f2) + t.p_y * t.phi_x() / (py * py * f2);
}

double d_fx(const DensityTerms& t) noexcept { return -t.p / (t.phi_y() * t.f * t.f); }

double dpy_weighted_integral(const SmootherState& state, double y0, const WeightFunction& weight) {
  const std::size_t d = state.data().dim();
  const std::size_t per_axis = d == 1 ? 101 : 21;
  const TensorGrid grid = make_tensor_grid(weight.support(), per_axis);
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const double v = weight(grid.points[k]);
    if (v == 0.0) continue;
    const DensityTerms t = density_terms(state, y0, grid.points[k]);
    if (!(t.f > kDensityFloor) || !(t.phi_y() > kPhiYFloor)) continue;
    const double dpy = d_py(t);
    acc += grid.weights[k] * v * v * dpy * dpy * t.p_y;
  }
  return acc;
}

double var_y0_plugin(const SmootherState& state, double y0_hat, double b,
                     const WeightFunction& weight) {
  if (b == 0.0) throw Error(ErrorCode::DivisionByZero, "variance of y0 needs b != 0");
  return state.kernel().roughness() / (b * b) * dpy_weighted_integral(state, y0_hat, weight);
}

double var_b_tilde_plugin(const SmootherState& state, double y0_hat, const WeightFunction& weight) {
  return state.kernel().derivative_roughness() * dpy_weighted_integral(state, y0_hat, weight);
}

}  // namespace hettrans
