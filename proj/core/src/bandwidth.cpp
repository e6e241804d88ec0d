#include <algorithm>
#include <cmath>
#include <limits>

#include "hettrans/errors.hpp"
#include "hettrans/numerics.hpp"
#include "hettrans/smoothers.hpp"

namespace hettrans {
namespace {

// min(sd, IQR/1.34), falling back to sd when the IQR vanishes.
double robust_scale(std::vector<double> values) {
  const double sd = sample_sd(values);
  std::sort(values.begin(), values.end());
  const double iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
  const double scale = std::min(sd, iqr / 1.34);
  return scale > 0.0 ? scale : sd;
}

}  // namespace

double cv_criterion(std::span<const double> sorted_y, const Kernel& kernel, double h) {
  const std::size_t n = sorted_y.size();
  const double reach = 2.0 * kernel.radius() * h;
  double conv_sum = 0.0;
  double loo_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = sorted_y[j] - sorted_y[i];
      if (diff >= reach) break;
      const double u = diff / h;
      conv_sum += kernel.self_convolution(u);
      loo_sum += kernel.eval(u);
    }
  }
  const double nd = static_cast<double>(n);
  const double integral_sq = (nd * kernel.self_convolution(0.0) + 2.0 * conv_sum) / (nd * nd * h);
  const double loo = 2.0 * loo_sum / ((nd - 1.0) * h);
  return integral_sq - 2.0 * loo / nd;
}

double reference_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two values");
  const double scale = robust_scale({values.begin(), values.end()});
  if (!(scale > 0.0)) throw Error(ErrorCode::DegenerateSample, "sample has zero spread");
  return 1.06 * scale * std::pow(static_cast<double>(values.size()), -0.2);
}

double select_h_y_cv(const Dataset& data, const Kernel& kernel) {
  if (data.size() < 10)
    throw Error(ErrorCode::InvalidArgument, "cross-validation needs at least 10 observations");
  std::vector<double> y(data.ys().begin(), data.ys().end());
  if (sample_sd(y) == 0.0) throw Error(ErrorCode::DegenerateSample, "response is constant");
  std::sort(y.begin(), y.end());
  const double h_ref = reference_bandwidth(y);

  constexpr std::size_t kGrid = 40;
  const auto log_grid = linspace(std::log(0.05 * h_ref), std::log(2.0 * h_ref), kGrid);
  auto score = [&](double log_h) { return cv_criterion(y, kernel, std::exp(log_h)); };
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < kGrid; ++g) {
    const double s = score(log_grid[g]);
    if (s < best_score) {
      best_score = s;
      best = g;
    }
  }
  const double a = log_grid[best == 0 ? 0 : best - 1];
  const double b = log_grid[std::min(best + 1, kGrid - 1)];
  const double refined = golden_section_minimize(score, a, b, 1e-4);
  return score(refined) <= best_score ? std::exp(refined) : std::exp(log_grid[best]);
}

double select_h_x_reference(const Dataset& data) {
  const std::size_t d = data.dim();
  double log_sum = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double s = robust_scale(data.column(j));
    if (!(s > 0.0))
      throw Error(ErrorCode::DegenerateSample,
                  "regressor coordinate " + std::to_string(j + 1) + " is constant");
    log_sum += std::log(s);
  }
  const double scale = std::exp(log_sum / static_cast<double>(d));
  return 1.06 * scale * std::pow(static_cast<double>(data.size()), -1.0 / (4.0 + static_cast<double>(d)));
}

}  // namespace hettrans
