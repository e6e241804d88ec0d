#include "hettrans/lambda_curve.hpp"

#include <math.h>  // boost 1.74 pchip calls isnan unqualified

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/interpolators/pchip.hpp>

#include "hettrans/errors.hpp"

namespace hettrans {

// ---------------------------------------------------------------- weights --

WeightFunction::WeightFunction(std::vector<Interval> support, WeightKind kind)
    : support_(std::move(support)), kind_(kind) {
  if (support_.empty()) throw Error(ErrorCode::InvalidArgument, "weight support is empty");
  for (const auto& iv : support_)
    if (!(iv.lo < iv.hi)) throw Error(ErrorCode::InvalidArgument, "weight support needs a < b");
}

namespace {

double smooth_step(double z) noexcept {
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double a = psi(z);
  const double b = psi(1.0 - z);
  return a / (a + b);
}

constexpr double kTaper = 0.1;

}  // namespace

double WeightFunction::operator()(std::span<const double> x) const noexcept {
  double v = 1.0;
  for (std::size_t j = 0; j < support_.size() && j < x.size(); ++j) {
    const auto& iv = support_[j];
    if (x[j] < iv.lo || x[j] > iv.hi) return 0.0;
    if (kind_ == WeightKind::SmoothBump) {
      const double t = (x[j] - iv.lo) / iv.length();
      if (t < kTaper) v *= smooth_step(t / kTaper);
      else if (t > 1.0 - kTaper) v *= smooth_step((1.0 - t) / kTaper);
    }
  }
  return v;
}

// ---------------------------------------------------------------- curve ----

struct LambdaCurve::Impl {
  std::vector<double> grid;
  std::vector<double> values;
  double step = 0.0;
  double spacing = 0.0;
  boost::math::interpolators::pchip<std::vector<double>> spline;
  std::vector<double> fine;  // refined nodes
  std::vector<double> inv;   // 1/λ̂ at the refined nodes
  std::vector<double> seg;   // trapezoid integral over each refined segment

  Impl(std::vector<double> g, std::vector<double> v, double s)
      : grid(g), values(v), step(s), spline(std::move(g), std::move(v)) {}

  std::size_t segment(double y) const {
    const auto it = std::upper_bound(fine.begin(), fine.end(), y);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - fine.begin() - 1, 0));
    return std::min(k, fine.size() - 2);
  }

  // ∫_{fine[k]}^{y} of the linear interpolant of 1/λ̂ on segment k.
  double partial(std::size_t k, double y) const {
    const double dy = y - fine[k];
    const double h = fine[k + 1] - fine[k];
    return dy * inv[k] + 0.5 * dy * dy * (inv[k + 1] - inv[k]) / h;
  }
};

LambdaCurve::LambdaCurve(std::vector<double> grid, std::vector<double> values,
                         double derivative_step) {
  if (grid.size() < 4 || grid.size() != values.size())
    throw Error(ErrorCode::InvalidArgument, "lambda curve needs at least 4 matching grid points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "lambda grid must be strictly increasing");
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
    throw Error(ErrorCode::InvalidArgument, "lambda values must be finite");
  if (!(derivative_step > 0.0))
    throw Error(ErrorCode::InvalidArgument, "derivative step must be positive");

  auto impl = std::make_shared<Impl>(grid, values, derivative_step);
  for (std::size_t i = 1; i < grid.size(); ++i)
    impl->spacing = std::max(impl->spacing, grid[i] - grid[i - 1]);

  const std::size_t intervals = grid.size() - 1;
  const std::size_t sub = std::max<std::size_t>(16, (4096 + intervals - 1) / intervals);
  impl->fine.reserve(intervals * sub + 1);
  for (std::size_t i = 0; i < intervals; ++i) {
    const double a = grid[i];
    const double h = (grid[i + 1] - a) / static_cast<double>(sub);
    for (std::size_t s = 0; s < sub; ++s) impl->fine.push_back(a + h * static_cast<double>(s));
  }
  impl->fine.push_back(grid.back());
  impl->inv.resize(impl->fine.size());
  for (std::size_t k = 0; k < impl->fine.size(); ++k) impl->inv[k] = 1.0 / impl->spline(impl->fine[k]);
  impl->seg.resize(impl->fine.size() - 1);
  for (std::size_t k = 0; k + 1 < impl->fine.size(); ++k)
    impl->seg[k] = 0.5 * (impl->fine[k + 1] - impl->fine[k]) * (impl->inv[k] + impl->inv[k + 1]);
  impl_ = std::move(impl);
}

const std::vector<double>& LambdaCurve::grid() const noexcept { return impl_->grid; }
const std::vector<double>& LambdaCurve::values() const noexcept { return impl_->values; }
double LambdaCurve::derivative_step() const noexcept { return impl_->step; }

double LambdaCurve::operator()(double y) const {
  if (!(y >= lo() && y <= hi()))
    throw Error(ErrorCode::OutOfRange, "y = " + std::to_string(y) + " outside the lambda grid");
  return impl_->spline(y);
}

double LambdaCurve::derivative(double y) const {
  const double delta = std::max(impl_->step, impl_->spacing);
  if (!(y - delta >= lo() && y + delta <= hi()))
    throw Error(ErrorCode::OutOfRange,
                "y = " + std::to_string(y) + " too close to the lambda grid boundary");
  return (impl_->spline(y + delta) - impl_->spline(y - delta)) / (2.0 * delta);
}

double LambdaCurve::integral_inverse(double from, double to) const {
  const double a = std::min(from, to);
  const double b = std::max(from, to);
  if (!(a >= lo() && b <= hi()))
    throw Error(ErrorCode::OutOfRange, "integration interval outside the lambda grid");
  if (excluded_ && a < excluded_->hi && b > excluded_->lo)
    throw Error(ErrorCode::SingularityInRange,
                "integration interval meets the excluded neighbourhood of the root");
  if (a == b) return 0.0;
  const Impl& im = *impl_;
  const std::size_t ka = im.segment(a);
  const std::size_t kb = im.segment(b);
  for (std::size_t k = ka; k <= kb + 1; ++k)
    if (!std::isfinite(im.inv[k]))
      throw Error(ErrorCode::SingularityInRange, "lambda vanishes inside the integration interval");
  double sum = 0.0;
  for (std::size_t k = ka; k < kb; ++k) sum += im.seg[k];
  const double value = sum + im.partial(kb, b) - im.partial(ka, a);
  return from <= to ? value : -value;
}

LambdaCurve LambdaCurve::with_excluded(double center, double radius) const {
  LambdaCurve copy = *this;
  copy.excluded_ = Interval{center - radius, center + radius};
  return copy;
}

// ---------------------------------------------------------------- build ----

TensorGrid make_tensor_grid(const std::vector<Interval>& box, std::size_t per_axis) {
  if (per_axis < 1) throw Error(ErrorCode::InvalidArgument, "tensor grid needs nodes");
  std::vector<std::vector<double>> axes;
  std::vector<std::vector<double>> axis_weights;
  for (const auto& iv : box) {
    axes.push_back(linspace(iv.lo, iv.hi, per_axis));
    std::vector<double> w(per_axis, per_axis > 1 ? iv.length() / static_cast<double>(per_axis - 1) : iv.length());
    if (per_axis > 1) {
      w.front() *= 0.5;
      w.back() *= 0.5;
    }
    axis_weights.push_back(std::move(w));
  }
  TensorGrid out;
  std::vector<std::size_t> idx(box.size(), 0);
  while (true) {
    std::vector<double> p(box.size());
    double w = 1.0;
    for (std::size_t j = 0; j < box.size(); ++j) {
      p[j] = axes[j][idx[j]];
      w *= axis_weights[j][idx[j]];
    }
    out.points.push_back(std::move(p));
    out.weights.push_back(w);
    std::size_t j = 0;
    while (j < box.size() && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == box.size()) break;
  }
  return out;
}

TensorGrid lambda_x_points(const SmootherState& state, const WeightFunction& weight,
                           const LambdaOptions& options) {
  const std::size_t d = state.data().dim();
  if (weight.dim() != d)
    throw Error(ErrorCode::InvalidArgument, "weight support dimension differs from the regressor");
  if (options.n_x < 2) throw Error(ErrorCode::InvalidArgument, "need at least two regressor points");
  const auto per_axis =
      d == 1 ? options.n_x
             : static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(options.n_x), 1.0 / static_cast<double>(d)) - 1e-9));
  if (options.mode == AggregationMode::Trapezoid) return make_tensor_grid(weight.support(), per_axis);
  std::vector<Interval> box;
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = state.data().column(j);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    box.push_back({*lo, *hi});
  }
  return make_tensor_grid(box, per_axis);
}

LambdaCurve build_lambda(const SmootherState& state, const WeightFunction& weight,
                         const LambdaOptions& options) {
  if (options.grid_size < 4) throw Error(ErrorCode::InvalidArgument, "lambda grid too small");
  std::vector<double> sorted_y(state.data().ys().begin(), state.data().ys().end());
  std::sort(sorted_y.begin(), sorted_y.end());
  double lo = quantile_sorted(sorted_y, 0.01);
  double hi = quantile_sorted(sorted_y, 0.99);
  if (options.cover) {
    lo = std::min(lo, options.cover->lo);
    hi = std::max(hi, options.cover->hi);
  }
  if (!(lo < hi)) throw Error(ErrorCode::DegenerateSample, "response has no spread");
  const TensorGrid xs = lambda_x_points(state, weight, options);
  const bool mean_mode = options.mode == AggregationMode::MeanOverPoints;

  struct XPoint {
    LocalWeights local;
    double v;
    double q;  // quadrature weight
  };
  std::vector<XPoint> active;
  double total_q = 0.0;
  std::size_t unusable = 0;
  for (std::size_t k = 0; k < xs.points.size(); ++k) {
    const double q = mean_mode ? 1.0 : xs.weights[k];
    total_q += q;
    const double v = weight(xs.points[k]);
    LocalWeights lw = state.local_weights(xs.points[k]);
    if (v != 0.0 && !(lw.f > kDensityFloor)) {
      ++unusable;
      continue;
    }
    active.push_back({std::move(lw), v, q});
  }

  auto evaluate = [&](const std::vector<double>& grid, std::vector<double>& values,
                      std::vector<char>& valid, std::size_t& total_dropped) {
    values.assign(grid.size(), 0.0);
    valid.assign(grid.size(), 0);
    std::vector<std::size_t> dropped(grid.size(), 0);
    parallel_for(grid.size(), options.threads, [&](std::size_t g) {
      double acc = 0.0;
      double kept_q = 0.0;
      std::size_t lost = unusable;
      for (const auto& xp : active) {
        if (xp.v == 0.0) {
          kept_q += xp.q;
          continue;
        }
        const PhiPartials ph = state.phi_partials(xp.local, grid[g]);
        if (!(ph.phi_y > kPhiYFloor)) {
          ++lost;
          continue;
        }
        acc += xp.q * xp.v * ph.phi_x / ph.phi_y;
        kept_q += xp.q;
      }
      dropped[g] = lost;
      if (!(kept_q > 0.0) || lost == xs.points.size()) return;
      values[g] = mean_mode ? acc / kept_q : acc * total_q / kept_q;
      valid[g] = 1;
    });
    total_dropped = 0;
    for (auto d : dropped) total_dropped += d;
  };

  // Tails where no regressor point sees any data are cut off and the grid is
  // respread over what remains. Isolated holes inside are filled linearly.
  std::vector<double> grid = linspace(lo, hi, options.grid_size);
  std::vector<double> values;
  std::vector<char> valid;
  std::size_t total_dropped = 0;
  for (int attempt = 0;; ++attempt) {
    evaluate(grid, values, valid, total_dropped);
    const auto first = std::find(valid.begin(), valid.end(), 1);
    if (first == valid.end())
      throw Error(ErrorCode::AllPointsDegenerate, "no regressor point has a usable density on the grid");
    const auto last = std::find(valid.rbegin(), valid.rend(), 1);
    const auto i0 = static_cast<std::size_t>(first - valid.begin());
    const auto i1 = grid.size() - 1 - static_cast<std::size_t>(last - valid.rbegin());
    if (i0 == 0 && i1 == grid.size() - 1) break;
    if (attempt == 3 || i1 - i0 < 3)
      throw Error(ErrorCode::AllPointsDegenerate, "usable part of the response range is too short");
    grid = linspace(grid[i0], grid[i1], options.grid_size);
  }
  std::size_t filled = 0;
  for (std::size_t g = 1; g + 1 < grid.size(); ++g) {
    if (valid[g]) continue;
    std::size_t next = g + 1;
    while (!valid[next]) ++next;
    const double t = (grid[g] - grid[g - 1]) / (grid[next] - grid[g - 1]);
    values[g] = values[g - 1] + t * (values[next] - values[g - 1]);
    ++filled;
  }

  LambdaCurve curve(grid, std::move(values), 0.5 * state.bandwidths().h_y);
  curve.set_dropped_points(total_dropped);
  curve.set_filled_points(filled);
  return curve;
}

}  // namespace hettrans
