#include "hettrans/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hettrans/errors.hpp"

namespace hettrans {
namespace {

// Sorted, de-duplicated nodes of `grid` inside [a, b] plus the given extras.
std::vector<double> cache_nodes(const std::vector<double>& grid, double a, double b,
                                std::initializer_list<double> extras) {
  std::vector<double> nodes;
  for (double g : grid)
    if (g >= a && g <= b) nodes.push_back(g);
  for (double e : extras) nodes.push_back(e);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

// cache[k] = ∫_{anchor}^{nodes[k]} 1/λ̂, accumulated outwards from the anchor.
std::vector<double> cumulative_from(const LambdaCurve& curve, const std::vector<double>& nodes,
                                    double anchor) {
  std::vector<double> cache(nodes.size(), 0.0);
  const auto start = static_cast<std::size_t>(
      std::lower_bound(nodes.begin(), nodes.end(), anchor) - nodes.begin());
  for (std::size_t k = start + 1; k < nodes.size(); ++k)
    cache[k] = cache[k - 1] + curve.integral_inverse(nodes[k - 1], nodes[k]);
  for (std::size_t k = start; k-- > 0;)
    cache[k] = cache[k + 1] + curve.integral_inverse(nodes[k + 1], nodes[k]);
  return cache;
}

double lookup(const LambdaCurve& curve, const std::vector<double>& nodes,
              const std::vector<double>& cache, double y) {
  auto it = std::upper_bound(nodes.begin(), nodes.end(), y);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - nodes.begin() - 1, 0));
  return cache[k] + curve.integral_inverse(nodes[k], y);
}

}  // namespace

TransformCurve build_transform(const LambdaCurve& curve, const ComponentEstimates& components,
                               BChoice b_choice, double y1, double y2) {
  const double y0 = components.y0_hat;
  const double t = components.t_n;
  if (!(t > 0.0)) throw Error(ErrorCode::BadAnchors, "t_n must be positive");
  if (!(y2 < y0 - t && y0 + t < y1))
    throw Error(ErrorCode::BadAnchors, "anchors must satisfy y2 < y0 - t_n < y0 + t_n < y1");
  if (!(y2 >= curve.lo() && y1 <= curve.hi()))
    throw Error(ErrorCode::OutOfRange, "anchors y1, y2 must lie on the lambda grid");

  TransformCurve out(curve.with_excluded(y0, t));
  out.y0_ = y0;
  out.t_n_ = t;
  out.y1_ = y1;
  out.y2_ = y2;
  out.b_ = b_choice.use_hat ? b_choice.b_hat : components.b_tilde;
  out.alpha2_ = b_choice.use_hat ? estimate_alpha2(out.curve_, y0, out.b_, y1, y2, t)
                                 : components.alpha2_hat;

  out.upper_nodes_ = cache_nodes(curve.grid(), y0 + t, curve.hi(), {y0 + t, y1});
  out.upper_cache_ = cumulative_from(out.curve_, out.upper_nodes_, y1);
  out.lower_nodes_ = cache_nodes(curve.grid(), curve.lo(), y0 - t, {y0 - t, y2});
  out.lower_cache_ = cumulative_from(out.curve_, out.lower_nodes_, y2);

  out.upper_edge_ = std::exp(-out.b_ * out.upper_integral(y0 + t));
  out.lower_edge_ = out.alpha2_ * std::exp(-out.b_ * out.lower_integral(y0 - t));
  return out;
}

double TransformCurve::upper_integral(double y) const {
  return lookup(curve_, upper_nodes_, upper_cache_, y);
}

double TransformCurve::lower_integral(double y) const {
  return lookup(curve_, lower_nodes_, lower_cache_, y);
}

double TransformCurve::operator()(double y) const {
  if (!(y >= lo() && y <= hi()))
    throw Error(ErrorCode::OutOfRange, "y = " + std::to_string(y) + " outside the transform range");
  if (y >= y0_ + t_n_) return std::exp(-b_ * upper_integral(y));
  if (y > y0_) return (y - y0_) / t_n_ * upper_edge_;
  if (y == y0_) return 0.0;
  if (y > y0_ - t_n_) return (y0_ - y) / t_n_ * lower_edge_;
  return alpha2_ * std::exp(-b_ * lower_integral(y));
}

double mise(const TransformCurve& t, const std::function<double(double)>& truth, double lo,
            double hi, std::size_t n_grid) {
  if (lo < t.y0() + t.t_n())
    throw Error(ErrorCode::InvalidArgument, "MISE grid must start at or above y0 + t_n");
  if (!(hi > lo) || n_grid < 2) throw Error(ErrorCode::InvalidArgument, "MISE grid is empty");
  const auto ys = linspace(lo, hi, n_grid);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double diff = t(ys[k]) - truth(ys[k]);
    const double sq = diff * diff;
    if (k > 0) acc += 0.5 * (ys[k] - ys[k - 1]) * (prev + sq);
    prev = sq;
  }
  return acc;
}

}  // namespace hettrans
