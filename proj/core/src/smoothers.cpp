#include "hettrans/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hettrans/errors.hpp"
#include "hettrans/numerics.hpp"

namespace hettrans {

Dataset::Dataset(std::vector<double> y, std::vector<double> x_row_major, std::size_t dim)
    : y_(std::move(y)), x_(std::move(x_row_major)), dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "regressor dimension must be at least 1");
  if (y_.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two observations");
  if (x_.size() != y_.size() * dim_)
    throw Error(ErrorCode::InvalidArgument, "regressor matrix does not have n rows");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(y_.begin(), y_.end(), finite) || !std::all_of(x_.begin(), x_.end(), finite))
    throw Error(ErrorCode::InvalidArgument, "dataset contains non-finite entries");
}

Dataset Dataset::univariate(std::vector<double> y, std::vector<double> x) {
  return Dataset(std::move(y), std::move(x), 1);
}

std::vector<double> Dataset::column(std::size_t j) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = x_[i * dim_ + j];
  return out;
}

SmootherState::SmootherState(Dataset data, Kernel kernel, Bandwidths bw, std::size_t deriv_index)
    : data_(std::move(data)), kernel_(std::move(kernel)), bw_(bw), deriv_index_(deriv_index) {
  auto valid = [](double h) { return std::isfinite(h) && h > 0.0; };
  if (!valid(bw_.h_y) || !valid(bw_.h_x))
    throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive and finite");
  if (deriv_index_ >= data_.dim())
    throw Error(ErrorCode::InvalidArgument, "derivative index outside the regressor dimension");
  const auto [lo, hi] = std::minmax_element(data_.ys().begin(), data_.ys().end());
  y_min_ = *lo;
  y_max_ = *hi;
}

void SmootherState::check_point(std::span<const double> x) const {
  if (x.size() != data_.dim())
    throw Error(ErrorCode::InvalidArgument,
                "query point has dimension " + std::to_string(x.size()) + ", expected " +
                    std::to_string(data_.dim()));
}

LocalWeights SmootherState::local_weights(std::span<const double> x) const {
  check_point(x);
  const std::size_t d = data_.dim();
  const double hx = bw_.h_x;
  const double scale = 1.0 / std::pow(hx, static_cast<double>(d));
  const double reach = kernel_.radius();
  LocalWeights out;
  std::vector<double> kv(d);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const auto xi = data_.x(i);
    bool inside = true;
    for (std::size_t k = 0; k < d; ++k) {
      const double u = (x[k] - xi[k]) / hx;
      if (!(std::abs(u) < reach)) {
        inside = false;
        break;
      }
      kv[k] = kernel_.eval(u);
    }
    if (!inside) continue;
    double w = scale;
    double others = scale / hx;
    for (std::size_t k = 0; k < d; ++k) {
      w *= kv[k];
      if (k != deriv_index_) others *= kv[k];
    }
    const double dw = others * kernel_.derivative((x[deriv_index_] - xi[deriv_index_]) / hx);
    if (w == 0.0 && dw == 0.0) continue;
    out.index.push_back(i);
    out.weight.push_back(w);
    out.weight_dx.push_back(dw);
    out.f += w;
    out.f_x += dw;
  }
  const double n = static_cast<double>(data_.size());
  out.f /= n;
  out.f_x /= n;
  return out;
}

double SmootherState::f_hat(std::span<const double> x) const { return local_weights(x).f; }

double SmootherState::f_x_hat(std::span<const double> x) const { return local_weights(x).f_x; }

namespace {

struct PSums {
  double p = 0.0;
  double p_y = 0.0;
  double p_x = 0.0;
};

PSums p_sums(const Dataset& data, const Kernel& kernel, double hy, const LocalWeights& w,
             double y) {
  PSums s;
  for (std::size_t k = 0; k < w.index.size(); ++k) {
    const double u = (y - data.y(w.index[k])) / hy;
    const double cdf = kernel.integral(u);
    s.p += cdf * w.weight[k];
    s.p_x += cdf * w.weight_dx[k];
    s.p_y += kernel.eval(u) * w.weight[k];
  }
  const double n = static_cast<double>(data.size());
  s.p /= n;
  s.p_x /= n;
  s.p_y /= n * hy;
  return s;
}

}  // namespace

double SmootherState::p_hat(double y, std::span<const double> x) const {
  return p_sums(data_, kernel_, bw_.h_y, local_weights(x), y).p;
}

double SmootherState::p_y_hat(double y, std::span<const double> x) const {
  return p_sums(data_, kernel_, bw_.h_y, local_weights(x), y).p_y;
}

double SmootherState::p_x_hat(double y, std::span<const double> x) const {
  return p_sums(data_, kernel_, bw_.h_y, local_weights(x), y).p_x;
}

PhiPartials SmootherState::phi_partials(double y, std::span<const double> x) const {
  return phi_partials(local_weights(x), y);
}

PhiPartials SmootherState::phi_partials(const LocalWeights& w, double y) const {
  if (!(w.f > kDensityFloor))
    throw Error(ErrorCode::DensityTooSmall, "regressor density estimate below the floor");
  const PSums s = p_sums(data_, kernel_, bw_.h_y, w, y);
  return {s.p / w.f, s.p_y / w.f, s.p_x / w.f - s.p * w.f_x / (w.f * w.f)};
}

double SmootherState::phi(const LocalWeights& w, double y) const {
  if (!(w.f > kDensityFloor))
    throw Error(ErrorCode::DensityTooSmall, "regressor density estimate below the floor");
  double p = 0.0;
  for (std::size_t k = 0; k < w.index.size(); ++k)
    p += kernel_.integral((y - data_.y(w.index[k])) / bw_.h_y) * w.weight[k];
  return p / static_cast<double>(data_.size()) / w.f;
}

double SmootherState::cond_quantile(double tau, std::span<const double> x) const {
  return cond_quantile(tau, local_weights(x));
}

double SmootherState::cond_quantile(double tau, const LocalWeights& w) const {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must lie in (0,1)");
  constexpr std::size_t kScanPoints = 512;
  constexpr double kTol = 1e-8;
  const auto grid = linspace(y_min_ - bw_.h_y, y_max_ + bw_.h_y, kScanPoints);
  std::size_t hit = grid.size();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (phi(w, grid[g]) >= tau) {
      hit = g;
      break;
    }
  }
  if (hit == grid.size())
    throw Error(ErrorCode::QuantileNotBracketed, "conditional CDF estimate never reaches tau");
  if (hit == 0) return grid[0];
  double lo = grid[hit - 1];
  double hi = grid[hit];
  double f_hi = phi(w, hi);
  while (f_hi - tau > kTol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = phi(w, mid);
    if (f_mid >= tau) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace hettrans
