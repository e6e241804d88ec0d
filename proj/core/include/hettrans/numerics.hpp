#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace hettrans {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  bool operator==(const Interval&) const = default;
};

/// n equidistant points from lo to hi inclusive; the endpoints are exact.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);
double quantile(std::vector<double> values, double p);

double mean(std::span<const double> v);
/// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> v);

/// Golden-section search for a minimizer of `f` on [a, b]; stops once the
/// bracket is shorter than `tol`.
double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol);

/// Bisection on a bracket with f(a), f(b) of opposite sign (or one of them 0).
/// Stops when |f| < ftol or the bracket collapses to adjacent doubles.
double bisect_root(const std::function<double(double)>& f, double a, double b, double ftol);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are handed
/// out dynamically; the first exception thrown by a body is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace hettrans
