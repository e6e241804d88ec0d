#pragma once

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <random>

#include "hettrans/kernels.hpp"
#include "hettrans/msd.hpp"
#include "hettrans/simstudy.hpp"
#include "hettrans/smoothers.hpp"
#include "oracle.hpp"

namespace testing_support {

inline hettrans::Dataset design_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return hettrans::sim::generate(n, rng);
}

// Same bandwidth rule as the fitting pipeline.
inline hettrans::Bandwidths default_bandwidths(const hettrans::Dataset& data,
                                               const hettrans::Kernel& k) {
  return {hettrans::select_h_y_cv(data, k),
          k.gaussian_equivalence() * hettrans::select_h_x_reference(data)};
}

inline hettrans::SmootherState design_state(std::size_t n, std::uint64_t seed) {
  auto data = design_sample(n, seed);
  const auto k = hettrans::Kernel::epanechnikov();
  const auto bw = default_bandwidths(data, k);
  return hettrans::SmootherState(std::move(data), k, bw);
}

// ŝ from the true model: h1 = ((A + B h(y)) / (A + B h(y1)))^(1/B) and the
// true conditional quantiles. The domain starts just above y0 and reaches past
// the largest possible response H(4) = 11.5.
inline hettrans::CandidateS analytic_candidate(double tau, double beta, double y1 = 2.0) {
  hettrans::CandidateS c;
  const double scale = oracle::kA + oracle::kB * oracle::h0(y1);
  c.h1 = [scale](double y) {
    return std::pow((oracle::kA + oracle::kB * oracle::h0(y)) / scale, 1.0 / oracle::kB);
  };
  c.domain = {0.69, 12.0};
  c.q_tau = [tau](double x) { return oracle::cond_quantile(tau, x); };
  c.q_beta = [beta](double x) { return oracle::cond_quantile(beta, x); };
  return c;
}

}  // namespace testing_support
