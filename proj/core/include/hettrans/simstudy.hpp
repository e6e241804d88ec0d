#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hettrans/smoothers.hpp"

namespace hettrans::sim {

// The simulation design: X ~ U[0,1], ε ~ U[-1,1], h(Y) = g(X) + σ(X) ε with
// h^{-1}(u) = u^3/8 + 7u/8, g(x) = 1 + x, σ(x) = (1+x)^2 / 2 and weight
// v = 1_[0,1], which gives A = -1 and B = log 4.

inline constexpr double kA = -1.0;
double b_true();   ///< log 4
double y0_true();  ///< 1/(8 log(4)^3) + 7/(8 log 4)

double inverse_transform(double u);  ///< H(u) = u^3/8 + 7u/8
double transform(double y);          ///< h = H^{-1}, by a cubic root solve
double transform_prime(double y);    ///< h'(y) = 8 / (3 h(y)^2 + 7)
double regression(double x);         ///< g
double scale(double x);              ///< σ

/// Y = H(g(X) + σ(X) ε) for one draw of (X, ε).
double response(double x, double eps);

/// n independent draws from the design.
Dataset generate(std::size_t n, std::mt19937_64& rng);

/// λ(y) = -(A + B h(y)) / h'(y)
double true_lambda(double y);

/// (h(y) - h(y0_pin)) / (h(y1_pin) - h(y0_pin)); DegeneratePins if the pins coincide in h.
double true_transform_renorm(double y, double y0_pin, double y1_pin);

/// F^{-1}(τ | x) = H(g(x) + σ(x)(2τ - 1))
double true_quantile(double tau, double x);

/// F(y | x), clipped to [0, 1].
double true_cond_cdf(double y, double x);

// ------------------------------------------------------------ Monte Carlo --

struct SimConfig {
  std::size_t n = 500;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  double y1 = 2.0;
  double y2 = 0.2;
  double c_t = 0.25;
  std::size_t n_x = 100;
  std::optional<Bandwidths> bandwidths;  ///< empty: cross-validation + reference rule
  std::size_t grid_size = 256;
  std::size_t mise_points = 200;
  unsigned threads = 1;

  bool operator==(const SimConfig&) const = default;
};

/// Seed of replication `rep`: a SplitMix64 finaliser applied to seed and rep,
/// so a replication's data never depends on how many replications run.
std::uint64_t rep_seed(std::uint64_t seed, std::size_t rep);

struct RepResult {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string failure;
  double h_y = 0.0;
  double h_x = 0.0;
  double y0_hat = 0.0;
  double b_tilde = 0.0;
  double alpha2_hat = 0.0;
  double t_n = 0.0;
  double mise = 0.0;

  bool operator==(const RepResult&) const = default;
};

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  bool operator==(const Moments&) const = default;
};

struct SimReport {
  SimConfig config;
  std::vector<RepResult> reps;
  std::size_t succeeded = 0;
  std::map<std::string, std::size_t> failures;
  Moments y0_hat;
  Moments b_tilde;
  Moments alpha2_hat;
  Moments mise;
  /// (standard normal quantile, standardized sorted draw)
  std::vector<std::pair<double, double>> qq_y0;
  std::vector<std::pair<double, double>> qq_b_tilde;

  bool operator==(const SimReport&) const = default;
};

/// One replication of the estimation pipeline on its own data.
RepResult run_replication(const SimConfig& cfg, std::size_t rep);

/// Runs cfg.reps replications (in parallel on cfg.threads workers) and
/// aggregates them. Failed replications are recorded, never fatal.
SimReport mc_run(const SimConfig& cfg);

/// Standardizes and sorts `draws` and pairs them with normal quantiles at
/// (i - 0.5)/m.
std::vector<std::pair<double, double>> qq_pairs(std::vector<double> draws);

/// Pearson correlation of the QQ pairs.
double qq_correlation(const std::vector<std::pair<double, double>>& pairs);

}  // namespace hettrans::sim
