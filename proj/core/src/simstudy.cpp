#include "hettrans/simstudy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "hettrans/errors.hpp"
#include "hettrans/fit.hpp"

namespace hettrans::sim {

double b_true() { return std::log(4.0); }

double y0_true() { return inverse_transform(1.0 / b_true()); }

double inverse_transform(double u) { return u * u * u / 8.0 + 7.0 * u / 8.0; }

double transform(double y) {
  // u^3 + 7u - 8y = 0 has exactly one real root; Cardano then one Newton step.
  const double q = -8.0 * y;
  const double disc = std::sqrt(q * q / 4.0 + 343.0 / 27.0);
  double u = std::cbrt(-q / 2.0 + disc) + std::cbrt(-q / 2.0 - disc);
  u -= (u * u * u + 7.0 * u + q) / (3.0 * u * u + 7.0);
  return u;
}

double transform_prime(double y) {
  const double u = transform(y);
  return 8.0 / (3.0 * u * u + 7.0);
}

double regression(double x) { return 1.0 + x; }

double scale(double x) { return (1.0 + x) * (1.0 + x) / 2.0; }

double response(double x, double eps) { return inverse_transform(regression(x) + scale(x) * eps); }

Dataset generate(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> ue(-1.0, 1.0);
  std::vector<double> y(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ux(rng);
    y[i] = response(x[i], ue(rng));
  }
  return Dataset::univariate(std::move(y), std::move(x));
}

double true_lambda(double y) { return -(kA + b_true() * transform(y)) / transform_prime(y); }

double true_transform_renorm(double y, double y0_pin, double y1_pin) {
  const double h0 = transform(y0_pin);
  const double den = transform(y1_pin) - h0;
  if (den == 0.0) throw Error(ErrorCode::DegeneratePins, "pins coincide under h");
  return (transform(y) - h0) / den;
}

double true_quantile(double tau, double x) {
  return inverse_transform(regression(x) + scale(x) * (2.0 * tau - 1.0));
}

double true_cond_cdf(double y, double x) {
  const double eps = (transform(y) - regression(x)) / scale(x);
  return std::clamp((eps + 1.0) / 2.0, 0.0, 1.0);
}

std::uint64_t rep_seed(std::uint64_t seed, std::size_t rep) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) + (static_cast<std::uint64_t>(rep) + 1) * 0x9e3779b97f4a7c15ULL);
}

namespace {

void validate(const SimConfig& cfg) {
  if (cfg.n < 50) throw Error(ErrorCode::InvalidArgument, "simulation needs n >= 50");
  if (cfg.reps < 1) throw Error(ErrorCode::InvalidArgument, "simulation needs reps >= 1");
}

RepResult replicate(const SimConfig& cfg, std::size_t rep, unsigned threads) {
  RepResult r;
  r.rep = rep;
  r.seed = rep_seed(cfg.seed, rep);
  try {
    std::mt19937_64 rng(r.seed);
    const Dataset data = generate(cfg.n, rng);
    FitOptions opts;
    opts.bandwidths = cfg.bandwidths;
    opts.weight = WeightFunction({Interval{0.0, 1.0}});
    opts.lambda.n_x = cfg.n_x;
    opts.lambda.grid_size = cfg.grid_size;
    opts.lambda.threads = threads;
    opts.c_t = cfg.c_t;
    opts.y1 = cfg.y1;
    opts.y2 = cfg.y2;
    opts.variances = false;
    const FitResult f = fit(data, opts);
    r.h_y = f.bandwidths.h_y;
    r.h_x = f.bandwidths.h_x;
    r.y0_hat = f.components.y0_hat;
    r.b_tilde = f.components.b_tilde;
    r.alpha2_hat = f.components.alpha2_hat;
    r.t_n = f.components.t_n;
    const double lo = r.y0_hat + r.t_n;
    const double hi = std::min(quantile(std::vector<double>(data.ys().begin(), data.ys().end()), 0.99),
                               f.transform.hi());
    const double y0 = r.y0_hat;
    const double y1 = cfg.y1;
    r.mise = mise(f.transform, [y0, y1](double y) { return true_transform_renorm(y, y0, y1); }, lo,
                  hi, cfg.mise_points);
    r.ok = true;
  } catch (const Error& e) {
    r.failure = to_string(e.code());
  }
  return r;
}

Moments moments(const std::vector<double>& v) {
  if (v.empty()) return {};
  return {mean(v), sample_sd(v)};
}

}  // namespace

RepResult run_replication(const SimConfig& cfg, std::size_t rep) {
  validate(cfg);
  return replicate(cfg, rep, cfg.threads);
}

SimReport mc_run(const SimConfig& cfg) {
  validate(cfg);
  SimReport report;
  report.config = cfg;
  report.reps.resize(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t k) { report.reps[k] = replicate(cfg, k, 1); });

  std::vector<double> y0, bt, a2, ms;
  for (const auto& r : report.reps) {
    if (!r.ok) {
      ++report.failures[r.failure];
      continue;
    }
    ++report.succeeded;
    y0.push_back(r.y0_hat);
    bt.push_back(r.b_tilde);
    a2.push_back(r.alpha2_hat);
    ms.push_back(r.mise);
  }
  report.y0_hat = moments(y0);
  report.b_tilde = moments(bt);
  report.alpha2_hat = moments(a2);
  report.mise = moments(ms);
  if (y0.size() >= 2) {
    report.qq_y0 = qq_pairs(y0);
    report.qq_b_tilde = qq_pairs(bt);
  }
  return report;
}

std::vector<std::pair<double, double>> qq_pairs(std::vector<double> draws) {
  const std::size_t m = draws.size();
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "QQ pairs need at least two draws");
  const double mu = mean(draws);
  const double sd = sample_sd(draws);
  std::sort(draws.begin(), draws.end());
  const boost::math::normal_distribution<double> normal;
  std::vector<std::pair<double, double>> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    out[i] = {boost::math::quantile(normal, p), sd > 0.0 ? (draws[i] - mu) / sd : 0.0};
  }
  return out;
}

double qq_correlation(const std::vector<std::pair<double, double>>& pairs) {
  const double m = static_cast<double>(pairs.size());
  double sa = 0, sb = 0;
  for (const auto& [a, b] : pairs) {
    sa += a;
    sb += b;
  }
  const double ma = sa / m, mb = sb / m;
  double cab = 0, caa = 0, cbb = 0;
  for (const auto& [a, b] : pairs) {
    cab += (a - ma) * (b - mb);
    caa += (a - ma) * (a - ma);
    cbb += (b - mb) * (b - mb);
  }
  if (caa == 0.0 || cbb == 0.0) return 0.0;
  return cab / std::sqrt(caa * cbb);
}

}  // namespace hettrans::sim
