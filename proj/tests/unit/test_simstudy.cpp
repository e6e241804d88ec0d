#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "hettrans/errors.hpp"
#include "hettrans/numerics.hpp"
#include "hettrans/simstudy.hpp"
#include "oracle.hpp"

using namespace hettrans;

TEST_CASE("design constants") {
  CHECK(sim::b_true() == doctest::Approx(1.386294).epsilon(1e-6));
  const double l4 = std::log(4.0);
  CHECK(sim::y0_true() == doctest::Approx(1.0 / (8.0 * l4 * l4 * l4) + 7.0 / (8.0 * l4)).epsilon(1e-15));
  CHECK(std::abs(sim::y0_true() - 0.678090) < 1e-5);
  // A and B as integrals of the design functions over the weight support.
  auto a_integrand = [](double x) { return (oracle::sigma(x) - oracle::g(x) * (1.0 + x)) / oracle::sigma(x); };
  auto b_integrand = [](double x) { return (1.0 + x) / oracle::sigma(x); };
  CHECK(oracle::simpson(a_integrand, 0.0, 1.0, 1000) == doctest::Approx(sim::kA).epsilon(1e-10));
  CHECK(oracle::simpson(b_integrand, 0.0, 1.0, 1000) == doctest::Approx(sim::b_true()).epsilon(1e-10));
}

TEST_CASE("response map") {
  CHECK(sim::response(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sim::response(1.0, 0.0) == doctest::Approx(2.75).epsilon(1e-15));
  CHECK(sim::response(0.5, 1.0) == doctest::Approx(4.55786).epsilon(1e-6));
}

TEST_CASE("inverse transformation") {
  for (double y : linspace(-5.0, 12.0, 341)) {
    CHECK(sim::transform(y) == doctest::Approx(oracle::h0(y)).epsilon(1e-13));
    CHECK(sim::inverse_transform(sim::transform(y)) == doctest::Approx(y).epsilon(1e-13));
    auto h = [](double v) { return sim::transform(v); };
    CHECK(std::abs(sim::transform_prime(y) - oracle::central_difference(h, y, 1e-6)) < 1e-7);
  }
  CHECK(sim::transform(1.5) == doctest::Approx(1.357172).epsilon(1e-6));
  CHECK(sim::transform(2.0) == doctest::Approx(1.64722).epsilon(1e-5));
}

TEST_CASE("true lambda") {
  CHECK(std::abs(sim::true_lambda(sim::y0_true())) < 1e-14);
  CHECK(std::abs(sim::true_lambda(0.678090)) < 1e-4);
  CHECK(sim::true_lambda(1.0) == doctest::Approx(-0.482868).epsilon(1e-6));
  CHECK(sim::true_lambda(1.0) == doctest::Approx((1.0 - std::log(4.0)) / 0.8).epsilon(1e-12));
  CHECK(sim::true_lambda(1.5) == doctest::Approx(oracle::lambda(1.5)).epsilon(1e-10));
  for (double y : linspace(0.0, 5.0, 51)) CHECK(sim::true_lambda(y) == doctest::Approx(oracle::lambda(y)).epsilon(1e-10));
}

TEST_CASE("renormalised truth") {
  CHECK(sim::true_transform_renorm(2.0, 0.678090, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sim::true_transform_renorm(0.678090, 0.678090, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sim::true_transform_renorm(1.0, 0.678090, 2.0) == doctest::Approx(0.300955).epsilon(1e-5));
  CHECK_THROWS_AS(sim::true_transform_renorm(1.0, 2.0, 2.0), Error);
}

TEST_CASE("true conditional law") {
  CHECK(sim::true_quantile(0.5, 0.5) == doctest::Approx(1.734375).epsilon(1e-12));
  CHECK(sim::true_quantile(0.25, 0.5) == doctest::Approx(0.923310).epsilon(1e-6));
  CHECK(sim::true_quantile(1.0 - 1e-12, 0.0) == doctest::Approx(1.734375).epsilon(1e-9));
  for (double x : {0.0, 0.3, 1.0})
    for (double tau : {0.1, 0.5, 0.9}) {
      CHECK(sim::true_quantile(tau, x) == doctest::Approx(oracle::cond_quantile(tau, x)).epsilon(1e-13));
      CHECK(sim::true_cond_cdf(sim::true_quantile(tau, x), x) == doctest::Approx(tau).epsilon(1e-10));
    }
  CHECK(sim::true_cond_cdf(-3.0, 0.5) == 0.0);
  CHECK(sim::true_cond_cdf(20.0, 0.5) == 1.0);
}

TEST_CASE("generated sample moments") {
  std::mt19937_64 rng(77);
  const std::size_t n = 20000;
  const auto d = sim::generate(n, rng);
  std::vector<double> x = d.column(0), eps(n);
  for (std::size_t i = 0; i < n; ++i)
    eps[i] = (oracle::h0(d.y(i)) - oracle::g(x[i])) / oracle::sigma(x[i]);
  const double se_mean = std::sqrt(1.0 / 12.0 / static_cast<double>(n));
  CHECK(std::abs(mean(x) - 0.5) < 3.0 * se_mean);
  const double var = sample_sd(eps) * sample_sd(eps);
  const double se_var = std::sqrt((0.2 - 1.0 / 9.0) / static_cast<double>(n));
  CHECK(std::abs(var - 1.0 / 3.0) < 3.0 * se_var);
  for (double e : eps) CHECK(std::abs(e) <= 1.0 + 1e-9);
}

TEST_CASE("seed splitting") {
  std::set<std::uint64_t> seen;
  for (std::size_t r = 0; r < 1000; ++r) seen.insert(sim::rep_seed(7, r));
  CHECK(seen.size() == 1000);
  CHECK(sim::rep_seed(7, 3) == sim::rep_seed(7, 3));
  CHECK(sim::rep_seed(7, 3) != sim::rep_seed(8, 3));
}

TEST_CASE("monte carlo driver") {
  sim::SimConfig cfg;
  cfg.n = 200;
  cfg.reps = 3;
  cfg.seed = 11;
  const auto a = sim::mc_run(cfg);
  const auto b = sim::mc_run(cfg);
  CHECK(a == b);
  REQUIRE(a.reps.size() == 3);

  cfg.threads = 2;
  const auto threaded = sim::mc_run(cfg);
  CHECK(threaded.reps == a.reps);
  CHECK(threaded.y0_hat == a.y0_hat);

  cfg.threads = 1;
  cfg.reps = 5;
  const auto longer = sim::mc_run(cfg);
  for (std::size_t r = 0; r < 3; ++r) CHECK(longer.reps[r] == a.reps[r]);

  cfg.reps = 1;
  const auto one = sim::mc_run(cfg);
  REQUIRE(one.reps.front().ok);
  CHECK(one.y0_hat.mean == one.reps.front().y0_hat);
  CHECK(one.b_tilde.mean == one.reps.front().b_tilde);
  CHECK(one.mise.mean == one.reps.front().mise);
  CHECK(one.reps.front() == sim::run_replication(cfg, 0));

  std::size_t failed = 0;
  for (const auto& r : longer.reps) failed += !r.ok;
  std::size_t counted = 0;
  for (const auto& [why, k] : longer.failures) counted += k;
  CHECK(counted == failed);
  CHECK(longer.succeeded + failed == 5);
}

TEST_CASE("failed replications are recorded") {
  sim::SimConfig cfg;
  cfg.n = 100;
  cfg.reps = 2;
  cfg.y1 = 0.6;
  cfg.y2 = 0.2;
  const auto rep = sim::mc_run(cfg);
  CHECK(rep.succeeded == 0);
  CHECK(rep.failures.size() == 1);
  CHECK(rep.failures.begin()->second == 2);
  CHECK(rep.qq_y0.empty());

  cfg.n = 49;
  CHECK_THROWS_AS(sim::mc_run(cfg), Error);
  cfg.n = 100;
  cfg.reps = 0;
  CHECK_THROWS_AS(sim::mc_run(cfg), Error);
}

TEST_CASE("normal QQ data") {
  const auto pairs = sim::qq_pairs({3.0, 1.0, 2.0, 5.0});
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[0].first == doctest::Approx(-pairs[3].first));
  CHECK(pairs[0].first == doctest::Approx(-1.150349).epsilon(1e-6));
  CHECK(pairs[0].second < pairs[1].second);
  double s = 0;
  for (const auto& p : pairs) s += p.second;
  CHECK(std::abs(s) < 1e-12);

  std::vector<double> ideal;
  for (const auto& p : sim::qq_pairs(std::vector<double>(50, 0.0))) ideal.push_back(p.first);
  CHECK(sim::qq_correlation(sim::qq_pairs(ideal)) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(2);
  std::exponential_distribution<double> ex;
  std::vector<double> skewed(200);
  for (auto& v : skewed) v = std::pow(ex(rng), 3.0);
  CHECK(sim::qq_correlation(sim::qq_pairs(skewed)) < 0.9);
  CHECK_THROWS_AS(sim::qq_pairs({1.0}), Error);
}
