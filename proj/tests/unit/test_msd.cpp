#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "design.hpp"
#include "hettrans/errors.hpp"
#include "hettrans/fit.hpp"
#include "hettrans/msd.hpp"
#include "hettrans/numerics.hpp"
#include "hettrans/simstudy.hpp"
#include "oracle.hpp"

using namespace hettrans;

namespace {

ErrorCode code_of(auto&& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

// Brute-force G_nMD at one point.
double g_direct(const Residuals& r, double x, double e) {
  const double n = static_cast<double>(r.x.size());
  double joint = 0, px = 0, pe = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    joint += (r.x[i] <= x && r.e[i] <= e);
    px += (r.x[i] <= x);
    pe += (r.e[i] <= e);
  }
  return joint / n - (px / n) * (pe / n);
}

// Draws with known errors, keeping only responses inside the analytic h1 domain.
struct Draws {
  Dataset data;
  std::vector<double> eps;
};

Draws draws_in_domain(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ue(-1.0, 1.0);
  std::vector<double> y, x, eps;
  while (y.size() < n) {
    const double xi = ux(rng), ei = ue(rng);
    const double yi = oracle::H(oracle::g(xi) + oracle::sigma(xi) * ei);
    if (yi <= 0.69) continue;
    y.push_back(yi);
    x.push_back(xi);
    eps.push_back(ei);
  }
  return {Dataset::univariate(y, x), eps};
}

}  // namespace

TEST_CASE("config validation") {
  MsdConfig c;
  CHECK_NOTHROW(c.validate());
  c.tau = 0.8;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.b_range = {0.0, 1.0};
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.b_range = {2.0, 1.0};
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.quad_e = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.m_x = {0.5, 0.5};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("candidate transformation from lambda") {
  auto grid = linspace(0.75, 3.0, 2001);
  std::vector<double> vals;
  for (double y : grid) vals.push_back(oracle::lambda(y));
  const LambdaCurve c(grid, vals, 0.01);
  for (double cc : {0.3, 1.0, 2.5}) CHECK(h_c_hat(c, cc, 2.0, 2.0) == 1.0);
  for (double y : {0.8, 1.7, 2.9}) CHECK(h_c_hat(c, 0.0, 2.0, y) == 1.0);

  const double h_id = oracle::h_renorm(1.0, oracle::y0(), 2.0);
  CHECK(h_id == doctest::Approx(0.300955).epsilon(1e-5));
  CHECK(oracle::h0(2.0) == doctest::Approx(1.64722).epsilon(1e-5));
  CHECK(h_c_hat(c, 1.0, 2.0, 1.0) == doctest::Approx(0.420526).epsilon(1e-4));
  CHECK(h_c_hat(c, 1.0, 2.0, 1.0) == doctest::Approx(std::pow(h_id, 1.0 / oracle::kB)).epsilon(1e-4));
}

TEST_CASE("residuals") {
  const auto cand = testing_support::analytic_candidate(0.25, 0.75);
  MsdConfig cfg;

  std::vector<double> x{0.1, 0.4, 0.9}, y;
  for (double xi : x) y.push_back(cand.q_tau(xi));
  CHECK(residuals(cand, 1.3, Dataset::univariate(y, x), cfg).e ==
        std::vector<double>{0.0, 0.0, 0.0});
  y.clear();
  for (double xi : x) y.push_back(cand.q_beta(xi));
  for (double e : residuals(cand, 0.7, Dataset::univariate(y, x), cfg).e)
    CHECK(e == doctest::Approx(1.0).epsilon(1e-12));

  const auto d = draws_in_domain(300, 5);
  const auto r = residuals(cand, oracle::kB, d.data, cfg);
  REQUIRE(r.e.size() == 300);
  CHECK(r.clamped == 0);
  for (std::size_t i = 0; i < r.e.size(); ++i) CHECK(r.e[i] == doctest::Approx(d.eps[i] + 0.5).epsilon(1e-8));

  // Scaling ĥ1 by k > 0 scales all three terms by k^c.
  auto scaled = cand;
  scaled.h1 = [h = cand.h1](double v) { return 3.7 * h(v); };
  for (double c : {0.5, 1.0, 2.2}) {
    const auto a = residuals(cand, c, d.data, cfg);
    const auto b = residuals(scaled, c, d.data, cfg);
    for (std::size_t i = 0; i < a.e.size(); ++i) CHECK(b.e[i] == doctest::Approx(a.e[i]).epsilon(1e-10));
  }
}

TEST_CASE("residual errors and bookkeeping") {
  const auto cand = testing_support::analytic_candidate(0.25, 0.75);
  MsdConfig cfg;
  const auto d = Dataset::univariate({0.5, 1.0, 20.0}, {0.2, 0.3, 0.4});
  CHECK(residuals(cand, 1.0, d, cfg).clamped == 2);

  cfg.m_x = {0.6, 1.0};
  CHECK(code_of([&] { residuals(cand, 1.0, d, cfg); }) == ErrorCode::EmptyRegion);

  auto flat = cand;
  flat.q_beta = flat.q_tau;
  CHECK(code_of([&] { residuals(flat, 1.0, d, MsdConfig{}); }) == ErrorCode::DegenerateDenominator);

  auto narrow = cand;
  narrow.domain = {0.69, 1.5};
  CHECK(code_of([&] { residuals(narrow, 1.0, d, MsdConfig{}); }) == ErrorCode::OutOfRange);

  const Dataset two_d({1.0, 2.0}, {0.1, 0.2, 0.3, 0.4}, 2);
  CHECK(code_of([&] { residuals(cand, 1.0, two_d, MsdConfig{}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { estimate_b_msd(cand, two_d, MsdConfig{}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("independence functional") {
  const Residuals two{{0.2, 0.8}, {0.1, 0.9}, 0};
  const std::vector<double> xq{0.5}, eq{0.5};
  CHECK(g_nmd(two, xq, eq)(0, 0) == doctest::Approx(0.25));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Residuals r;
  for (int i = 0; i < 400; ++i) {
    r.x.push_back(u(rng));
    r.e.push_back(u(rng) + 0.3 * r.x.back());
  }
  const auto xs = linspace(-0.1, 1.1, 25);
  const auto es = linspace(-0.2, 1.6, 31);
  const auto g = g_nmd(r, xs, es);
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = 0; b < es.size(); ++b) {
      CHECK(g(a, b) == doctest::Approx(g_direct(r, xs[a], es[b])).epsilon(1e-12));
      CHECK(std::abs(g(a, b)) <= 1.0);
    }
  // Rows and columns beyond the data vanish exactly.
  for (std::size_t b = 0; b < es.size(); ++b) {
    CHECK(g(0, b) == 0.0);
    CHECK(g(xs.size() - 1, b) == 0.0);
  }
  for (std::size_t a = 0; a < xs.size(); ++a) {
    CHECK(g(a, 0) == 0.0);
    CHECK(g(a, es.size() - 1) == 0.0);
  }
  CHECK(code_of([&] { g_nmd(Residuals{}, xs, es); }) == ErrorCode::EmptyRegion);
  const std::vector<double> unsorted{0.5, 0.1};
  CHECK(code_of([&] { g_nmd(r, unsorted, es); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("criterion norm") {
  MsdConfig cfg;
  cfg.quad_x = 8;
  cfg.quad_e = 6;
  cfg.m_x = {0.0, 1.0};
  cfg.e_range = {0.0, 0.5};
  GMatrix zero{8, 6, std::vector<double>(48, 0.0)};
  CHECK(a_hat(zero, cfg) == 0.0);
  GMatrix quarter{8, 6, std::vector<double>(48, 0.25)};
  CHECK(a_hat(quarter, cfg) == doctest::Approx(0.176777).epsilon(1e-6));
  GMatrix mixed{8, 6, {}};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 48; ++i) mixed.values.push_back(u(rng));
  GMatrix flipped = mixed;
  for (auto& v : flipped.values) v = -v;
  CHECK(a_hat(mixed, cfg) == a_hat(flipped, cfg));
  CHECK(a_hat(mixed, cfg) > 0.0);
  GMatrix wrong{7, 6, std::vector<double>(42, 0.0)};
  CHECK_THROWS_AS(a_hat(wrong, cfg), Error);
}

TEST_CASE("minimiser tie-break and certificate") {
  // Responses sit exactly on a quantile curve, so every residual is 0 or 1
  // whatever c is and the criterion is flat.
  const auto cand = testing_support::analytic_candidate(0.25, 0.75);
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    const double xi = (i + 0.5) / 40.0;
    x.push_back(xi);
    y.push_back(i % 2 ? cand.q_tau(xi) : cand.q_beta(xi));
  }
  MsdConfig cfg;
  cfg.b_range = {0.5, 2.5};
  cfg.e_range = {-0.5, 1.5};
  const auto fit = estimate_b_msd(cand, Dataset::univariate(y, x), cfg);
  CHECK(fit.b_hat == 0.5);
  CHECK(fit.c_grid.size() == 64);

  auto broken = cand;
  broken.q_beta = broken.q_tau;
  CHECK(code_of([&] { estimate_b_msd(broken, Dataset::univariate(y, x), cfg); }) == ErrorCode::AllDegenerate);
}

TEST_CASE("estimated candidate at n = 2000") {
  const auto data = testing_support::design_sample(2000, 51);
  FitOptions opts;
  opts.b_method = BMethod::Msd;
  opts.weight = WeightFunction({{0.0, 1.0}});
  opts.variances = false;
  const auto res = fit(data, opts);
  REQUIRE(res.msd.has_value());
  REQUIRE(res.msd_config.has_value());
  for (double a : res.msd->a_grid)
    if (!std::isnan(a)) CHECK(res.msd->a_min <= a);
  CHECK(res.msd->b_hat >= opts.msd.b_range.lo);
  CHECK(res.msd->b_hat <= opts.msd.b_range.hi);
  CHECK(res.transform.b() == res.msd->b_hat);

  const auto& box = res.msd_config->m_x;
  CHECK(box.lo >= 0.0);
  CHECK(box.hi <= 1.0);
  // Recompute the checks on the returned region.
  const SmootherState state(data, opts.kernel, res.bandwidths);
  const auto cand = make_candidate(state, res.lambda, res.components.y0_hat, res.components.t_n,
                                   opts.y1, opts.msd.tau, opts.msd.beta);
  CHECK(check_region(state, cand, *res.msd_config, res.weight).all());
}

TEST_CASE("region construction") {
  const auto data = testing_support::design_sample(2000, 52);
  const SmootherState state(data, Kernel::epanechnikov(), {0.15, 0.13});
  const WeightFunction w({{0.0, 1.0}});
  const auto cand = testing_support::analytic_candidate(0.25, 0.75);
  const auto cfg = construct_m_x(state, cand, MsdConfig{}, w);
  auto xs = data.column(0);
  std::sort(xs.begin(), xs.end());
  CHECK(cfg.m_x.lo == quantile_sorted(xs, 0.1));
  CHECK(cfg.m_x.hi == quantile_sorted(xs, 0.9));
  CHECK(check_region(state, cand, cfg, w).all());
  CHECK(cfg.e_range.lo < cfg.e_range.hi);

  CHECK(code_of([&] { construct_m_x(state, cand, MsdConfig{}, WeightFunction({{5.0, 6.0}})); }) ==
        ErrorCode::CannotSatisfy);
}

TEST_CASE("population criterion is smallest at the true power") {
  // With the true ŝ and a large sample Â(c) approaches ||G_MD(c)||, which
  // vanishes only at c = B.
  const auto d = testing_support::design_sample(1000000, 53);
  const auto cand = testing_support::analytic_candidate(0.25, 0.75);
  MsdConfig cfg;
  cfg.m_x = {0.0, 1.0};
  cfg.e_range = {0.0, 1.45};
  const auto basis = residual_basis(cand, d, cfg);
  auto crit = [&](double c) { return a_hat(residuals(basis, c), cfg); };
  const double at_b = crit(oracle::kB);
  CHECK(at_b < crit(0.6));
  CHECK(at_b < crit(0.9));
  CHECK(at_b < crit(2.0));
  CHECK(at_b < crit(3.0));
}
