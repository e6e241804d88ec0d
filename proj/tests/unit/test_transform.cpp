#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hettrans/anchors.hpp"
#include "hettrans/errors.hpp"
#include "hettrans/numerics.hpp"
#include "hettrans/transform.hpp"
#include "oracle.hpp"

using namespace hettrans;

namespace {

LambdaCurve analytic_curve(std::size_t n = 2001) {
  auto grid = linspace(0.1, 3.0, n);
  std::vector<double> vals;
  for (double y : grid) vals.push_back(oracle::lambda(y));
  return LambdaCurve(grid, vals, 0.01);
}

ComponentEstimates exact_components(const LambdaCurve& c, double t) {
  ComponentEstimates comp;
  comp.y0_hat = oracle::y0();
  comp.b_tilde = oracle::kB;
  comp.t_n = t;
  comp.alpha2_hat = oracle::h_renorm(0.2, comp.y0_hat, 2.0);
  return comp;
}

double below(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
double above(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

}  // namespace

TEST_CASE("pinning and branch joints") {
  const auto c = analytic_curve();
  const auto comp = exact_components(c, 0.05);
  const auto t = build_transform(c, comp, BChoice::tilde(), 2.0, 0.2);
  const double y0 = comp.y0_hat, tn = comp.t_n;

  CHECK(t(2.0) == 1.0);
  CHECK(t(y0) == 0.0);
  CHECK(t(below(y0)) < 0.0);
  CHECK(t(above(y0)) > 0.0);
  CHECK(std::abs(t(below(y0))) < 1e-9);
  CHECK(std::abs(t(above(y0))) < 1e-9);
  CHECK(std::abs(t(y0 + tn) - t(below(y0 + tn))) < 1e-9);
  CHECK(std::abs(t(y0 - tn) - t(above(y0 - tn))) < 1e-9);

  // Ramps are straight lines from 0 to the branch edges.
  CHECK(t(y0 + 0.5 * tn) == doctest::Approx(0.5 * t(y0 + tn)).epsilon(1e-12));
  CHECK(t(y0 - 0.5 * tn) == doctest::Approx(0.5 * t(y0 - tn)).epsilon(1e-12));
  CHECK(t(0.2) == doctest::Approx(comp.alpha2_hat).epsilon(1e-14));
  CHECK(t.alpha2() < 0.0);
}

TEST_CASE("analytic lambda reproduces the renormalised truth") {
  const auto c = analytic_curve();
  const auto t = build_transform(c, exact_components(c, 0.01), BChoice::tilde(), 2.0, 0.2);
  CHECK(std::abs(t(1.0) - 0.300955) < 1e-3);
  for (double y : {0.8, 1.3, 2.5, 2.9})
    CHECK(std::abs(t(y) - oracle::h_renorm(y, oracle::y0(), 2.0)) < 1e-3);
  // The lower branch follows the same identified h.
  for (double y : {0.2, 0.4, 0.6})
    CHECK(std::abs(t(y) - oracle::h_renorm(y, oracle::y0(), 2.0)) < 1e-3);
}

TEST_CASE("monotone upper branch and b-consistency") {
  const auto c = analytic_curve(401);
  const auto comp = exact_components(c, 0.05);
  const auto t = build_transform(c, comp, BChoice::tilde(), 2.0, 0.2);
  double prev = -INFINITY;
  for (double y : linspace(comp.y0_hat + comp.t_n, 3.0, 500)) {
    CHECK(t(y) >= prev);
    prev = t(y);
  }
  const double b2 = 0.9;
  const auto t2 = build_transform(c, comp, BChoice::hat(b2), 2.0, 0.2);
  CHECK(t2.b() == b2);
  CHECK(t2.alpha2() == doctest::Approx(estimate_alpha2(c, comp.y0_hat, b2, 2.0, 0.2, comp.t_n)));
  for (double y : linspace(comp.y0_hat + comp.t_n, 3.0, 50))
    CHECK(t2(y) == doctest::Approx(std::pow(t(y), b2 / comp.b_tilde)).epsilon(1e-12));
}

TEST_CASE("cached integrals agree with direct integration") {
  const auto c = analytic_curve(301);
  const auto comp = exact_components(c, 0.05);
  const auto t = build_transform(c, comp, BChoice::tilde(), 2.0, 0.2);
  for (double y : {comp.y0_hat + comp.t_n, 1.0, 1.77, 2.0, 2.6})
    CHECK(t.upper_integral(y) == doctest::Approx(c.integral_inverse(2.0, y)).epsilon(1e-10));
  for (double y : {0.1, 0.2, 0.45, comp.y0_hat - comp.t_n})
    CHECK(t.lower_integral(y) == doctest::Approx(c.integral_inverse(0.2, y)).epsilon(1e-10));
}

TEST_CASE("anchor and range errors") {
  const auto c = analytic_curve(201);
  auto comp = exact_components(c, 0.05);
  auto code_of = [](auto&& call) {
    try {
      call();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([&] { build_transform(c, comp, BChoice::tilde(), 0.7, 0.2); }) == ErrorCode::BadAnchors);
  CHECK(code_of([&] { build_transform(c, comp, BChoice::tilde(), 2.0, 0.65); }) == ErrorCode::BadAnchors);
  CHECK(code_of([&] { build_transform(c, comp, BChoice::tilde(), 3.5, 0.2); }) == ErrorCode::OutOfRange);
  const auto t = build_transform(c, comp, BChoice::tilde(), 2.0, 0.2);
  CHECK(code_of([&] { t(3.1); }) == ErrorCode::OutOfRange);
  comp.t_n = 0.0;
  CHECK(code_of([&] { build_transform(c, comp, BChoice::tilde(), 2.0, 0.2); }) == ErrorCode::BadAnchors);
}

TEST_CASE("integrated squared error") {
  const auto c = analytic_curve(401);
  const auto comp = exact_components(c, 0.05);
  const auto t = build_transform(c, comp, BChoice::tilde(), 2.0, 0.2);
  const double lo = comp.y0_hat + comp.t_n;
  CHECK(mise(t, [&](double y) { return t(y); }, lo, 2.8, 200) == 0.0);
  const double delta = 0.3;
  CHECK(mise(t, [&](double y) { return t(y) + delta; }, lo, 2.8, 200) ==
        doctest::Approx(delta * delta * (2.8 - lo)).epsilon(1e-12));
  CHECK_THROWS_AS(mise(t, [](double) { return 0.0; }, lo - 0.01, 2.8, 200), Error);
  CHECK_THROWS_AS(mise(t, [](double) { return 0.0; }, lo, 2.8, 1), Error);
}
