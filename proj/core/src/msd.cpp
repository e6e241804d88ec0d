#include "hettrans/msd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hettrans/errors.hpp"

namespace hettrans {
namespace {

// 𝔥_c(v) = sign(v) |v|^c
double signed_power(double v, double c) { return std::copysign(std::pow(std::abs(v), c), v); }

constexpr std::size_t kCheckPoints = 17;
constexpr std::size_t kCheckPowers = 9;

}  // namespace

void MsdConfig::validate() const {
  if (!(tau > 0.0 && tau < beta && beta < 1.0))
    throw Error(ErrorCode::InvalidArgument, "need 0 < tau < beta < 1");
  if (!(b_range.lo > 0.0 && b_range.lo < b_range.hi))
    throw Error(ErrorCode::InvalidArgument, "need 0 < B1 < B2");
  if (!(e_range.lo < e_range.hi)) throw Error(ErrorCode::InvalidArgument, "need e_a < e_b");
  if (!(m_x.lo < m_x.hi)) throw Error(ErrorCode::InvalidArgument, "region M_X is empty");
  if (quad_x < 2 || quad_e < 2)
    throw Error(ErrorCode::InvalidArgument, "need at least two quadrature nodes per axis");
}

double h_c_hat(const LambdaCurve& curve, double c, double y1, double y) {
  if (c == 0.0) return 1.0;
  return std::exp(-c * curve.integral_inverse(y1, y));
}

ResidualBasis residual_basis(const CandidateS& cand, const Dataset& data, const MsdConfig& cfg) {
  cfg.validate();
  if (data.dim() != 1)
    throw Error(ErrorCode::InvalidArgument, "the independence criterion needs a univariate regressor");
  const Interval dom = cand.domain;
  ResidualBasis basis;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data.x(i)[0];
    if (!cfg.m_x.contains(x)) continue;
    const double qt = cand.q_tau(x);
    const double qb = cand.q_beta(x);
    if (!(qt > dom.lo && qt < dom.hi && qb > dom.lo && qb < dom.hi))
      throw Error(ErrorCode::OutOfRange,
                  "conditional quantiles at x = " + std::to_string(x) + " leave the h1 domain");
    double y = data.y(i);
    if (y < dom.lo || y > dom.hi) {
      y = std::clamp(y, dom.lo, dom.hi);
      ++basis.clamped;
    }
    basis.x.push_back(x);
    basis.h_y.push_back(cand.h1(y));
    basis.h_tau.push_back(cand.h1(qt));
    basis.h_beta.push_back(cand.h1(qb));
  }
  if (basis.x.empty()) throw Error(ErrorCode::EmptyRegion, "no observation falls into M_X");
  return basis;
}

Residuals residuals(const ResidualBasis& basis, double c) {
  Residuals out;
  out.x = basis.x;
  out.e.resize(basis.x.size());
  out.clamped = basis.clamped;
  for (std::size_t i = 0; i < basis.x.size(); ++i) {
    const double lo = signed_power(basis.h_tau[i], c);
    const double den = signed_power(basis.h_beta[i], c) - lo;
    if (!(std::abs(den) >= 1e-10))
      throw Error(ErrorCode::DegenerateDenominator,
                  "quantile curves coincide at x = " + std::to_string(basis.x[i]));
    out.e[i] = (signed_power(basis.h_y[i], c) - lo) / den;
  }
  return out;
}

Residuals residuals(const CandidateS& cand, double c, const Dataset& data, const MsdConfig& cfg) {
  return residuals(residual_basis(cand, data, cfg), c);
}

GMatrix g_nmd(const Residuals& res, std::span<const double> x_grid, std::span<const double> e_grid) {
  const std::size_t n = res.x.size();
  if (n == 0) throw Error(ErrorCode::EmptyRegion, "no observation falls into M_X");
  if (!std::is_sorted(x_grid.begin(), x_grid.end()) || !std::is_sorted(e_grid.begin(), e_grid.end()))
    throw Error(ErrorCode::InvalidArgument, "G_nMD grids must be ascending");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return res.x[a] < res.x[b]; });

  // Column index of the first e-grid node >= e_i, i.e. e_i <= e_grid[l] iff l >= bin.
  std::vector<std::size_t> bin(n);
  std::vector<double> marginal_e(e_grid.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    bin[i] = static_cast<std::size_t>(std::lower_bound(e_grid.begin(), e_grid.end(), res.e[i]) -
                                      e_grid.begin());
    if (bin[i] < e_grid.size()) marginal_e[bin[i]] += 1.0;
  }
  const double nd = static_cast<double>(n);
  for (std::size_t l = 0; l < e_grid.size(); ++l) {
    if (l > 0) marginal_e[l] += marginal_e[l - 1];
  }
  for (auto& v : marginal_e) v /= nd;

  GMatrix g{x_grid.size(), e_grid.size(), std::vector<double>(x_grid.size() * e_grid.size(), 0.0)};
  std::vector<double> hist(e_grid.size(), 0.0);
  std::size_t taken = 0;
  for (std::size_t r = 0; r < x_grid.size(); ++r) {
    while (taken < n && res.x[order[taken]] <= x_grid[r]) {
      const std::size_t b = bin[order[taken]];
      if (b < e_grid.size()) hist[b] += 1.0;
      ++taken;
    }
    const double px = static_cast<double>(taken) / nd;
    double joint = 0.0;
    for (std::size_t l = 0; l < e_grid.size(); ++l) {
      joint += hist[l];
      g.values[r * g.cols + l] = joint / nd - px * marginal_e[l];
    }
  }
  return g;
}

double a_hat(const GMatrix& g, const MsdConfig& cfg) {
  if (g.rows != cfg.quad_x || g.cols != cfg.quad_e)
    throw Error(ErrorCode::InvalidArgument, "G_nMD grid does not match the quadrature resolution");
  const double dx = cfg.m_x.length() / static_cast<double>(cfg.quad_x - 1);
  const double de = cfg.e_range.length() / static_cast<double>(cfg.quad_e - 1);
  double acc = 0.0;
  for (std::size_t r = 0; r < g.rows; ++r) {
    const double wx = (r == 0 || r + 1 == g.rows) ? 0.5 * dx : dx;
    for (std::size_t c = 0; c < g.cols; ++c) {
      const double we = (c == 0 || c + 1 == g.cols) ? 0.5 * de : de;
      const double v = g(r, c);
      acc += wx * we * v * v;
    }
  }
  return std::sqrt(acc);
}

double a_hat(const Residuals& res, const MsdConfig& cfg) {
  const auto xs = linspace(cfg.m_x.lo, cfg.m_x.hi, cfg.quad_x);
  const auto es = linspace(cfg.e_range.lo, cfg.e_range.hi, cfg.quad_e);
  return a_hat(g_nmd(res, xs, es), cfg);
}

MsdFit estimate_b_msd(const CandidateS& cand, const Dataset& data, const MsdConfig& cfg) {
  const ResidualBasis basis = residual_basis(cand, data, cfg);
  const auto xs = linspace(cfg.m_x.lo, cfg.m_x.hi, cfg.quad_x);
  const auto es = linspace(cfg.e_range.lo, cfg.e_range.hi, cfg.quad_e);
  auto criterion = [&](double c) {
    try {
      return a_hat(g_nmd(residuals(basis, c), xs, es), cfg);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  constexpr std::size_t kScan = 64;
  MsdFit fit;
  fit.clamped = basis.clamped;
  fit.c_grid = linspace(cfg.b_range.lo, cfg.b_range.hi, kScan);
  fit.a_grid.resize(kScan);
  std::size_t best = kScan;
  for (std::size_t k = 0; k < kScan; ++k) {
    fit.a_grid[k] = criterion(fit.c_grid[k]);
    if (std::isnan(fit.a_grid[k])) continue;
    if (best == kScan || fit.a_grid[k] < fit.a_grid[best]) best = k;
  }
  if (best == kScan)
    throw Error(ErrorCode::AllDegenerate, "residuals could not be formed for any c in [B1, B2]");

  const double a = fit.c_grid[best == 0 ? 0 : best - 1];
  const double b = fit.c_grid[std::min(best + 1, kScan - 1)];
  auto objective = [&](double c) {
    const double v = criterion(c);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  const double refined = golden_section_minimize(objective, a, b, 1e-4);
  const double refined_value = objective(refined);
  if (refined_value < fit.a_grid[best]) {
    fit.b_hat = refined;
    fit.a_min = refined_value;
  } else {
    fit.b_hat = fit.c_grid[best];
    fit.a_min = fit.a_grid[best];
  }
  return fit;
}

CandidateS make_candidate(const SmootherState& state, const LambdaCurve& curve, double y0_hat,
                          double t_n, double y1, double tau, double beta) {
  const double z_a = y0_hat + t_n;
  const double z_b = quantile(std::vector<double>(state.data().ys().begin(), state.data().ys().end()), 0.99);
  if (!(z_a < z_b))
    throw Error(ErrorCode::CannotSatisfy, "no room above y0 + t_n for the h1 domain");
  LambdaCurve excluded = curve.with_excluded(y0_hat, t_n);
  CandidateS cand;
  cand.domain = {z_a, std::min(z_b, curve.hi())};
  cand.h1 = [excluded, y1](double y) { return h_c_hat(excluded, 1.0, y1, y); };
  cand.q_tau = [&state, tau](double x) { return state.cond_quantile(tau, std::span<const double>(&x, 1)); };
  cand.q_beta = [&state, beta](double x) { return state.cond_quantile(beta, std::span<const double>(&x, 1)); };
  return cand;
}

namespace {

// Per-point evaluation of M1 and M3 plus the envelope bounds on e.
struct PointCheck {
  bool density_ok = false;
  bool quantiles_ok = false;
  double e_lower = -std::numeric_limits<double>::infinity();  // M5: e must exceed
  double e_upper = std::numeric_limits<double>::infinity();   // M4: e must stay below
};

std::vector<PointCheck> check_points(const SmootherState& state, const CandidateS& cand,
                                     const Interval& b_range,
                                     const std::vector<double>& xs) {
  const auto cs = linspace(b_range.lo, b_range.hi, kCheckPowers);
  const double h_za = cand.h1(cand.domain.lo);
  const double h_zb = cand.h1(cand.domain.hi);
  std::vector<PointCheck> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    auto& pc = out[k];
    pc.density_ok = state.f_hat(std::span<const double>(&x, 1)) > kDensityFloor;
    double qt = 0.0;
    double qb = 0.0;
    try {
      qt = cand.q_tau(x);
      qb = cand.q_beta(x);
    } catch (const Error&) {
      continue;
    }
    const Interval& dom = cand.domain;
    pc.quantiles_ok = qt > dom.lo && qt < dom.hi && qb > dom.lo && qb < dom.hi;
    if (!pc.quantiles_ok) continue;
    const double ht = cand.h1(qt);
    const double hb = cand.h1(qb);
    for (double c : cs) {
      const double lo = signed_power(ht, c);
      const double span = signed_power(hb, c) - lo;
      if (!(span > 0.0)) {
        pc.e_lower = std::numeric_limits<double>::infinity();
        pc.e_upper = -std::numeric_limits<double>::infinity();
        break;
      }
      pc.e_lower = std::max(pc.e_lower, (signed_power(h_za, c) - lo) / span);
      pc.e_upper = std::min(pc.e_upper, (signed_power(h_zb, c) - lo) / span);
    }
  }
  return out;
}

}  // namespace

RegionChecks check_region(const SmootherState& state, const CandidateS& cand, const MsdConfig& cfg,
                          const WeightFunction& weight) {
  RegionChecks rc;
  const auto xs = linspace(cfg.m_x.lo, cfg.m_x.hi, kCheckPoints);
  const auto points = check_points(state, cand, cfg.b_range, xs);
  const Interval& sv = weight.support().front();
  rc.inside_support = cfg.m_x.lo >= sv.lo && cfg.m_x.hi <= sv.hi &&
                      std::all_of(points.begin(), points.end(), [](auto& p) { return p.density_ok; });
  rc.quantiles_inside =
      std::all_of(points.begin(), points.end(), [](auto& p) { return p.quantiles_ok; });
  rc.upper_envelope = rc.quantiles_inside && std::all_of(points.begin(), points.end(), [&](auto& p) {
                        return cfg.e_range.lo < p.e_upper && cfg.e_range.hi < p.e_upper;
                      });
  rc.lower_envelope = rc.quantiles_inside && std::all_of(points.begin(), points.end(), [&](auto& p) {
                        return cfg.e_range.lo > p.e_lower && cfg.e_range.hi > p.e_lower;
                      });
  return rc;
}

MsdConfig construct_m_x(const SmootherState& state, const CandidateS& cand, MsdConfig draft,
                        const WeightFunction& weight) {
  if (state.data().dim() != 1)
    throw Error(ErrorCode::InvalidArgument, "the independence criterion needs a univariate regressor");
  auto xcol = state.data().column(0);
  std::sort(xcol.begin(), xcol.end());
  const double data_range = xcol.back() - xcol.front();
  const Interval& sv = weight.support().front();
  Interval box{std::max(quantile_sorted(xcol, 0.1), sv.lo), std::min(quantile_sorted(xcol, 0.9), sv.hi)};
  const auto inside = std::count_if(xcol.begin(), xcol.end(), [&](double x) { return box.contains(x); });
  if (!(box.lo < box.hi) || inside < 2)
    throw Error(ErrorCode::CannotSatisfy, "initial region holds no data");

  const double step = 0.025 * box.length();
  const double min_width = 0.1 * data_range;
  const double c_mid = 0.5 * (draft.b_range.lo + draft.b_range.hi);
  const std::size_t half = kCheckPoints / 2;

  while (box.length() >= min_width) {
    const auto xs = linspace(box.lo, box.hi, kCheckPoints);
    const auto points = check_points(state, cand, draft.b_range, xs);
    bool fail_left = false;
    bool fail_right = false;
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (points[k].density_ok && points[k].quantiles_ok) continue;
      (k <= half ? fail_left : fail_right) = true;
    }
    if (!fail_left && !fail_right) {
      std::size_t arg_lower = 0;
      std::size_t arg_upper = 0;
      for (std::size_t k = 1; k < points.size(); ++k) {
        if (points[k].e_lower > points[arg_lower].e_lower) arg_lower = k;
        if (points[k].e_upper < points[arg_upper].e_upper) arg_upper = k;
      }
      const double feasible_lo = points[arg_lower].e_lower;
      const double feasible_hi = points[arg_upper].e_upper;
      MsdConfig cfg = draft;
      cfg.m_x = box;
      try {
        const Residuals res = residuals(cand, c_mid, state.data(), cfg);
        std::vector<double> e = res.e;
        std::sort(e.begin(), e.end());
        const double central_lo = quantile_sorted(e, 0.1);
        const double central_hi = quantile_sorted(e, 0.9);
        const double margin = 1e-3 * std::max(feasible_hi - feasible_lo, 0.0);
        cfg.e_range = {std::max(central_lo, feasible_lo + margin),
                       std::min(central_hi, feasible_hi - margin)};
        if (cfg.e_range.length() >= 0.25 * (central_hi - central_lo) &&
            check_region(state, cand, cfg, weight).all())
          return cfg;
      } catch (const Error&) {
        // Residuals not formable on this box; trim and retry.
      }
      fail_left = arg_lower <= half || arg_upper <= half;
      fail_right = arg_lower >= half || arg_upper >= half;
    }
    if (fail_left) box.lo += step;
    if (fail_right) box.hi -= step;
  }
  throw Error(ErrorCode::CannotSatisfy,
              "no sub-interval of the regressor range satisfies the region conditions");
}

}  // namespace hettrans
