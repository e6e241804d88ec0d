#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hettrans/lambda_curve.hpp"
#include "hettrans/numerics.hpp"
#include "hettrans/smoothers.hpp"

namespace hettrans {

/// Settings of the independence criterion. Only univariate regressors are
/// supported, so the region M_X is a single interval.
struct MsdConfig {
  double tau = 0.25;
  double beta = 0.75;
  Interval b_range{0.25, 4.0};
  Interval e_range{0.0, 1.0};
  Interval m_x{0.0, 1.0};
  std::size_t quad_x = 64;
  std::size_t quad_e = 64;

  /// Throws InvalidArgument unless 0 < tau < beta < 1, 0 < B1 < B2 and both
  /// intervals are proper with at least two quadrature nodes each.
  void validate() const;
};

/// ŝ = (ĥ1, F̂^{-1}(τ|·), F̂^{-1}(β|·)). h1 must be positive and strictly
/// monotone on `domain` = [z_a, z_b].
struct CandidateS {
  std::function<double(double)> h1;
  Interval domain;
  std::function<double(double)> q_tau;
  std::function<double(double)> q_beta;
};

/// ĥ_c(y) = exp(-c ∫_{y1}^y 1/λ̂)
double h_c_hat(const LambdaCurve& curve, double c, double y1, double y);

/// c-independent part of the residuals: ĥ1 at Y_i and at both quantile
/// curves, for every observation whose X_i lies in M_X.
struct ResidualBasis {
  std::vector<double> x;
  std::vector<double> h_y;
  std::vector<double> h_tau;
  std::vector<double> h_beta;
  std::size_t clamped = 0;  ///< Y_i moved to the nearest edge of the h1 domain
};

ResidualBasis residual_basis(const CandidateS& cand, const Dataset& data, const MsdConfig& cfg);

struct Residuals {
  std::vector<double> x;
  std::vector<double> e;
  std::size_t clamped = 0;
};

/// ε̂_{c,i} = (𝔥_c(Y_i) - 𝔥_c(q_τ(X_i))) / (𝔥_c(q_β(X_i)) - 𝔥_c(q_τ(X_i))) with
/// 𝔥_c = sign(ĥ1)|ĥ1|^c.
Residuals residuals(const ResidualBasis& basis, double c);
Residuals residuals(const CandidateS& cand, double c, const Dataset& data, const MsdConfig& cfg);

/// Row-major (x rows, e columns) evaluation of G_nMD on a grid.
struct GMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// G(x,e) = P̂(X<=x, ε̃<=e) - P̂(X<=x) P̂(ε̃<=e), all conditional on X in M_X
/// (the residuals already are). x_grid must be ascending.
GMatrix g_nmd(const Residuals& res, std::span<const double> x_grid, std::span<const double> e_grid);

/// ||G||_2 over M_X x [e_a, e_b] by the 2-D trapezoid rule on the cfg grids.
double a_hat(const GMatrix& g, const MsdConfig& cfg);
/// Convenience: builds the cfg grids, G_nMD and its norm.
double a_hat(const Residuals& res, const MsdConfig& cfg);

struct MsdFit {
  double b_hat = 0.0;
  double a_min = 0.0;
  std::vector<double> c_grid;
  std::vector<double> a_grid;  ///< NaN where the residuals could not be formed
  std::size_t clamped = 0;
};

/// B̂ = argmin_{c in [B1,B2]} Â(c, ŝ): a 64-point scan, then golden-section
/// refinement to a bracket below 1e-4. Ties go to the smaller c, and the
/// refined point is kept only if it strictly beats the scan.
MsdFit estimate_b_msd(const CandidateS& cand, const Dataset& data, const MsdConfig& cfg);

/// Candidate built from estimates: ĥ1 from λ̂ on [ŷ0 + t_n, q_0.99(Y)] and
/// the conditional quantile curves of the smoother. Holds references to
/// `state` and `curve`.
CandidateS make_candidate(const SmootherState& state, const LambdaCurve& curve, double y0_hat,
                          double t_n, double y1, double tau, double beta);

/// Outcome of the executable region conditions on the check grid.
struct RegionChecks {
  bool inside_support = false;  ///< M1
  bool quantiles_inside = false;  ///< M3
  bool upper_envelope = false;  ///< M4
  bool lower_envelope = false;  ///< M5

  bool all() const noexcept { return inside_support && quantiles_inside && upper_envelope && lower_envelope; }
};

RegionChecks check_region(const SmootherState& state, const CandidateS& cand, const MsdConfig& cfg,
                          const WeightFunction& weight);

/// Data-driven M_X and [e_a, e_b]: starts from [q_0.1(X), q_0.9(X)] within the
/// weight support, sets [e_a, e_b] to the central 80% of the residuals at the
/// midpoint of [B1, B2] intersected with the range the envelope conditions
/// allow, and trims the failing side of the box until every check passes.
/// Throws CannotSatisfy once the box is narrower than 10% of the data range.
MsdConfig construct_m_x(const SmootherState& state, const CandidateS& cand, MsdConfig draft,
                        const WeightFunction& weight);

}  // namespace hettrans
