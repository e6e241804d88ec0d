#include "hettrans/fit.hpp"

#include <algorithm>

#include "hettrans/errors.hpp"

namespace hettrans {
namespace {

WeightFunction bounding_box(const Dataset& data) {
  std::vector<Interval> box;
  for (std::size_t j = 0; j < data.dim(); ++j) {
    const auto col = data.column(j);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    box.push_back({*lo, *hi});
  }
  return WeightFunction(std::move(box));
}

}  // namespace

FitResult fit(const Dataset& data, const FitOptions& opts) {
  if (!(opts.y2 < opts.y1)) throw Error(ErrorCode::BadAnchors, "need y2 < y1");
  Bandwidths bw;
  if (opts.bandwidths) {
    bw = *opts.bandwidths;
    if (!(bw.h_y > 0.0 && bw.h_x > 0.0))
      throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive");
  } else {
    bw.h_y = select_h_y_cv(data, opts.kernel);
    bw.h_x = opts.kernel.gaussian_equivalence() * select_h_x_reference(data);
  }
  WeightFunction weight = opts.weight ? *opts.weight : bounding_box(data);
  if (weight.dim() != data.dim())
    throw Error(ErrorCode::InvalidArgument, "weight dimension does not match the regressors");

  const SmootherState state(data, opts.kernel, bw);
  LambdaOptions lopts = opts.lambda;
  if (!lopts.cover) lopts.cover = Interval{opts.y2, opts.y1};
  LambdaCurve curve = build_lambda(state, weight, lopts);

  ComponentEstimates comp;
  comp.y0_hat = estimate_y0(curve);
  comp.b_tilde = estimate_b_tilde(curve, comp.y0_hat);
  comp.t_n = compute_t_n(data.size(), bw.h_y, opts.c_t);
  comp.alpha2_hat = estimate_alpha2(curve, comp.y0_hat, comp.b_tilde, opts.y1, opts.y2, comp.t_n);
  if (opts.variances) {
    try {
      comp.var_b_tilde = var_b_tilde_plugin(state, comp.y0_hat, weight);
      comp.var_y0 = var_y0_plugin(state, comp.y0_hat, comp.b_tilde, weight);
    } catch (const Error&) {
      // B̃ = 0 or nothing above the floors; variances stay unreported.
    }
  }

  std::optional<MsdFit> msd;
  std::optional<MsdConfig> msd_cfg;
  BChoice choice = BChoice::tilde();
  if (opts.b_method == BMethod::Msd) {
    const CandidateS cand = make_candidate(state, curve, comp.y0_hat, comp.t_n, opts.y1,
                                           opts.msd.tau, opts.msd.beta);
    msd_cfg = opts.msd_region_fixed ? opts.msd : construct_m_x(state, cand, opts.msd, weight);
    msd = estimate_b_msd(cand, data, *msd_cfg);
    choice = BChoice::hat(msd->b_hat);
  }
  TransformCurve transform = build_transform(curve, comp, choice, opts.y1, opts.y2);
  return FitResult{bw, std::move(weight), std::move(curve), comp, std::move(msd), msd_cfg,
                   std::move(transform)};
}

}  // namespace hettrans
