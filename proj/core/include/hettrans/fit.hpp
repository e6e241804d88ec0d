#pragma once

#include <optional>

#include "hettrans/anchors.hpp"
#include "hettrans/kernels.hpp"
#include "hettrans/lambda_curve.hpp"
#include "hettrans/msd.hpp"
#include "hettrans/smoothers.hpp"
#include "hettrans/transform.hpp"

namespace hettrans {

enum class BMethod { Tilde, Msd };

struct FitOptions {
  Kernel kernel = Kernel::epanechnikov();
  /// Empty: CV for h_y and the normal reference rule for h_x, rescaled to
  /// the kernel by Kernel::gaussian_equivalence.
  std::optional<Bandwidths> bandwidths;
  std::optional<WeightFunction> weight;  ///< empty: indicator of the bounding box of X
  LambdaOptions lambda;
  double c_t = kDefaultTnConstant;
  double y1 = 2.0;
  double y2 = 0.2;
  BMethod b_method = BMethod::Tilde;
  /// tau, beta, [B1, B2] and quadrature sizes for B̂. M_X and [e_a, e_b] are
  /// constructed from the data unless `msd_region_fixed` is set.
  MsdConfig msd;
  bool msd_region_fixed = false;
  bool variances = true;
};

struct FitResult {
  Bandwidths bandwidths;
  WeightFunction weight;
  LambdaCurve lambda;
  ComponentEstimates components;
  std::optional<MsdFit> msd;
  std::optional<MsdConfig> msd_config;
  TransformCurve transform;
};

/// Full pipeline: bandwidths, λ̂, ŷ0, B̃, t_n, α̂2, optionally B̂, and ĥ.
FitResult fit(const Dataset& data, const FitOptions& opts = {});

}  // namespace hettrans
