#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "hettrans/fit.hpp"
#include "hettrans/simstudy.hpp"
#include "hettrans/smoothers.hpp"

namespace hettrans {

/// Reads `y,x1,...,xd` with a header row. Throws IoError if the file cannot be
/// opened and ParseError for malformed, NaN or infinite cells.
Dataset read_csv(const std::filesystem::path& path);

/// Plain-value digest of a fit, which is what report.json holds.
struct FitSummary {
  std::size_t n = 0;
  std::size_t dim = 0;
  Bandwidths bandwidths;
  double y1 = 0.0;
  double y2 = 0.0;
  double c_t = 0.0;
  std::string b_method;
  std::size_t grid_size = 0;
  std::size_t n_x = 0;
  double y0_hat = 0.0;
  double b_tilde = 0.0;
  bool b_tilde_suspicious = false;
  double alpha2_hat = 0.0;
  double t_n = 0.0;
  std::optional<double> var_y0;
  std::optional<double> var_b_tilde;
  std::optional<double> b_hat;
  std::optional<double> a_min;
  std::optional<Interval> m_x;
  std::optional<Interval> e_range;
  double b_used = 0.0;
  std::size_t dropped_points = 0;

  bool operator==(const FitSummary&) const = default;
};

FitSummary summarize(const FitResult& result, const FitOptions& opts, std::size_t n);

/// report.json, h_curve.csv and lambda_curve.csv (one row per λ̂ grid node).
/// h_curve.csv has `curve_points` equidistant rows over the grid range.
void write_report(const FitResult& result, const FitOptions& opts, std::size_t n,
                  const std::filesystem::path& dir, std::size_t curve_points);

/// report.json, per_rep.csv and qq.csv.
void write_report(const sim::SimReport& report, const std::filesystem::path& dir);

FitSummary read_fit_summary(const std::filesystem::path& report_json);
sim::SimReport read_sim_report(const std::filesystem::path& report_json);

}  // namespace hettrans
