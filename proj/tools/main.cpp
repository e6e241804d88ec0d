#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cli_config.hpp"
#include "hettrans/errors.hpp"
#include "hettrans/io.hpp"

namespace fs = std::filesystem;
using namespace hettrans;

namespace {

fs::path prepare_out(const cli::RunConfig& cfg) {
  const fs::path dir = cfg.output_dir.value_or(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

int run(const cli::RunConfig& cfg) {
  const unsigned threads = cli::worker_threads();
  switch (cfg.command) {
    case cli::Command::Fit: {
      const Dataset data = read_csv(*cfg.input_path);
      FitOptions opts = cfg.fit;
      opts.lambda.threads = threads;
      const FitResult result = fit(data, opts);
      const fs::path dir = prepare_out(cfg);
      write_report(result, opts, data.size(), dir, cfg.curve_points);
      std::printf("y0_hat %.6f  b_tilde %.6f  alpha2_hat %.6f  t_n %.6f\n", result.components.y0_hat,
                  result.components.b_tilde, result.components.alpha2_hat, result.components.t_n);
      if (result.msd) std::printf("b_hat %.6f\n", result.msd->b_hat);
      if (result.components.b_tilde_suspicious())
        std::fprintf(stderr, "warning: b_tilde is not positive\n");
      return 0;
    }
    case cli::Command::Simulate: {
      sim::SimConfig sc = cfg.sim;
      sc.threads = threads;
      const sim::SimReport report = sim::mc_run(sc);
      write_report(report, prepare_out(cfg));
      std::printf("reps %zu  succeeded %zu\n", report.reps.size(), report.succeeded);
      std::printf("y0_hat %.4f (%.4f)  b_tilde %.4f (%.4f)  mise %.4f\n", report.y0_hat.mean,
                  report.y0_hat.sd, report.b_tilde.mean, report.b_tilde.sd, report.mise.mean);
      for (const auto& [code, count] : report.failures) std::printf("failed %s: %zu\n", code.c_str(), count);
      return 0;
    }
    case cli::Command::EvalLambda: {
      const Dataset data = read_csv(*cfg.input_path);
      const Kernel kernel = cfg.fit.kernel;
      Bandwidths bw;
      if (cfg.fit.bandwidths) {
        bw = *cfg.fit.bandwidths;
      } else {
        bw.h_y = select_h_y_cv(data, kernel);
        bw.h_x = kernel.gaussian_equivalence() * select_h_x_reference(data);
      }
      std::vector<Interval> box;
      for (std::size_t j = 0; j < data.dim(); ++j) {
        const auto col = data.column(j);
        box.push_back({*std::min_element(col.begin(), col.end()), *std::max_element(col.begin(), col.end())});
      }
      LambdaOptions lopts = cfg.fit.lambda;
      lopts.threads = threads;
      lopts.cover = Interval{cfg.fit.y2, cfg.fit.y1};
      const LambdaCurve curve = build_lambda(SmootherState(data, kernel, bw), WeightFunction(box), lopts);
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (cfg.output_dir) {
        file.open(prepare_out(cfg) / "lambda_curve.csv");
        if (!file) throw Error(ErrorCode::IoError, "cannot write lambda_curve.csv");
        os = &file;
      }
      os->precision(17);
      *os << "y,lambda\n";
      for (std::size_t i = 0; i < curve.grid().size(); ++i)
        *os << curve.grid()[i] << ',' << curve.values()[i] << '\n';
      return 0;
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const cli::RunConfig cfg = cli::parse_args(argc, argv);
    if (cfg.help) {
      std::cout << cfg.help_text;
      return 0;
    }
    return run(cfg);
  } catch (const Error& e) {
    std::cerr << "hettrans: " << e.what() << '\n';
    return e.code() == ErrorCode::UsageError ? 2 : 1;
  }
}
