#include "cli_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "hettrans/errors.hpp"

namespace hettrans::cli {
namespace {

struct Flags {
  std::optional<double> hy;
  std::optional<double> hx;
  std::string b_method = "tilde";
  std::string mode = "mean";
};

void add_bandwidths(CLI::App* app, Flags& f) {
  app->add_option("--hy", f.hy, "Bandwidth in the response (default: cross-validation)")
      ->check(CLI::PositiveNumber);
  app->add_option("--hx", f.hx, "Bandwidth in the regressor (default: normal reference rule)")
      ->check(CLI::PositiveNumber);
}

void add_curve(CLI::App* app, RunConfig& cfg, Flags& f) {
  app->add_option("--y1", cfg.fit.y1, "Anchor with h(y1) = 1")->capture_default_str();
  app->add_option("--y2", cfg.fit.y2, "Anchor of the lower branch, below y0")->capture_default_str();
  app->add_option("--ct", cfg.fit.c_t, "Constant of the t_n rate")->capture_default_str()->check(
      CLI::PositiveNumber);
  app->add_option("--nx", cfg.fit.lambda.n_x, "Regressor evaluation points for lambda")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 20));
  app->add_option("--grid", cfg.fit.lambda.grid_size, "Points of the lambda grid")
      ->capture_default_str()
      ->check(CLI::Range(4, 1 << 20));
  app->add_option("--mode", f.mode, "Aggregation over regressor points")
      ->capture_default_str()
      ->check(CLI::IsMember({"mean", "trapezoid"}));
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  Flags f;
  std::string input;
  std::string out;

  CLI::App app{"Nonparametric estimation of a heteroscedastic transformation model", "hettrans"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Estimate the transformation from a CSV file");
  fit->add_option("path", input, "CSV with header y,x1,...,xd")->required();
  fit->add_option("--out", out, "Output directory (created if missing)");
  add_bandwidths(fit, f);
  add_curve(fit, cfg, f);
  fit->add_option("--b-method", f.b_method, "Estimator of B")
      ->capture_default_str()
      ->check(CLI::IsMember({"tilde", "msd"}));
  fit->add_option("--tau", cfg.fit.msd.tau, "Lower quantile level of the msd residuals")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  fit->add_option("--beta", cfg.fit.msd.beta, "Upper quantile level of the msd residuals")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of the built-in design");
  simulate->add_option("--n", cfg.sim.n, "Sample size")->capture_default_str()->check(
      CLI::Range(std::size_t{50}, std::size_t{1} << 30));
  simulate->add_option("--reps", cfg.sim.reps, "Replications")->capture_default_str()->check(
      CLI::Range(std::size_t{1}, std::size_t{1} << 30));
  simulate->add_option("--seed", cfg.sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--y1", cfg.sim.y1, "Anchor with h(y1) = 1")->capture_default_str();
  simulate->add_option("--y2", cfg.sim.y2, "Anchor of the lower branch")->capture_default_str();
  simulate->add_option("--ct", cfg.sim.c_t, "Constant of the t_n rate")->capture_default_str()->check(
      CLI::PositiveNumber);
  simulate->add_option("--nx", cfg.sim.n_x, "Regressor evaluation points for lambda")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 20));
  simulate->add_option("--grid", cfg.sim.grid_size, "Points of the lambda grid")
      ->capture_default_str()
      ->check(CLI::Range(4, 1 << 20));
  simulate->add_option("--mise-points", cfg.sim.mise_points, "Points of the MISE grid")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 20));
  simulate->add_option("--out", out, "Output directory (created if missing)");
  add_bandwidths(simulate, f);

  auto* eval = app.add_subcommand("eval-lambda", "Print the lambda curve of a CSV file");
  eval->add_option("path", input, "CSV with header y,x1,...,xd")->required();
  eval->add_option("--out", out, "Write lambda_curve.csv here instead of stdout");
  add_bandwidths(eval, f);
  add_curve(eval, cfg, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    cfg.help = true;
    const CLI::App* target = &app;
    for (const auto* sub : {fit, simulate, eval})
      if (sub->parsed()) target = sub;
    cfg.help_text = target->help();
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::UsageError, e.what());
  }

  if (fit->parsed()) cfg.command = Command::Fit;
  else if (simulate->parsed()) cfg.command = Command::Simulate;
  else cfg.command = Command::EvalLambda;

  if (!input.empty()) cfg.input_path = input;
  if (!out.empty()) cfg.output_dir = out;
  if (f.hy.has_value() != f.hx.has_value())
    throw Error(ErrorCode::UsageError, std::string(f.hy ? "--hx" : "--hy") +
                                           ": fixed bandwidths need both --hy and --hx");
  if (f.hy) {
    cfg.fit.bandwidths = Bandwidths{*f.hy, *f.hx};
    cfg.sim.bandwidths = cfg.fit.bandwidths;
  }
  cfg.fit.b_method = f.b_method == "msd" ? BMethod::Msd : BMethod::Tilde;
  cfg.fit.lambda.mode =
      f.mode == "trapezoid" ? AggregationMode::Trapezoid : AggregationMode::MeanOverPoints;
  if (!(cfg.fit.msd.tau < cfg.fit.msd.beta))
    throw Error(ErrorCode::UsageError, "--tau: must be below --beta");
  if (cfg.command == Command::Simulate ? !(cfg.sim.y2 < cfg.sim.y1) : !(cfg.fit.y2 < cfg.fit.y1))
    throw Error(ErrorCode::UsageError, "--y2: must be below --y1");
  cfg.curve_points = cfg.fit.lambda.grid_size;
  return cfg;
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HETTRANS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

}  // namespace hettrans::cli
