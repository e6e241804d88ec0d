#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "hettrans/fit.hpp"
#include "hettrans/simstudy.hpp"

namespace hettrans::cli {

enum class Command { Fit, Simulate, EvalLambda };

struct RunConfig {
  Command command = Command::Fit;
  std::optional<std::filesystem::path> input_path;
  std::optional<std::filesystem::path> output_dir;
  FitOptions fit;
  sim::SimConfig sim;
  std::size_t curve_points = 256;
  bool help = false;
  std::string help_text;
};

/// Throws Error(UsageError) naming the offending flag. `--help` anywhere
/// returns a config with help set instead.
RunConfig parse_args(int argc, const char* const* argv);

/// Worker count: hardware concurrency, capped by HETTRANS_THREADS when set.
unsigned worker_threads();

}  // namespace hettrans::cli
