#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace pichange::cli {

inline constexpr const char* kVersion = "0.1.0";

/// PICHANGE_JOBS environment variable, else hardware concurrency, else 1.
unsigned default_jobs();

/// Runs fn(0..count-1) on a shared-nothing worker pool; the first exception
/// is rethrown after all workers join. jobs == 0 selects default_jobs().
void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

struct SimulateOptions {
  std::filesystem::path out_dir;
  std::string contrast = "high";
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string prior_mode = "accurate";
  std::size_t cycles = 7;
  unsigned jobs = 0;
};

struct DetectOptions {
  std::filesystem::path input;  // a CSV file or a simulate output directory
  std::filesystem::path out_dir;
  std::string cost = "zag";
  std::optional<double> shape;
  std::string beta = "mbic";
  std::string lambda = "auto";
  double sigma = 30.0;
  /// Empty, "sidecar", comma-separated indices, or comma-separated dates.
  std::string centers;
  std::size_t min_seg = 1;
  bool no_prune = false;
  bool pelt = false;  // forces lambda = 0
  std::string penalty_recipe_path;
  // CSV ingestion controls for file inputs.
  std::string time_column;
  std::string value_column = "value";
  std::string date_format;
  std::string transform = "identity";
  unsigned jobs = 0;
};

struct EvaluateOptions {
  std::filesystem::path detections_dir;
  std::filesystem::path truth_dir;
  std::filesystem::path out_dir;
  std::size_t window = 90;
  std::string method = "unknown";
  std::string contrast = "unknown";
};

struct ReportOptions {
  std::filesystem::path eval_dir;
  std::filesystem::path detect_dir;  // optional; enables the penalty trace
  std::filesystem::path out_dir;
};

void run_simulate(const SimulateOptions& options);
void run_detect(const DetectOptions& options);
void run_evaluate(const EvaluateOptions& options);
void run_report(const ReportOptions& options);

/// Parses argv, dispatches, and on failure emits a machine-readable error
/// JSON on stderr and returns a nonzero exit code.
int run_cli(int argc, char** argv);

}  // namespace pichange::cli
