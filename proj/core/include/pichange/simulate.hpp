#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pichange/time_series.hpp"

namespace pichange {

enum class Contrast { Low, Moderate, High };
enum class PriorMode { Accurate, Inaccurate, Exact };

std::string to_string(Contrast contrast);
Contrast contrast_from_string(const std::string& name);
std::string to_string(PriorMode mode);
PriorMode prior_mode_from_string(const std::string& name);

/// Zero-augmented Gamma parameters: P(y = 0) = zero_prob, otherwise
/// y ~ Gamma(shape, scale) with mean shape * scale.
struct ZagParams {
  double shape = 1.0;
  double scale = 1.0;
  double zero_prob = 0.0;
};

struct ScenarioSpec {
  Contrast contrast = Contrast::High;
  std::size_t n_cycles = 7;
  std::uint64_t seed = 0;
  PriorMode prior_mode = PriorMode::Accurate;
  std::size_t resolution_minutes = 1;
};

struct SegmentRecord {
  std::size_t start = 0;  // 1-based, inclusive
  std::size_t end = 0;    // 1-based, inclusive
  std::string segment_type;  // "S1", "S2", "S3"
  ZagParams params;
};

struct SimulatedSeries {
  TimeSeries series;
  std::vector<LabeledCp> true_cps;
  std::vector<std::size_t> prior_centers;
  std::vector<SegmentRecord> params_log;
  double shape = 1.0;  // series-level xi shared by every segment
  ScenarioSpec spec;
};

/// Deterministic random stream with fixed draw algorithms, so that a seed
/// pins the byte-exact output independent of standard-library distribution
/// internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent per-series stream derived from (master seed, series index).
  static Rng for_series(std::uint64_t master_seed, std::uint64_t series_index);

  double uniform01();  // [0, 1)
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);  // inclusive, unbiased
  double normal();
  double gamma(double shape, double scale);  // Marsaglia-Tsang

 private:
  std::mt19937_64 engine_;
};

/// n independent ZAG draws.
std::vector<double> sample_zag(const ZagParams& params, std::size_t n, Rng& rng);

/// Sleep-wake actigraphy generator: n_cycles cycles of segments S1, S2
/// (diurnal) and S3 (nocturnal), lengths 240 + 10*U{0..24}, zero
/// probabilities U{0.05..0.45} (S1, S2) and U{0.55..0.95} (S3) on a 0.01
/// grid, one shape U{0.50..1.30} per series, and contrast-specific integer
/// scale grids. Boundaries are labeled WithinDay / SleepOnset / WakeOnset;
/// the final wake onset coincides with the series end and is not recorded.
SimulatedSeries generate_series(const ScenarioSpec& spec, Rng& rng);

/// One prior center per SleepOnset/WakeOnset change point (WithinDay CPs
/// receive none). Accurate: cp + U{-9..9}. Inaccurate: cp +- U{60..120}
/// with an equiprobable sign. Exact: cp itself. Centers clamp to [1, n].
std::vector<std::size_t> place_prior_centers(const std::vector<LabeledCp>& true_cps,
                                             PriorMode mode, std::size_t n, Rng& rng);

/// Truth sidecar persisted next to each simulated series.
struct TruthSidecar {
  std::size_t n = 0;
  double shape = 1.0;
  std::vector<LabeledCp> true_cps;
  std::vector<std::size_t> prior_centers;
  std::vector<SegmentRecord> params_log;
  ScenarioSpec spec;
};

std::string truth_to_json(const SimulatedSeries& sim);
TruthSidecar truth_from_json(const std::string& json_text);

/// Writes an untimed series as "index,value" rows (1-based indices).
void write_series_csv(const TimeSeries& series, const std::filesystem::path& path);

}  // namespace pichange
