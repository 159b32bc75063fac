#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pichange/time_series.hpp"

namespace pichange {

enum class CostModel { GaussianNLL, ZagNLL };

std::string to_string(CostModel model);
CostModel cost_model_from_string(const std::string& name);

/// Prefix statistics for O(1) segment costs. Segment indices are 1-based and
/// inclusive: segment_cost(s, t) covers observations s..t. Immutable after
/// build_cache; evaluation is pure and safe to call concurrently.
class CostCache {
 public:
  /// Clamp for the zero-probability MLE in the ZAG model.
  static constexpr double kZeroProbClamp = 1e-6;
  /// Floor for the fitted Gamma scale.
  static constexpr double kScaleFloor = 1e-12;

  CostModel model() const { return model_; }
  std::size_t size() const { return n_; }

  /// Shortest segment the model can score (2 for Gaussian, 1 for ZAG).
  std::size_t min_segment_length() const;

  /// Gamma shape (ZAG only).
  double shape() const { return shape_; }
  /// Variance floor in force for degenerate Gaussian segments.
  double var_floor() const { return var_floor_; }

  double segment_cost(std::size_t s, std::size_t t) const;

  const std::vector<double>& cum_sum() const { return cum_sum_; }
  const std::vector<double>& cum_sumsq() const { return cum_sumsq_; }
  const std::vector<std::int64_t>& cum_zero_count() const { return cum_zero_count_; }
  const std::vector<double>& cum_log_pos() const { return cum_log_pos_; }

  friend CostCache build_cache(const TimeSeries& series, CostModel model,
                               std::optional<double> shape);
  friend double gaussian_segment_cost(const CostCache& cache, std::size_t s, std::size_t t);
  friend double zag_segment_cost(const CostCache& cache, std::size_t s, std::size_t t);

 private:
  CostModel model_ = CostModel::GaussianNLL;
  std::size_t n_ = 0;
  std::vector<double> cum_sum_;
  std::vector<double> cum_sumsq_;               // Gaussian only
  std::vector<std::int64_t> cum_zero_count_;    // ZAG only
  std::vector<double> cum_log_pos_;             // ZAG only
  double shape_ = 1.0;                          // ZAG xi
  double log_gamma_shape_ = 0.0;                // ln Gamma(xi), cached
  double var_floor_ = 0.0;                      // Gaussian only
};

/// Builds prefix statistics with compensated (Neumaier) accumulation.
/// The ZAG model requires nonnegative values; `shape` may be omitted, in
/// which case it is estimated from the series (see estimate_shape).
CostCache build_cache(const TimeSeries& series, CostModel model,
                      std::optional<double> shape = std::nullopt);

/// Gaussian NLL at the segment's joint (mean, variance) MLE, constants
/// independent of the segmentation dropped: (n/2) ln(max(var, floor)) + n/2.
/// Requires segment length >= 2.
double gaussian_segment_cost(const CostCache& cache, std::size_t s, std::size_t t);

/// Zero-augmented Gamma NLL at the segment MLEs with clamped zero
/// probability and floored scale. Valid for segment length >= 1.
double zag_segment_cost(const CostCache& cache, std::size_t s, std::size_t t);

/// Method-of-moments Gamma shape over the positive values, clamped to
/// [0.01, 100]. Requires at least two positive observations.
double estimate_shape(const TimeSeries& series);

}  // namespace pichange
