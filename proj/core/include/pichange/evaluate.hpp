#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pichange/time_series.hpp"

namespace pichange {

struct MatchConfig {
  std::size_t window = 90;  // index units
};

/// Classification of one series' estimates against labeled truth.
/// Targets are the SleepOnset/WakeOnset change points; every estimate
/// lands in exactly one bucket (match, clustered, irrelevant, stray).
struct EvalReport {
  std::size_t target_count = 0;
  std::size_t detected_targets = 0;
  std::size_t false_negatives = 0;
  std::size_t clustered_fp = 0;
  std::size_t irrelevant_fp = 0;
  std::size_t stray_fp = 0;
  /// Distance from each detected target to its closest assigned estimate.
  std::vector<double> closest_errors;
  /// Distance from each detected target to the mean of its assigned cluster.
  std::vector<double> cluster_mean_errors;
};

/// Assigns estimates to targets within the matching window (nearest target,
/// ties toward the earlier one), keeps the closest assignee per target as
/// the match and counts the rest as clustered false positives; unassigned
/// estimates within the window of a WithinDay CP are irrelevant false
/// positives and everything else is stray. Estimates must be strictly
/// increasing.
EvalReport classify(const std::vector<std::size_t>& estimates,
                    const std::vector<LabeledCp>& truth, const MatchConfig& cfg);

struct AggregateStats {
  std::size_t series_count = 0;
  double mean_false_negatives = 0.0;
  double mean_clustered_fp = 0.0;
  double mean_irrelevant_fp = 0.0;
  double mean_stray_fp = 0.0;
  std::size_t pooled_error_count = 0;
  double mae = 0.0;
  /// min, 25%, 50%, 75%, 90%, 95%, max of the pooled closest-estimate errors.
  std::array<double, 7> quantiles{};
};

/// Pools closest-estimate errors across reports, computes nearest-rank
/// quantiles and MAE, and averages the per-series counts. Throws on empty
/// input.
AggregateStats error_stats(const std::vector<EvalReport>& reports);

/// Nearest-rank quantile: the element of the sorted pool at rank
/// floor(p * n) + 1 (clamped to n). `sorted` must be nondecreasing.
double nearest_rank_quantile(const std::vector<double>& sorted, double p);

std::string to_json(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& json_text);

/// Appends one "Method,Contrast,False Negative,Clustered FP,Irrelevant FP,
/// Stray FP" row per entry.
void write_count_table_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& methods,
                           const std::vector<std::string>& contrasts,
                           const std::vector<AggregateStats>& stats);

/// Appends one "Method,Contrast,MAE,Min,25%,50%,75%,90%,95%,Max" row per entry.
void write_error_table_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& methods,
                           const std::vector<std::string>& contrasts,
                           const std::vector<AggregateStats>& stats);

}  // namespace pichange
