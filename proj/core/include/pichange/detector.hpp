#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pichange/cost.hpp"
#include "pichange/penalty.hpp"
#include "pichange/time_series.hpp"

namespace pichange {

struct DetectorConfig {
  CostModel cost_model = CostModel::GaussianNLL;
  PenaltyProfile penalty;
  std::size_t min_segment_length = 1;
  double pruning_constant = 0.0;  // K in the pruning test
  bool pruning_enabled = true;
  /// Gamma shape for the ZAG cost; estimated from the series when absent.
  std::optional<double> zag_shape;
};

/// Minimum admissible segment length after accounting for what the cost
/// model can score (the Gaussian cost needs length >= 2).
std::size_t effective_min_segment_length(CostModel model, std::size_t min_segment_length);

/// Dynamic-programming state for one detection run. F[s] is the optimal
/// prefix objective for y_{1:s} with F[0] = 0; last_cp[s] is the chosen
/// predecessor (0 means "no earlier change point"). Candidates carry an
/// expiry: a candidate failing the pruning test at time s stays usable for
/// endpoints below s + L_min (where its dominator is not yet admissible)
/// and is dropped from then on.
struct DpState {
  static constexpr std::size_t kNeverExpires = std::numeric_limits<std::size_t>::max();

  struct Candidate {
    std::size_t t = 0;
    std::size_t expiry = kNeverExpires;
  };

  std::vector<double> F;
  std::vector<std::size_t> last_cp;
  std::vector<std::size_t> cp_count;  // change points in the chosen prefix solution
  std::vector<Candidate> candidates;
};

/// Applies the pruning test at endpoint s to every live candidate:
/// F(t) + C(y_{(t+1):s}) + g(t) + K >= F(s) + g(s) schedules t for removal
/// once endpoints reach s + min_seg. The start-of-series branch t = 0 uses
/// g(0) = 0 and is prunable like any other candidate. Candidates within
/// 1e-12 of the boundary are retained.
void prune_step(DpState& state, const CostCache& cache, const PenaltyProfile& penalty,
                std::size_t s, double pruning_constant, std::size_t min_seg);

/// Exact global minimizer of the penalized segmentation objective
///   sum_j C(y_{(tau_{j-1}+1):tau_j}) + sum over interior tau_j of g(tau_j)
/// subject to every segment being at least the effective minimum length.
/// Ties resolve toward fewer change points, then toward the
/// lexicographically smallest change-point sequence.
Segmentation detect(const TimeSeries& series, const DetectorConfig& config);
Segmentation detect(const TimeSeries& series, const CostCache& cache,
                    const DetectorConfig& config);

/// Objective of an explicit change-point sequence; throws
/// std::invalid_argument when the sequence is not strictly increasing,
/// not interior, or violates the minimum segment length.
double objective_value(const TimeSeries& series, const std::vector<std::size_t>& cps,
                       const DetectorConfig& config);
double objective_value(const CostCache& cache, const PenaltyProfile& penalty,
                       const std::vector<std::size_t>& cps, std::size_t min_seg);

/// Per-segment costs for an explicit change-point sequence (validated the
/// same way as objective_value).
std::vector<double> segment_costs(const CostCache& cache,
                                  const std::vector<std::size_t>& cps);

/// Detection result JSON: {"change_points": [...], "timestamps": [...],
/// "objective": ..., "segment_costs": [...], "config_echo": {...}}.
std::string detection_to_json(const Segmentation& result, const TimeSeries& series,
                              const DetectorConfig& config);

namespace detail {
/// Lexicographic order on change-point sequences, used for tie-breaking.
bool lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);
}  // namespace detail

}  // namespace pichange
