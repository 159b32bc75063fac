#include "pichange/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace pichange {

namespace {

constexpr double kPruneMargin = 1e-12;

std::size_t validated_min_seg(const DetectorConfig& config) {
  if (config.min_segment_length < 1) {
    throw std::invalid_argument("minimum segment length must be at least 1");
  }
  return effective_min_segment_length(config.cost_model, config.min_segment_length);
}

// Change-point chain of the solution chosen at endpoint s, in increasing order.
std::vector<std::size_t> chain_of(const DpState& state, std::size_t s) {
  std::vector<std::size_t> seq;
  for (std::size_t u = s; u != 0;) {
    const std::size_t t = state.last_cp[u];
    if (t != 0) seq.push_back(t);
    u = t;
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

void validate_cps(const std::vector<std::size_t>& cps, std::size_t n, std::size_t min_seg) {
  std::size_t prev = 0;
  for (std::size_t cp : cps) {
    if (cp < 1 || cp >= n) {
      throw std::invalid_argument("change point " + std::to_string(cp) +
                                  " is not interior to [1, " + std::to_string(n) + ")");
    }
    if (cp <= prev) throw std::invalid_argument("change points must be strictly increasing");
    if (cp - prev < min_seg) {
      throw std::invalid_argument("segment ending at " + std::to_string(cp) +
                                  " is shorter than the minimum length " +
                                  std::to_string(min_seg));
    }
    prev = cp;
  }
  if (n - prev < min_seg) {
    throw std::invalid_argument("final segment is shorter than the minimum length");
  }
}

}  // namespace

namespace detail {

bool lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

std::size_t effective_min_segment_length(CostModel model, std::size_t min_segment_length) {
  const std::size_t model_min = model == CostModel::GaussianNLL ? 2 : 1;
  return std::max(min_segment_length, model_min);
}

void prune_step(DpState& state, const CostCache& cache, const PenaltyProfile& penalty,
                std::size_t s, double pruning_constant, std::size_t min_seg) {
  const double bar = state.F[s] + penalty.at(s) + kPruneMargin;
  for (auto& cand : state.candidates) {
    if (cand.expiry != DpState::kNeverExpires) continue;
    const double g_t = cand.t == 0 ? 0.0 : penalty.at(cand.t);
    const double lhs =
        state.F[cand.t] + g_t + cache.segment_cost(cand.t + 1, s) + pruning_constant;
    if (lhs >= bar) cand.expiry = s + min_seg;
  }
}

Segmentation detect(const TimeSeries& series, const DetectorConfig& config) {
  const CostCache cache = build_cache(series, config.cost_model, config.zag_shape);
  return detect(series, cache, config);
}

Segmentation detect(const TimeSeries& series, const CostCache& cache,
                    const DetectorConfig& config) {
  const std::size_t n = series.size();
  if (cache.size() != n || cache.model() != config.cost_model) {
    throw std::invalid_argument("cost cache does not match the series/config");
  }
  if (config.penalty.size() != n) {
    throw std::invalid_argument("penalty profile length " +
                                std::to_string(config.penalty.size()) +
                                " does not match series length " + std::to_string(n));
  }
  if (!std::isfinite(config.pruning_constant)) {
    throw std::invalid_argument("pruning constant must be finite");
  }
  const std::size_t min_seg = validated_min_seg(config);
  if (n < 2 * min_seg) {
    throw std::length_error("series of length " + std::to_string(n) +
                            " is too short for minimum segment length " +
                            std::to_string(min_seg));
  }

  const PenaltyProfile& pen = config.penalty;
  const double inf = std::numeric_limits<double>::infinity();

  DpState state;
  state.F.assign(n + 1, inf);
  state.last_cp.assign(n + 1, 0);
  state.cp_count.assign(n + 1, 0);
  state.F[0] = 0.0;
  state.candidates.push_back({0, DpState::kNeverExpires});

  std::vector<double> vals;
  for (std::size_t s = min_seg; s <= n; ++s) {
    auto& cands = state.candidates;
    std::erase_if(cands, [s](const DpState::Candidate& c) { return c.expiry <= s; });
    if (s >= 2 * min_seg) cands.push_back({s - min_seg, DpState::kNeverExpires});

    vals.resize(cands.size());
    double best = inf;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const std::size_t t = cands[i].t;
      const double g_t = t == 0 ? 0.0 : pen.at(t);
      // F(t) + g(t) first, then the segment cost: this makes every chain's
      // value accumulate in objective_value's left-to-right order, so exact
      // ties are ranked identically everywhere.
      vals[i] = state.F[t] + g_t + cache.segment_cost(t + 1, s);
      if (vals[i] < best) best = vals[i];
    }

    // Exact-value ties resolve toward fewer change points, then toward the
    // lexicographically smallest sequence.
    std::size_t best_i = cands.size();
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (vals[i] != best) continue;
      if (best_i == cands.size()) {
        best_i = i;
        continue;
      }
      const std::size_t ta = cands[best_i].t;
      const std::size_t tb = cands[i].t;
      const std::size_t count_a = state.cp_count[ta] + (ta > 0 ? 1 : 0);
      const std::size_t count_b = state.cp_count[tb] + (tb > 0 ? 1 : 0);
      if (count_b < count_a) {
        best_i = i;
      } else if (count_b == count_a) {
        auto seq_a = chain_of(state, ta);
        if (ta > 0) seq_a.push_back(ta);
        auto seq_b = chain_of(state, tb);
        if (tb > 0) seq_b.push_back(tb);
        if (detail::lex_less(seq_b, seq_a)) best_i = i;
      }
    }

    const std::size_t t_star = cands[best_i].t;
    state.F[s] = best;
    state.last_cp[s] = t_star;
    state.cp_count[s] = state.cp_count[t_star] + (t_star > 0 ? 1 : 0);

    if (config.pruning_enabled && s < n) {
      prune_step(state, cache, pen, s, config.pruning_constant, min_seg);
    }
  }

  Segmentation result;
  result.change_points = chain_of(state, n);
  result.segment_costs = segment_costs(cache, result.change_points);
  result.total_objective = objective_value(cache, pen, result.change_points, min_seg);
  return result;
}

double objective_value(const CostCache& cache, const PenaltyProfile& penalty,
                       const std::vector<std::size_t>& cps, std::size_t min_seg) {
  const std::size_t n = cache.size();
  if (penalty.size() != n) {
    throw std::invalid_argument("penalty profile length does not match series length");
  }
  validate_cps(cps, n, min_seg);
  double total = 0.0;
  std::size_t prev = 0;
  for (std::size_t cp : cps) {
    total += cache.segment_cost(prev + 1, cp);
    total += penalty.at(cp);
    prev = cp;
  }
  total += cache.segment_cost(prev + 1, n);
  return total;
}

double objective_value(const TimeSeries& series, const std::vector<std::size_t>& cps,
                       const DetectorConfig& config) {
  const CostCache cache = build_cache(series, config.cost_model, config.zag_shape);
  return objective_value(cache, config.penalty, cps, validated_min_seg(config));
}

std::vector<double> segment_costs(const CostCache& cache,
                                  const std::vector<std::size_t>& cps) {
  validate_cps(cps, cache.size(), cache.min_segment_length());
  std::vector<double> costs;
  costs.reserve(cps.size() + 1);
  std::size_t prev = 0;
  for (std::size_t cp : cps) {
    costs.push_back(cache.segment_cost(prev + 1, cp));
    prev = cp;
  }
  costs.push_back(cache.segment_cost(prev + 1, cache.size()));
  return costs;
}

std::string detection_to_json(const Segmentation& result, const TimeSeries& series,
                              const DetectorConfig& config) {
  nlohmann::json j;
  j["change_points"] = result.change_points;
  if (series.has_timestamps()) {
    auto stamps = nlohmann::json::array();
    for (std::size_t cp : result.change_points) {
      stamps.push_back(format_timestamp(series.timestamp(cp)));
    }
    j["timestamps"] = stamps;
  }
  j["objective"] = result.total_objective;
  j["segment_costs"] = result.segment_costs;

  nlohmann::json echo;
  echo["cost_model"] = to_string(config.cost_model);
  if (config.cost_model == CostModel::ZagNLL && config.zag_shape) {
    echo["shape"] = *config.zag_shape;
  }
  echo["beta"] = config.penalty.beta();
  echo["lambda"] = config.penalty.lambda();
  auto centers = nlohmann::json::array();
  auto spreads = nlohmann::json::array();
  for (const auto& k : config.penalty.kernels()) {
    centers.push_back(k.center);
    spreads.push_back(k.spread);
  }
  echo["centers"] = centers;
  echo["spreads"] = spreads;
  echo["min_segment_length"] = config.min_segment_length;
  echo["effective_min_segment_length"] =
      effective_min_segment_length(config.cost_model, config.min_segment_length);
  echo["pruning_enabled"] = config.pruning_enabled;
  echo["pruning_constant"] = config.pruning_constant;
  echo["pruning_constant_certified"] = config.pruning_constant <= 0.0;
  j["config_echo"] = echo;
  return j.dump(2);
}

}  // namespace pichange
