#include "pichange/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pichange {

namespace {

double index_distance(std::size_t a, std::size_t b) {
  return std::abs(static_cast<double>(a) - static_cast<double>(b));
}

}  // namespace

EvalReport classify(const std::vector<std::size_t>& estimates,
                    const std::vector<LabeledCp>& truth, const MatchConfig& cfg) {
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    if (estimates[i] <= estimates[i - 1]) {
      throw std::invalid_argument("estimates must be strictly increasing");
    }
  }
  std::vector<LabeledCp> targets;
  std::vector<std::size_t> within_day;
  for (const auto& cp : truth) {
    if (cp.label == CpLabel::WithinDay) {
      within_day.push_back(cp.index);
    } else {
      targets.push_back(cp);
    }
  }
  std::sort(targets.begin(), targets.end(),
            [](const LabeledCp& a, const LabeledCp& b) { return a.index < b.index; });

  const double window = static_cast<double>(cfg.window);
  EvalReport report;
  report.target_count = targets.size();

  // Provisional assignment: nearest target within the window, ties toward
  // the earlier target.
  std::vector<std::vector<std::size_t>> assigned(targets.size());
  std::vector<std::size_t> unassigned;
  for (std::size_t e : estimates) {
    std::size_t best_j = targets.size();
    double best_d = window;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const double d = index_distance(e, targets[j].index);
      if (d < best_d || (d == best_d && best_j == targets.size())) {
        best_d = d;
        best_j = j;
      }
    }
    if (best_j < targets.size()) {
      assigned[best_j].push_back(e);
    } else {
      unassigned.push_back(e);
    }
  }

  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (assigned[j].empty()) {
      ++report.false_negatives;
      continue;
    }
    ++report.detected_targets;
    double closest = std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (std::size_t e : assigned[j]) {
      closest = std::min(closest, index_distance(e, targets[j].index));
      mean += static_cast<double>(e);
    }
    mean /= static_cast<double>(assigned[j].size());
    report.closest_errors.push_back(closest);
    report.cluster_mean_errors.push_back(
        std::abs(mean - static_cast<double>(targets[j].index)));
    report.clustered_fp += assigned[j].size() - 1;
  }

  for (std::size_t e : unassigned) {
    bool irrelevant = false;
    for (std::size_t w : within_day) {
      if (index_distance(e, w) <= window) {
        irrelevant = true;
        break;
      }
    }
    if (irrelevant) {
      ++report.irrelevant_fp;
    } else {
      ++report.stray_fp;
    }
  }
  return report;
}

double nearest_rank_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty pool");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  std::size_t rank = static_cast<std::size_t>(
                         std::floor(p * static_cast<double>(sorted.size()))) + 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

AggregateStats error_stats(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports to aggregate");
  AggregateStats stats;
  stats.series_count = reports.size();
  std::vector<double> pooled;
  for (const auto& r : reports) {
    stats.mean_false_negatives += static_cast<double>(r.false_negatives);
    stats.mean_clustered_fp += static_cast<double>(r.clustered_fp);
    stats.mean_irrelevant_fp += static_cast<double>(r.irrelevant_fp);
    stats.mean_stray_fp += static_cast<double>(r.stray_fp);
    pooled.insert(pooled.end(), r.closest_errors.begin(), r.closest_errors.end());
  }
  const double count = static_cast<double>(reports.size());
  stats.mean_false_negatives /= count;
  stats.mean_clustered_fp /= count;
  stats.mean_irrelevant_fp /= count;
  stats.mean_stray_fp /= count;

  stats.pooled_error_count = pooled.size();
  if (!pooled.empty()) {
    std::sort(pooled.begin(), pooled.end());
    double sum = 0.0;
    for (double e : pooled) sum += e;
    stats.mae = sum / static_cast<double>(pooled.size());
    static constexpr double kProbs[] = {0.0, 0.25, 0.50, 0.75, 0.90, 0.95, 1.0};
    for (std::size_t i = 0; i < 7; ++i) {
      stats.quantiles[i] = nearest_rank_quantile(pooled, kProbs[i]);
    }
  }
  return stats;
}

std::string to_json(const EvalReport& report) {
  nlohmann::json j;
  j["target_count"] = report.target_count;
  j["detected_targets"] = report.detected_targets;
  j["false_negatives"] = report.false_negatives;
  j["clustered_fp"] = report.clustered_fp;
  j["irrelevant_fp"] = report.irrelevant_fp;
  j["stray_fp"] = report.stray_fp;
  j["closest_errors"] = report.closest_errors;
  j["cluster_mean_errors"] = report.cluster_mean_errors;
  return j.dump(2);
}

EvalReport eval_report_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  EvalReport report;
  report.target_count = j.at("target_count").get<std::size_t>();
  report.detected_targets = j.at("detected_targets").get<std::size_t>();
  report.false_negatives = j.at("false_negatives").get<std::size_t>();
  report.clustered_fp = j.at("clustered_fp").get<std::size_t>();
  report.irrelevant_fp = j.at("irrelevant_fp").get<std::size_t>();
  report.stray_fp = j.at("stray_fp").get<std::size_t>();
  report.closest_errors = j.at("closest_errors").get<std::vector<double>>();
  report.cluster_mean_errors = j.at("cluster_mean_errors").get<std::vector<double>>();
  return report;
}

namespace {

void check_table_sizes(const std::vector<std::string>& methods,
                       const std::vector<std::string>& contrasts,
                       const std::vector<AggregateStats>& stats) {
  if (methods.size() != stats.size() || contrasts.size() != stats.size()) {
    throw std::invalid_argument("table rows must align with labels");
  }
}

}  // namespace

void write_count_table_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& methods,
                           const std::vector<std::string>& contrasts,
                           const std::vector<AggregateStats>& stats) {
  check_table_sizes(methods, contrasts, stats);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "Method,Contrast,False Negative,Clustered FP,Irrelevant FP,Stray FP\n";
  char buf[128];
  for (std::size_t i = 0; i < stats.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.3f,%.3f", stats[i].mean_false_negatives,
                  stats[i].mean_clustered_fp, stats[i].mean_irrelevant_fp,
                  stats[i].mean_stray_fp);
    out << methods[i] << ',' << contrasts[i] << ',' << buf << '\n';
  }
}

void write_error_table_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& methods,
                           const std::vector<std::string>& contrasts,
                           const std::vector<AggregateStats>& stats) {
  check_table_sizes(methods, contrasts, stats);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "Method,Contrast,MAE,Min,25%,50%,75%,90%,95%,Max\n";
  char buf[192];
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& q = stats[i].quantiles;
    std::snprintf(buf, sizeof buf, "%.3f,%g,%g,%g,%g,%g,%g,%g", stats[i].mae, q[0], q[1],
                  q[2], q[3], q[4], q[5], q[6]);
    out << methods[i] << ',' << contrasts[i] << ',' << buf << '\n';
  }
}

}  // namespace pichange
