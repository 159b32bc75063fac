#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pichange {

/// Calendar instant as seconds since the Unix epoch (UTC).
using Timestamp = std::int64_t;

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" or "YYYY-MM-DD HH:MM:SS".
Timestamp parse_timestamp(const std::string& text);

/// Parses with an explicit format string supporting %Y %m %d %H %M %S;
/// all other characters in the format are matched literally.
Timestamp parse_timestamp(const std::string& text, const std::string& format);

/// Renders a date ("YYYY-MM-DD") when the instant falls on midnight,
/// otherwise a full "YYYY-MM-DDTHH:MM:SS".
std::string format_timestamp(Timestamp t);

/// An ordered univariate series. Values are required to be finite;
/// timestamps, when present, are strictly increasing and aligned 1:1
/// with the values. Indices in this library are 1-based throughout the
/// public interface: value(1) is the first observation.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, std::string unit_label = "");
  TimeSeries(std::vector<double> values, std::vector<Timestamp> timestamps,
             std::string unit_label = "");

  std::size_t size() const { return values_.size(); }
  double value(std::size_t t) const { return values_[t - 1]; }
  const std::vector<double>& values() const { return values_; }

  bool has_timestamps() const { return !timestamps_.empty(); }
  Timestamp timestamp(std::size_t t) const { return timestamps_[t - 1]; }
  const std::vector<Timestamp>& timestamps() const { return timestamps_; }

  const std::string& unit_label() const { return unit_label_; }

 private:
  std::vector<double> values_;
  std::vector<Timestamp> timestamps_;  // empty when the series is untimed
  std::string unit_label_;
};

/// Index (1-based) of the timestamp nearest to `instant`; equidistant
/// instants resolve to the earlier index. Throws std::out_of_range when
/// `instant` lies outside [first, last] and std::invalid_argument when
/// the series carries no timestamps.
std::size_t index_of_timestamp(const TimeSeries& series, Timestamp instant);

/// Result of a detection run. A change point at index t places the
/// segment boundary between observations t and t+1, so change points are
/// interior: 1 <= t < N. segment_costs holds one entry per segment
/// (m change points -> m+1 segments).
struct Segmentation {
  std::vector<std::size_t> change_points;
  double total_objective = 0.0;
  std::vector<double> segment_costs;
};

/// Role of a true change point in labeled truth data.
enum class CpLabel { WithinDay, SleepOnset, WakeOnset };

struct LabeledCp {
  std::size_t index = 0;  // 1-based
  CpLabel label = CpLabel::WithinDay;
};

std::string to_string(CpLabel label);
CpLabel cp_label_from_string(const std::string& name);

}  // namespace pichange
