#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pichange/penalty.hpp"
#include "pichange/time_series.hpp"

namespace pichange {

enum class Transform { Identity, AbsDiff, LogScale };

std::string to_string(Transform transform);
Transform transform_from_string(const std::string& name);

/// How to pull a series out of a CSV file. Columns are referenced by header
/// name, or by 1-based position when the token is an unsigned integer. An
/// empty time_column loads the rows in file order without timestamps.
struct ColumnSpec {
  std::string time_column;
  std::string value_column = "value";
  std::string date_format;  // empty -> ISO-8601
  Transform transform = Transform::Identity;
  char delimiter = ',';
};

struct LoadResult {
  TimeSeries series;
  std::size_t dropped_rows = 0;  // rows with an empty value cell
};

/// Loads and transforms a CSV series. Rows are sorted by timestamp;
/// duplicate timestamps are rejected. AbsDiff maps y to |y_t - y_{t-1}|
/// (one shorter, timestamps from the second row); LogScale maps y to ln(y)
/// and requires positive values. Parse failures report the row number.
LoadResult load_csv(const std::filesystem::path& path, const ColumnSpec& spec);

/// Writes "time,value" rows (ISO timestamps) or "index,value" rows for
/// untimed series. Values round-trip exactly.
void write_csv(const TimeSeries& series, const std::filesystem::path& path);

/// Maps calendar dates onto kernel centers at the nearest series index.
/// Throws std::out_of_range naming the offending date when it falls outside
/// the series time range.
std::vector<KernelSpec> resolve_centers(const TimeSeries& series,
                                        const std::vector<Timestamp>& dates,
                                        double sigma);

}  // namespace pichange
