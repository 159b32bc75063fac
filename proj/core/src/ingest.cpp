#include "pichange/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pichange {

std::string to_string(Transform transform) {
  switch (transform) {
    case Transform::Identity: return "identity";
    case Transform::AbsDiff: return "absdiff";
    case Transform::LogScale: return "logscale";
  }
  throw std::logic_error("unreachable");
}

Transform transform_from_string(const std::string& name) {
  if (name == "identity") return Transform::Identity;
  if (name == "absdiff") return Transform::AbsDiff;
  if (name == "logscale") return Transform::LogScale;
  throw std::invalid_argument("unknown transform '" + name + "'");
}

namespace {

std::vector<std::string> split_row(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Resolves a header name or 1-based position token to a column index.
std::size_t resolve_column(const std::vector<std::string>& header,
                           const std::string& token, const std::string& role) {
  if (token.empty()) throw std::invalid_argument("no " + role + " column given");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == token) return i;
  }
  const bool numeric = std::all_of(token.begin(), token.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
  if (numeric) {
    const std::size_t pos = std::stoull(token);
    if (pos >= 1 && pos <= header.size()) return pos - 1;
  }
  throw std::invalid_argument(role + " column '" + token + "' not found in header");
}

}  // namespace

LoadResult load_csv(const std::filesystem::path& path, const ColumnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_row(line, spec.delimiter);

  const std::size_t value_col = resolve_column(header, spec.value_column, "value");
  const bool timed = !spec.time_column.empty();
  const std::size_t time_col =
      timed ? resolve_column(header, spec.time_column, "time") : 0;

  struct Row {
    Timestamp time;
    double value;
  };
  std::vector<Row> rows;
  std::size_t dropped = 0;
  std::size_t row_number = 1;  // header row is 1
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_row(line, spec.delimiter);
    if (fields.size() <= value_col || (timed && fields.size() <= time_col)) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row_number) +
                               " has too few columns");
    }
    const std::string value_text = trimmed(fields[value_col]);
    if (value_text.empty()) {
      ++dropped;
      continue;
    }
    char* end = nullptr;
    const double value = std::strtod(value_text.c_str(), &end);
    if (end == value_text.c_str() || *end != '\0') {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row_number) +
                               ": cannot parse value '" + value_text + "'");
    }
    Timestamp time = 0;
    if (timed) {
      const std::string time_text = trimmed(fields[time_col]);
      try {
        time = spec.date_format.empty() ? parse_timestamp(time_text)
                                        : parse_timestamp(time_text, spec.date_format);
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path.string() + ": row " + std::to_string(row_number) +
                                 ": " + e.what());
      }
    }
    rows.push_back({time, value});
  }
  if (rows.empty()) throw std::runtime_error(path.string() + " contains no data rows");

  if (timed) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].time == rows[i - 1].time) {
        throw std::invalid_argument(path.string() + ": duplicate timestamp " +
                                    format_timestamp(rows[i].time));
      }
    }
  }

  std::vector<double> values;
  std::vector<Timestamp> times;
  values.reserve(rows.size());
  times.reserve(rows.size());
  switch (spec.transform) {
    case Transform::Identity:
      for (const auto& r : rows) {
        values.push_back(r.value);
        times.push_back(r.time);
      }
      break;
    case Transform::AbsDiff:
      if (rows.size() < 2) {
        throw std::invalid_argument("absdiff needs at least two rows");
      }
      for (std::size_t i = 1; i < rows.size(); ++i) {
        values.push_back(std::abs(rows[i].value - rows[i - 1].value));
        times.push_back(rows[i].time);
      }
      break;
    case Transform::LogScale:
      for (const auto& r : rows) {
        if (!(r.value > 0.0)) {
          throw std::domain_error("logscale requires positive values, got " +
                                  std::to_string(r.value));
        }
        values.push_back(std::log(r.value));
        times.push_back(r.time);
      }
      break;
  }

  LoadResult result{timed ? TimeSeries(std::move(values), std::move(times))
                          : TimeSeries(std::move(values)),
                    dropped};
  return result;
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  char buf[32];
  if (series.has_timestamps()) {
    out << "time,value\n";
    for (std::size_t t = 1; t <= series.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%.17g", series.value(t));
      out << format_timestamp(series.timestamp(t)) << ',' << buf << '\n';
    }
  } else {
    out << "index,value\n";
    for (std::size_t t = 1; t <= series.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%.17g", series.value(t));
      out << t << ',' << buf << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<KernelSpec> resolve_centers(const TimeSeries& series,
                                        const std::vector<Timestamp>& dates,
                                        double sigma) {
  std::vector<KernelSpec> kernels;
  kernels.reserve(dates.size());
  for (Timestamp date : dates) {
    try {
      kernels.push_back({index_of_timestamp(series, date), sigma});
    } catch (const std::out_of_range&) {
      throw std::out_of_range("penalty center " + format_timestamp(date) +
                              " outside the series time range");
    }
  }
  return kernels;
}

}  // namespace pichange
