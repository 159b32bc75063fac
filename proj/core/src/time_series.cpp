#include "pichange/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace pichange {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// civil-from-days algorithm and its inverse).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = yr + (m <= 2);
}

bool valid_date(std::int64_t y, unsigned m, unsigned d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  unsigned max_d = lengths[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) max_d = 29;
  return d <= max_d;
}

Timestamp make_timestamp(std::int64_t y, unsigned mo, unsigned d, unsigned h, unsigned mi,
                         unsigned s, const std::string& text) {
  if (!valid_date(y, mo, d) || h > 23 || mi > 59 || s > 60) {
    throw std::invalid_argument("invalid calendar instant: '" + text + "'");
  }
  return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

bool read_digits(const std::string& text, std::size_t& pos, unsigned width_min,
                 unsigned width_max, std::int64_t& out) {
  std::size_t start = pos;
  std::int64_t value = 0;
  while (pos < text.size() && pos - start < width_max &&
         text[pos] >= '0' && text[pos] <= '9') {
    value = value * 10 + (text[pos] - '0');
    ++pos;
  }
  if (pos - start < width_min) return false;
  out = value;
  return true;
}

}  // namespace

Timestamp parse_timestamp(const std::string& text, const std::string& format) {
  std::size_t pos = 0;
  std::int64_t year = 1970;
  std::int64_t month = 1, day = 1, hour = 0, minute = 0, second = 0;
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      const char code = format[++f];
      bool ok = false;
      switch (code) {
        case 'Y': ok = read_digits(text, pos, 1, 5, year); break;
        case 'm': ok = read_digits(text, pos, 1, 2, month); break;
        case 'd': ok = read_digits(text, pos, 1, 2, day); break;
        case 'H': ok = read_digits(text, pos, 1, 2, hour); break;
        case 'M': ok = read_digits(text, pos, 1, 2, minute); break;
        case 'S': ok = read_digits(text, pos, 1, 2, second); break;
        case '%': ok = pos < text.size() && text[pos++] == '%'; break;
        default:
          throw std::invalid_argument(std::string("unsupported date format code %") + code);
      }
      if (!ok) {
        throw std::invalid_argument("'" + text + "' does not match format '" + format + "'");
      }
    } else {
      if (pos >= text.size() || text[pos] != format[f]) {
        throw std::invalid_argument("'" + text + "' does not match format '" + format + "'");
      }
      ++pos;
    }
  }
  if (pos != text.size()) {
    throw std::invalid_argument("trailing characters in instant '" + text + "'");
  }
  return make_timestamp(year, static_cast<unsigned>(month), static_cast<unsigned>(day),
                        static_cast<unsigned>(hour), static_cast<unsigned>(minute),
                        static_cast<unsigned>(second), text);
}

Timestamp parse_timestamp(const std::string& text) {
  if (text.size() > 10 && (text[10] == 'T' || text[10] == ' ')) {
    const std::string fmt = text[10] == 'T' ? "%Y-%m-%dT%H:%M:%S" : "%Y-%m-%d %H:%M:%S";
    return parse_timestamp(text, fmt);
  }
  return parse_timestamp(text, "%Y-%m-%d");
}

std::string format_timestamp(Timestamp t) {
  std::int64_t days = t / kSecondsPerDay;
  std::int64_t rem = t % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  if (rem == 0) {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  } else {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02u:%02u:%02u",
                  static_cast<long long>(y), m, d,
                  static_cast<unsigned>(rem / 3600), static_cast<unsigned>(rem % 3600 / 60),
                  static_cast<unsigned>(rem % 60));
  }
  return buf;
}

TimeSeries::TimeSeries(std::vector<double> values, std::string unit_label)
    : values_(std::move(values)), unit_label_(std::move(unit_label)) {
  if (values_.empty()) throw std::invalid_argument("series must contain at least one value");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("series values must be finite");
  }
}

TimeSeries::TimeSeries(std::vector<double> values, std::vector<Timestamp> timestamps,
                       std::string unit_label)
    : TimeSeries(std::move(values), std::move(unit_label)) {
  if (timestamps.size() != values_.size()) {
    throw std::invalid_argument("timestamps must align 1:1 with values");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] <= timestamps[i - 1]) {
      throw std::invalid_argument("timestamps must be strictly increasing");
    }
  }
  timestamps_ = std::move(timestamps);
}

std::size_t index_of_timestamp(const TimeSeries& series, Timestamp instant) {
  if (!series.has_timestamps()) {
    throw std::invalid_argument("series carries no timestamps");
  }
  const auto& ts = series.timestamps();
  if (instant < ts.front() || instant > ts.back()) {
    throw std::out_of_range("instant " + format_timestamp(instant) +
                            " outside series range [" + format_timestamp(ts.front()) +
                            ", " + format_timestamp(ts.back()) + "]");
  }
  const auto it = std::lower_bound(ts.begin(), ts.end(), instant);
  std::size_t idx = static_cast<std::size_t>(it - ts.begin());  // 0-based, *it >= instant
  if (it != ts.begin()) {
    const Timestamp after = *it;
    const Timestamp before = *(it - 1);
    if (instant - before <= after - instant) --idx;  // ties toward the earlier index
  }
  return idx + 1;
}

std::string to_string(CpLabel label) {
  switch (label) {
    case CpLabel::WithinDay: return "within_day";
    case CpLabel::SleepOnset: return "sleep_onset";
    case CpLabel::WakeOnset: return "wake_onset";
  }
  throw std::logic_error("unreachable");
}

CpLabel cp_label_from_string(const std::string& name) {
  if (name == "within_day") return CpLabel::WithinDay;
  if (name == "sleep_onset") return CpLabel::SleepOnset;
  if (name == "wake_onset") return CpLabel::WakeOnset;
  throw std::invalid_argument("unknown change-point label '" + name + "'");
}

}  // namespace pichange
