#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pichange/time_series.hpp"

using namespace pichange;

namespace {

// Daily timestamps covering [first, first + days).
std::vector<Timestamp> daily(Timestamp first, std::size_t days) {
  std::vector<Timestamp> ts(days);
  for (std::size_t i = 0; i < days; ++i) ts[i] = first + static_cast<Timestamp>(i) * 86400;
  return ts;
}

}  // namespace

TEST_CASE("series construction validates its invariants") {
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(TimeSeries({1.0, std::numeric_limits<double>::quiet_NaN()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TimeSeries({1.0, std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TimeSeries({1.0, 2.0}, std::vector<Timestamp>{0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeSeries({1.0, 2.0}, std::vector<Timestamp>{100, 100}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TimeSeries({1.0, 2.0}, std::vector<Timestamp>{200, 100}),
                  std::invalid_argument);

  const TimeSeries s({3.0, 1.0, 4.0}, {10, 20, 30}, "days");
  CHECK(s.size() == 3);
  CHECK(s.value(1) == 3.0);
  CHECK(s.value(3) == 4.0);
  CHECK(s.timestamp(2) == 20);
  CHECK(s.unit_label() == "days");
}

TEST_CASE("timestamp parsing and formatting round-trip") {
  CHECK(parse_timestamp("1970-01-01") == 0);
  CHECK(parse_timestamp("1970-01-02") == 86400);
  CHECK(parse_timestamp("1969-12-31") == -86400);
  CHECK(parse_timestamp("2005-08-26T12:30:05") ==
        parse_timestamp("2005-08-26") + 12 * 3600 + 30 * 60 + 5);
  CHECK(parse_timestamp("2005-08-26 12:30:05") ==
        parse_timestamp("2005-08-26T12:30:05"));
  CHECK(format_timestamp(parse_timestamp("2005-08-26")) == "2005-08-26");
  CHECK(format_timestamp(parse_timestamp("2005-08-26T12:30:05")) ==
        "2005-08-26T12:30:05");
  CHECK(format_timestamp(parse_timestamp("1914-07-28")) == "1914-07-28");

  CHECK(parse_timestamp("26/08/2005", "%d/%m/%Y") == parse_timestamp("2005-08-26"));
  CHECK(parse_timestamp("1914", "%Y") == parse_timestamp("1914-01-01"));

  CHECK_THROWS_AS(parse_timestamp("not-a-date"), std::invalid_argument);
  CHECK_THROWS_AS(parse_timestamp("2001-02-30"), std::invalid_argument);
  CHECK_THROWS_AS(parse_timestamp("2001-13-01"), std::invalid_argument);
  CHECK_THROWS_AS(parse_timestamp("2001-01-01junk"), std::invalid_argument);
}

TEST_CASE("index_of_timestamp finds the nearest index") {
  const auto ts = daily(parse_timestamp("2020-01-01"), 10);
  std::vector<double> values(10, 1.0);
  const TimeSeries s(values, ts);

  SUBCASE("exact match") { CHECK(index_of_timestamp(s, s.timestamp(5)) == 5); }
  SUBCASE("midway ties toward the earlier index") {
    const Timestamp mid = (s.timestamp(5) + s.timestamp(6)) / 2;
    CHECK(index_of_timestamp(s, mid) == 5);
  }
  SUBCASE("just past midway rounds up") {
    const Timestamp mid = (s.timestamp(5) + s.timestamp(6)) / 2;
    CHECK(index_of_timestamp(s, mid + 1) == 6);
  }
  SUBCASE("range errors") {
    CHECK_THROWS_AS(index_of_timestamp(s, ts.front() - 1), std::out_of_range);
    CHECK_THROWS_AS(index_of_timestamp(s, ts.back() + 1), std::out_of_range);
  }
  SUBCASE("untimed series is unsupported") {
    const TimeSeries untimed(values);
    CHECK_THROWS_AS(index_of_timestamp(untimed, ts.front()), std::invalid_argument);
  }
}

TEST_CASE("index_of_timestamp agrees with a linear scan on a decade of days") {
  const Timestamp first = parse_timestamp("2000-01-01");
  const Timestamp last = parse_timestamp("2009-12-31");
  const std::size_t days = static_cast<std::size_t>((last - first) / 86400) + 1;
  std::vector<double> values(days, 0.0);
  const TimeSeries s(values, daily(first, days));

  auto linear_scan = [&](Timestamp instant) {
    std::size_t best = 1;
    Timestamp best_d = std::numeric_limits<Timestamp>::max();
    for (std::size_t i = 1; i <= s.size(); ++i) {
      const Timestamp d = std::llabs(s.timestamp(i) - instant);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };

  const Timestamp probe = parse_timestamp("2005-08-26");
  CHECK(index_of_timestamp(s, probe) == linear_scan(probe));
  CHECK(index_of_timestamp(s, probe + 3600) == linear_scan(probe + 3600));
  for (Timestamp t : {first, last, first + 86400 * 100 + 43200, last - 7 * 86400 + 1}) {
    CHECK(index_of_timestamp(s, t) == linear_scan(t));
  }
}

TEST_CASE("cp labels round-trip through their names") {
  for (CpLabel label : {CpLabel::WithinDay, CpLabel::SleepOnset, CpLabel::WakeOnset}) {
    CHECK(cp_label_from_string(to_string(label)) == label);
  }
  CHECK_THROWS_AS(cp_label_from_string("nonsense"), std::invalid_argument);
}
