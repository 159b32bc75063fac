#include <doctest.h>

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "pichange/cost.hpp"

using namespace pichange;

namespace {

std::vector<double> random_gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(2.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

std::vector<double> random_zag(std::size_t n, std::mt19937_64& rng, double p = 0.3,
                               double shape = 0.9, double scale = 50.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::gamma_distribution<double> gamma(shape, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng) < p ? 0.0 : gamma(rng);
  return v;
}

}  // namespace

TEST_CASE("prefix statistics match their definitions") {
  const TimeSeries s({0.0, 1.0, 2.0});
  const CostCache gaussian = build_cache(s, CostModel::GaussianNLL);
  CHECK(gaussian.cum_sum() == std::vector<double>{0.0, 0.0, 1.0, 3.0});
  CHECK(gaussian.cum_sumsq() == std::vector<double>{0.0, 0.0, 1.0, 5.0});

  const CostCache zag = build_cache(s, CostModel::ZagNLL, 1.0);
  CHECK(zag.cum_zero_count() == std::vector<std::int64_t>{0, 1, 1, 1});
  CHECK(zag.cum_log_pos()[3] == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(build_cache(TimeSeries({1.0, -0.5}), CostModel::ZagNLL, 1.0),
                  std::domain_error);
}

TEST_CASE("cache segment sums agree with direct summation") {
  std::mt19937_64 rng(7);
  const auto values = random_zag(1000, rng);
  const TimeSeries s(values);
  const CostCache cache = build_cache(s, CostModel::ZagNLL, 1.0);
  std::uniform_int_distribution<std::size_t> pick(1, 1000);
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a > b) std::swap(a, b);
    double direct = 0.0;
    for (std::size_t t = a; t <= b; ++t) direct += values[t - 1];
    const double cached = cache.cum_sum()[b] - cache.cum_sum()[a - 1];
    CHECK(cached == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("gaussian segment cost") {
  SUBCASE("constant segment engages the variance floor") {
    const TimeSeries s({5.0, 5.0, 5.0, 5.0});
    const CostCache cache = build_cache(s, CostModel::GaussianNLL);
    CHECK(cache.var_floor() == doctest::Approx(1e-20).epsilon(1e-9));
    CHECK(gaussian_segment_cost(cache, 1, 4) ==
          doctest::Approx(2.0 * std::log(cache.var_floor()) + 2.0).epsilon(1e-12));
  }
  SUBCASE("unit variance pair") {
    const TimeSeries s({0.0, 2.0, 7.0});
    const CostCache cache = build_cache(s, CostModel::GaussianNLL);
    CHECK(gaussian_segment_cost(cache, 1, 2) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("length below two is rejected") {
    const TimeSeries s({0.0, 2.0, 7.0});
    const CostCache cache = build_cache(s, CostModel::GaussianNLL);
    CHECK_THROWS_AS(gaussian_segment_cost(cache, 2, 2), std::length_error);
  }
  SUBCASE("random segments match the pointwise-density reference") {
    std::mt19937_64 rng(11);
    const auto values = random_gaussian(300, rng);
    const TimeSeries s(values);
    const CostCache cache = build_cache(s, CostModel::GaussianNLL);
    std::uniform_int_distribution<std::size_t> pick(1, 300);
    for (int rep = 0; rep < 200; ++rep) {
      std::size_t a = pick(rng), b = pick(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 1) continue;
      const double expected = oracles::gaussian_nll_pointwise(
          std::span(values).subspan(a - 1, b - a + 1), cache.var_floor());
      CHECK(gaussian_segment_cost(cache, a, b) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("zag segment cost") {
  SUBCASE("all-zero segment is a clamped Bernoulli term") {
    const TimeSeries s({0.0, 0.0, 0.0, 0.0});
    const CostCache cache = build_cache(s, CostModel::ZagNLL, 1.0);
    CHECK(zag_segment_cost(cache, 1, 4) ==
          doctest::Approx(-4.0 * std::log(1.0 - 1e-6)).epsilon(1e-12));
  }
  SUBCASE("closed form on a half-zero segment") {
    const TimeSeries s({0.0, 0.0, 3.0, 3.0});
    const CostCache cache = build_cache(s, CostModel::ZagNLL, 1.0);
    CHECK(zag_segment_cost(cache, 1, 4) ==
          doctest::Approx(4.0 * std::log(2.0) + 2.0 * std::log(3.0) + 2.0).epsilon(1e-12));
  }
  SUBCASE("random segments match the pointwise-density reference") {
    std::mt19937_64 rng(13);
    const auto values = random_zag(400, rng);
    const TimeSeries s(values);
    const CostCache cache = build_cache(s, CostModel::ZagNLL, 0.9);
    std::uniform_int_distribution<std::size_t> pick(1, 400);
    for (int rep = 0; rep < 200; ++rep) {
      std::size_t a = pick(rng), b = pick(rng);
      if (a > b) std::swap(a, b);
      const double expected =
          oracles::zag_nll_pointwise(std::span(values).subspan(a - 1, b - a + 1), 0.9);
      CHECK(zag_segment_cost(cache, a, b) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  SUBCASE("all-positive segment reduces to the Gamma NLL") {
    std::mt19937_64 rng(17);
    const auto values = random_zag(200, rng, /*p=*/0.0);
    const TimeSeries s(values);
    const CostCache cache = build_cache(s, CostModel::ZagNLL, 0.9);
    const double cost = zag_segment_cost(cache, 1, 200);
    // recompute the pure Gamma NLL at the fitted scale
    double pos_sum = 0.0, log_sum = 0.0;
    for (double y : values) {
      pos_sum += y;
      log_sum += std::log(y);
    }
    const double xi = 0.9;
    const double theta = pos_sum / 200.0 / xi;
    const double gamma_nll =
        200.0 * (std::lgamma(xi) + xi * std::log(theta)) - (xi - 1.0) * log_sum +
        pos_sum / theta;
    const double bernoulli_bound = 200.0 * std::abs(std::log(1.0 - 1e-6));
    CHECK(std::abs(cost - gamma_nll) <= bernoulli_bound + 1e-9);
  }
}

TEST_CASE("estimate_shape method of moments") {
  SUBCASE("identical positives clamp to the upper bound") {
    CHECK(estimate_shape(TimeSeries({2.0, 2.0, 2.0, 0.0})) == 100.0);
  }
  SUBCASE("hand-computed pair") {
    CHECK(estimate_shape(TimeSeries({1.0, 3.0})) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(estimate_shape(TimeSeries({0.0, 1.0, 0.0, 3.0})) ==
          doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("recovers the shape of a seeded Gamma sample") {
    std::mt19937_64 rng(19);
    std::gamma_distribution<double> gamma(1.0, 100.0);
    std::vector<double> values(100000);
    for (auto& v : values) v = gamma(rng);
    CHECK(estimate_shape(TimeSeries(values)) == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("needs at least two positives") {
    CHECK_THROWS_AS(estimate_shape(TimeSeries({0.0, 0.0, 1.0})), std::invalid_argument);
  }
}

TEST_CASE("split costs never exceed the merged cost at K = 0") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 20 + rng() % 200;
    const auto g_values = random_gaussian(n, rng);
    const auto z_values = random_zag(n, rng);
    const CostCache gaussian = build_cache(TimeSeries(g_values), CostModel::GaussianNLL);
    const CostCache zag = build_cache(TimeSeries(z_values), CostModel::ZagNLL, 0.9);

    std::uniform_int_distribution<std::size_t> pick(1, n);
    for (int tries = 0; tries < 30; ++tries) {
      std::size_t s = pick(rng), u = pick(rng), t = pick(rng);
      if (s > t) std::swap(s, t);
      if (u <= s || u >= t) continue;
      if (u - s + 1 >= 2 && t - u >= 2 && t - s + 1 >= 2) {
        CHECK(gaussian_segment_cost(gaussian, s, u) + gaussian_segment_cost(gaussian, u + 1, t) <=
              gaussian_segment_cost(gaussian, s, t) + 1e-9);
      }
      CHECK(zag_segment_cost(zag, s, u) + zag_segment_cost(zag, u + 1, t) <=
            zag_segment_cost(zag, s, t) + 1e-9);
    }
  }
}
