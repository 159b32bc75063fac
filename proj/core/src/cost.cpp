#include "pichange/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pichange {

std::string to_string(CostModel model) {
  return model == CostModel::GaussianNLL ? "gaussian" : "zag";
}

CostModel cost_model_from_string(const std::string& name) {
  if (name == "gaussian") return CostModel::GaussianNLL;
  if (name == "zag") return CostModel::ZagNLL;
  throw std::invalid_argument("unknown cost model '" + name + "'");
}

namespace {

// Neumaier running sum; prefix[i] is the compensated sum of the first i terms.
template <typename Fn>
std::vector<double> compensated_prefix(const std::vector<double>& values, Fn&& term) {
  std::vector<double> prefix(values.size() + 1, 0.0);
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = term(values[i]);
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
    prefix[i + 1] = sum + comp;
  }
  return prefix;
}

}  // namespace

std::size_t CostCache::min_segment_length() const {
  return model_ == CostModel::GaussianNLL ? 2 : 1;
}

double CostCache::segment_cost(std::size_t s, std::size_t t) const {
  return model_ == CostModel::GaussianNLL ? gaussian_segment_cost(*this, s, t)
                                          : zag_segment_cost(*this, s, t);
}

CostCache build_cache(const TimeSeries& series, CostModel model,
                      std::optional<double> shape) {
  const auto& values = series.values();
  CostCache cache;
  cache.model_ = model;
  cache.n_ = values.size();
  cache.cum_sum_ = compensated_prefix(values, [](double y) { return y; });

  if (model == CostModel::GaussianNLL) {
    cache.cum_sumsq_ = compensated_prefix(values, [](double y) { return y * y; });
    const double n = static_cast<double>(values.size());
    const double mean = cache.cum_sum_.back() / n;
    const double var = std::max(cache.cum_sumsq_.back() / n - mean * mean, 0.0);
    cache.var_floor_ = 1e-8 * std::max(var, 1e-12);
    return cache;
  }

  cache.cum_zero_count_.assign(values.size() + 1, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) {
      throw std::domain_error("ZAG cost requires nonnegative values (row " +
                              std::to_string(i + 1) + ")");
    }
    cache.cum_zero_count_[i + 1] = cache.cum_zero_count_[i] + (values[i] == 0.0 ? 1 : 0);
  }
  cache.cum_log_pos_ =
      compensated_prefix(values, [](double y) { return y > 0.0 ? std::log(y) : 0.0; });
  cache.shape_ = shape ? *shape : estimate_shape(series);
  if (!(cache.shape_ > 0.0) || !std::isfinite(cache.shape_)) {
    throw std::domain_error("ZAG shape must be positive");
  }
  cache.log_gamma_shape_ = std::lgamma(cache.shape_);
  return cache;
}

double gaussian_segment_cost(const CostCache& cache, std::size_t s, std::size_t t) {
  if (cache.model_ != CostModel::GaussianNLL) {
    throw std::invalid_argument("cache was not built for the Gaussian cost");
  }
  if (s < 1 || t > cache.n_ || s > t) throw std::out_of_range("bad segment bounds");
  const std::size_t len = t - s + 1;
  if (len < 2) throw std::length_error("Gaussian segment cost needs length >= 2");
  const double n = static_cast<double>(len);
  const double sum = cache.cum_sum_[t] - cache.cum_sum_[s - 1];
  const double sumsq = cache.cum_sumsq_[t] - cache.cum_sumsq_[s - 1];
  double var = (sumsq - sum * sum / n) / n;
  if (!(var > cache.var_floor_)) var = cache.var_floor_;
  return 0.5 * n * std::log(var) + 0.5 * n;
}

double zag_segment_cost(const CostCache& cache, std::size_t s, std::size_t t) {
  if (cache.model_ != CostModel::ZagNLL) {
    throw std::invalid_argument("cache was not built for the ZAG cost");
  }
  if (s < 1 || t > cache.n_ || s > t) throw std::out_of_range("bad segment bounds");
  const double n = static_cast<double>(t - s + 1);
  const double n_zero = static_cast<double>(cache.cum_zero_count_[t] - cache.cum_zero_count_[s - 1]);
  const double n_pos = n - n_zero;
  const double p_hat =
      std::clamp(n_zero / n, CostCache::kZeroProbClamp, 1.0 - CostCache::kZeroProbClamp);
  double cost = -(n_zero * std::log(p_hat) + n_pos * std::log(1.0 - p_hat));
  if (n_pos > 0.0) {
    const double pos_sum = cache.cum_sum_[t] - cache.cum_sum_[s - 1];
    const double log_sum = cache.cum_log_pos_[t] - cache.cum_log_pos_[s - 1];
    const double xi = cache.shape_;
    const double theta_hat = std::max(pos_sum / n_pos / xi, CostCache::kScaleFloor);
    cost += n_pos * (cache.log_gamma_shape_ + xi * std::log(theta_hat)) -
            (xi - 1.0) * log_sum + pos_sum / theta_hat;
  }
  return cost;
}

double estimate_shape(const TimeSeries& series) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double y : series.values()) {
    if (y > 0.0) {
      sum += y;
      ++count;
    }
  }
  if (count < 2) {
    throw std::invalid_argument("shape estimation needs at least two positive values");
  }
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (double y : series.values()) {
    if (y > 0.0) ss += (y - mean) * (y - mean);
  }
  const double var = ss / static_cast<double>(count - 1);  // unbiased convention
  if (var <= 0.0) return 100.0;
  return std::clamp(mean * mean / var, 0.01, 100.0);
}

}  // namespace pichange
