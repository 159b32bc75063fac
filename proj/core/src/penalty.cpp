#include "pichange/penalty.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace pichange {

double kernel_value(const KernelSpec& kernel, std::size_t t) {
  const double dt = static_cast<double>(t) - static_cast<double>(kernel.center);
  return std::exp(-(dt * dt) / (2.0 * kernel.spread * kernel.spread));
}

double support_complement(const std::vector<KernelSpec>& kernels, std::size_t t) {
  double s = 1.0;
  for (const auto& k : kernels) s *= 1.0 - kernel_value(k, t);
  return s;
}

PenaltyProfile build_profile(std::size_t n, std::vector<KernelSpec> kernels,
                             double lambda, double beta) {
  if (n == 0) throw std::domain_error("penalty profile length must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("baseline penalty beta must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("prior strength lambda must be nonnegative");
  }
  for (const auto& k : kernels) {
    if (k.center < 1 || k.center > n) {
      throw std::out_of_range("kernel center " + std::to_string(k.center) +
                              " outside [1, " + std::to_string(n) + "]");
    }
    if (!(k.spread > 0.0) || !std::isfinite(k.spread)) {
      throw std::domain_error("kernel spread must be positive");
    }
  }
  PenaltyProfile profile;
  profile.beta_ = beta;
  profile.lambda_ = lambda;
  profile.kernels_ = std::move(kernels);
  profile.g_.resize(n);
  for (std::size_t t = 1; t <= n; ++t) {
    profile.g_[t - 1] = lambda * support_complement(profile.kernels_, t) + beta;
  }
  return profile;
}

double default_lambda(double beta) { return beta; }

double modified_bic_beta(double n, std::size_t n_params) {
  if (!(n >= 2.0)) throw std::domain_error("modified BIC requires n >= 2");
  return (static_cast<double>(n_params) + 2.0) * std::log(n);
}

namespace {

bool is_index_token(const std::string& token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

PenaltyRecipe parse_penalty_recipe(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  PenaltyRecipe recipe;
  if (j.contains("beta")) {
    if (j["beta"].is_string()) {
      if (j["beta"] != "mbic") {
        throw std::invalid_argument("beta must be a number or \"mbic\"");
      }
    } else {
      recipe.beta = j["beta"].get<double>();
    }
  }
  if (j.contains("lambda")) {
    if (j["lambda"].is_string()) {
      if (j["lambda"] != "auto") {
        throw std::invalid_argument("lambda must be a number or \"auto\"");
      }
    } else {
      recipe.lambda = j["lambda"].get<double>();
    }
  }
  if (j.contains("centers")) {
    for (const auto& c : j["centers"]) {
      if (c.is_number_integer()) {
        recipe.centers.push_back(std::to_string(c.get<std::int64_t>()));
      } else if (c.is_string()) {
        recipe.centers.push_back(c.get<std::string>());
      } else {
        throw std::invalid_argument("centers must be indices or ISO-8601 dates");
      }
    }
  }
  if (j.contains("sigma")) recipe.sigma = j["sigma"].get<double>();
  return recipe;
}

std::string to_json(const PenaltyRecipe& recipe) {
  nlohmann::json j;
  if (recipe.beta) {
    j["beta"] = *recipe.beta;
  } else {
    j["beta"] = "mbic";
  }
  if (recipe.lambda) {
    j["lambda"] = *recipe.lambda;
  } else {
    j["lambda"] = "auto";
  }
  j["centers"] = nlohmann::json::array();
  for (const auto& c : recipe.centers) {
    if (is_index_token(c)) {
      j["centers"].push_back(std::stoull(c));
    } else {
      j["centers"].push_back(c);
    }
  }
  j["sigma"] = recipe.sigma;
  return j.dump();
}

PenaltyProfile resolve_recipe(const PenaltyRecipe& recipe, const TimeSeries& series,
                              std::size_t n_params) {
  const std::size_t n = series.size();
  const double beta =
      recipe.beta ? *recipe.beta : modified_bic_beta(static_cast<double>(n), n_params);
  const double lambda = recipe.lambda ? *recipe.lambda : default_lambda(beta);
  std::vector<KernelSpec> kernels;
  kernels.reserve(recipe.centers.size());
  for (const auto& token : recipe.centers) {
    std::size_t center;
    if (is_index_token(token)) {
      center = std::stoull(token);
    } else {
      center = index_of_timestamp(series, parse_timestamp(token));
    }
    kernels.push_back({center, recipe.sigma});
  }
  return build_profile(n, std::move(kernels), lambda, beta);
}

}  // namespace pichange
