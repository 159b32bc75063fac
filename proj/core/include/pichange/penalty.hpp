#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pichange/time_series.hpp"

namespace pichange {

/// One Gaussian bump of prior support centered at a series index.
struct KernelSpec {
  std::size_t center = 1;  // 1-based, within [1, N]
  double spread = 30.0;    // sigma, in index units; > 0
};

/// kappa(t) = exp(-(t - c)^2 / (2 sigma^2)), in (0, 1], equal to 1 at the center.
double kernel_value(const KernelSpec& kernel, std::size_t t);

/// Noisy-OR complement S(t) = prod_i (1 - kappa_i(t)). The empty product is 1;
/// S(t) is exactly 0 at every kernel center.
double support_complement(const std::vector<KernelSpec>& kernels, std::size_t t);

/// Precomputed time-varying penalty g(t) = lambda * S(t) + beta for t = 1..N,
/// together with the recipe that produced it. Immutable after construction.
class PenaltyProfile {
 public:
  PenaltyProfile() = default;

  double beta() const { return beta_; }
  double lambda() const { return lambda_; }
  const std::vector<KernelSpec>& kernels() const { return kernels_; }
  std::size_t size() const { return g_.size(); }

  /// g(t) for 1 <= t <= N.
  double at(std::size_t t) const { return g_[t - 1]; }
  const std::vector<double>& values() const { return g_; }

  friend PenaltyProfile build_profile(std::size_t n, std::vector<KernelSpec> kernels,
                                      double lambda, double beta);

 private:
  double beta_ = 0.0;
  double lambda_ = 0.0;
  std::vector<KernelSpec> kernels_;
  std::vector<double> g_;
};

/// Builds the dense penalty vector. Throws std::out_of_range when a kernel
/// center exceeds n, std::domain_error for beta <= 0, lambda < 0, or a
/// non-positive spread.
PenaltyProfile build_profile(std::size_t n, std::vector<KernelSpec> kernels,
                             double lambda, double beta);

/// Default prior strength: lambda = beta, so the maximum uplift matches the
/// baseline penalty.
double default_lambda(double beta);

/// Modified BIC baseline penalty (n_params + 2) * ln(n). Requires n >= 2.
double modified_bic_beta(double n, std::size_t n_params);

/// Declarative penalty recipe as exchanged on disk:
///   {"beta": real | "mbic", "lambda": real | "auto",
///    "centers": [index or ISO-8601 date], "sigma": real}
struct PenaltyRecipe {
  std::optional<double> beta;    // nullopt means "mbic"
  std::optional<double> lambda;  // nullopt means "auto" (lambda = beta)
  std::vector<std::string> centers;
  double sigma = 30.0;
};

PenaltyRecipe parse_penalty_recipe(const std::string& json_text);
std::string to_json(const PenaltyRecipe& recipe);

/// Resolves a recipe against a concrete series: "mbic" becomes
/// modified_bic_beta(N, n_params), "auto" becomes default_lambda(beta), and
/// date centers are mapped to indices via index_of_timestamp.
PenaltyProfile resolve_recipe(const PenaltyRecipe& recipe, const TimeSeries& series,
                              std::size_t n_params);

}  // namespace pichange
