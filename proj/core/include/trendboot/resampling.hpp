#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "trendboot/rng.hpp"

// Bootstrap engines for the uncertainty of a trend slope: Efron residual
// resampling, the wild (independently weighted) bootstrap, the dependent
// weighted bootstrap with AR(1) or Bartlett-kernel weights, and the circular
// moving-block bootstrap.
namespace trendboot::resampling {

// ---------------------------------------------------------------------------
// Weight processes. Every kind has mean 0 and variance 1 marginally.

struct IidRademacher {};
struct IidNormal {};

// w_1 ~ N(0,1), w_{i+1} = r*w_i + sqrt(1 - r^2)*eta_i
struct Ar1Weights {
  double r = 0.0;
};

// Multivariate normal with cov(w_i, w_j) = max(0, 1 - |i - j| / bandwidth).
struct KernelMvn {
  std::size_t bandwidth = 25;
};

using WeightProcess = std::variant<IidRademacher, IidNormal, Ar1Weights, KernelMvn>;

[[nodiscard]] std::string describe(const WeightProcess& process);

/// Draws weight sequences of a fixed length. The Bartlett covariance is
/// factorized once (banded Cholesky) and reused for every draw.
class WeightGenerator {
 public:
  WeightGenerator(const WeightProcess& process, std::size_t n);
  ~WeightGenerator();
  WeightGenerator(WeightGenerator&&) noexcept;
  WeightGenerator& operator=(WeightGenerator&&) noexcept;

  void fill(std::span<double> out, Engine& engine) const;
  [[nodiscard]] std::size_t size() const noexcept { return n_; }

 private:
  struct KernelFactor;
  WeightProcess process_;
  std::size_t n_;
  std::unique_ptr<KernelFactor> kernel_;
};

/// Deterministic per seed. Throws FactorizationError if the kernel
/// covariance cannot be factorized.
[[nodiscard]] std::vector<double> generate_weights(const WeightProcess& process, std::size_t n,
                                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bootstrap of the trend slope.

enum class Method { efron, wild, dep_wild_ar1, dep_wild_kernel, moving_block };

[[nodiscard]] std::string_view to_string(Method method);
[[nodiscard]] Method parse_method(std::string_view name);

inline constexpr std::array<double, 7> kQuantileLevels{0.025, 0.05, 0.25, 0.5, 0.75, 0.95, 0.975};

struct BootstrapConfig {
  Method method = Method::wild;
  std::size_t replicates = 500;
  // Required for wild (iid kinds), dep_wild_ar1 (Ar1Weights) and
  // dep_wild_kernel (KernelMvn); must be empty otherwise.
  std::optional<WeightProcess> weights;
  // moving_block only; nullopt selects the Politis-White length.
  std::optional<std::size_t> block_length;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  // Throws std::invalid_argument on inconsistent method/parameter pairs.
  void validate() const;
};

struct BootstrapResult {
  double point_estimate = 0.0;
  std::vector<double> slope_replicates;
  std::vector<std::pair<double, double>> quantiles;  // (level, value), ascending level
  std::size_t block_length = 0;                      // moving_block only

  [[nodiscard]] double quantile_at(double level) const;
};

/// Residual bootstrap around the fitted line a*t + b. Replicate i draws
/// from its own substream of (seed, i), so results are independent of the
/// thread count. Missing entries stay missing in every replicate.
[[nodiscard]] BootstrapResult bootstrap_trend(std::span<const double> series, const BootstrapConfig& config);

// Type-7 (linear interpolation) sample quantile; `sorted` ascending.
[[nodiscard]] double sample_quantile(std::span<const double> sorted, double level);

/// Fraction of slope replicates <= 0. Requires at least 100 replicates.
[[nodiscard]] double slope_significance(const BootstrapResult& result);

// ---------------------------------------------------------------------------
// Dependence-parameter selection.

/// Politis-White automatic block length for the circular block bootstrap,
/// clamped to [1, ceil(3*sqrt(n))]. Missing entries are dropped first.
[[nodiscard]] std::size_t politis_white_block_length(std::span<const double> series);

// 0.05, 0.10, ..., 0.95
[[nodiscard]] std::vector<double> default_weight_grid();

struct WeightParamObjective {
  double target_variance = 0.0;     // Var(mean) under the AR(1) fitted to the residuals
  std::vector<double> grid;
  std::vector<double> bootstrap_variance;  // Var*(mean of w*residuals) per candidate
  std::vector<double> objective;           // |target - bootstrap|
  double selected = 0.0;
};

/// Evaluates |Var(mean)_AR - Var*(mean of w*e)| for AR(1) weights with each
/// candidate r, estimating Var* from `inner_replicates` weight draws. Draw
/// j uses the same substream for every candidate (common random numbers).
[[nodiscard]] WeightParamObjective ar1_weight_objective(std::span<const double> residuals,
                                                        std::span<const double> candidate_grid,
                                                        std::size_t inner_replicates, std::uint64_t seed);

/// The candidate minimizing ar1_weight_objective.
[[nodiscard]] double select_ar1_weight_param(std::span<const double> residuals,
                                             std::span<const double> candidate_grid,
                                             std::size_t inner_replicates, std::uint64_t seed);

}  // namespace trendboot::resampling
