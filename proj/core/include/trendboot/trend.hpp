#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trendboot/series.hpp"

// OLS trend fitting x_t = a*t + b and the sliding-start-year coefficient curves.
namespace trendboot::trend {

struct TrendFit {
  double slope = 0.0;       // per time step (per day for daily series)
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;  // NaN where the input is missing
  std::size_t n = 0;              // observed points used
};

/// Closed-form OLS of values[i] on t = i + 1 over the observed entries.
/// Constant input yields slope 0 and r_squared 0. Fewer than 3 observed
/// points throws InsufficientDataError.
[[nodiscard]] TrendFit fit_ols_trend(std::span<const double> values);

/// Precomputed OLS slope functional for a fixed missing-value pattern:
/// slope(y) = sum_t w_t * y_t. Refitting a bootstrap replicate is then a
/// single pass over the data.
class SlopeDesign {
 public:
  explicit SlopeDesign(std::span<const double> pattern);

  [[nodiscard]] double slope(std::span<const double> y) const;
  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<double> weights_;  // 0 at missing positions
};

inline constexpr int kDefaultCurveLength = 30;

/// Entry k is the trend over calendar years first_year + k .. last_year,
/// with the time index restarting at 1 for every segment. A segment that
/// cannot be fitted is marked invalid and holds NaN.
struct CoefficientCurve {
  int first_year = 0;
  int last_year = 0;
  std::vector<double> coeffs;
  std::vector<double> r_squareds;
  std::vector<bool> valid;

  [[nodiscard]] std::size_t k_max() const noexcept { return coeffs.size(); }
  [[nodiscard]] bool all_valid() const;
};

[[nodiscard]] CoefficientCurve sliding_trend_curve(const series::DailySeries& series, int first_year,
                                                   int last_year, int k_max = kDefaultCurveLength);

struct NamedCurve {
  std::string cell_id;
  CoefficientCurve curve;
};

// `cell_id,k,slope,r_squared`, invalid entries with empty numeric fields.
void write_curves_csv(std::ostream& out, std::span<const NamedCurve> curves);

}  // namespace trendboot::trend
