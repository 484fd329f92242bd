#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Daily series container, seasonal standardization, NAO adjustment and the
// AR(1) helpers used throughout the bootstrap code.
//
// Real-valued sequences passed around as std::span<const double> use NaN to
// mark a missing entry.
namespace trendboot::series {

using Date = std::chrono::year_month_day;

[[nodiscard]] Date parse_date(std::string_view iso);
[[nodiscard]] std::string format_date(Date date);

// Ordinal day within the calendar year, 1..366.
[[nodiscard]] int day_of_year(Date date);

/// Consecutive calendar days starting at start_date (leap days included),
/// one value per day. NaN entries are missing.
class DailySeries {
 public:
  DailySeries(Date start_date, std::vector<double> values);

  [[nodiscard]] Date start_date() const noexcept { return start_; }
  [[nodiscard]] Date end_date() const;
  [[nodiscard]] Date date_at(std::size_t i) const;
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] const std::vector<bool>& missing_mask() const noexcept { return missing_; }
  [[nodiscard]] bool missing(std::size_t i) const { return missing_[i]; }
  [[nodiscard]] std::size_t present_count() const noexcept { return present_; }
  [[nodiscard]] double missing_fraction() const noexcept;

  // Index of `date`, or nullopt when it falls outside the series.
  [[nodiscard]] std::optional<std::size_t> index_of(Date date) const;

  // Days of calendar years first_year..last_year; dates outside the series
  // come back missing.
  [[nodiscard]] DailySeries slice_years(int first_year, int last_year) const;

 private:
  Date start_;
  std::vector<double> values_;
  std::vector<bool> missing_;
  std::size_t present_ = 0;
};

inline constexpr std::size_t kProfileDays = 366;

/// Smoothed per-day-of-year mean and standard deviation. Index 0 is Jan 1;
/// index 365 (Dec 31 of a leap year) repeats index 364.
struct SeasonalProfile {
  std::array<double, kProfileDays> mean_by_doy{};
  std::array<double, kProfileDays> sd_by_doy{};

  [[nodiscard]] double mean(int doy) const { return mean_by_doy[static_cast<std::size_t>(doy - 1)]; }
  [[nodiscard]] double sd(int doy) const { return sd_by_doy[static_cast<std::size_t>(doy - 1)]; }
};

struct Standardized {
  DailySeries series;
  SeasonalProfile profile;
};

inline constexpr double kDefaultLoessSpan = 0.3;

/// Removes the seasonal cycle in mean and then in variance.
///
/// Raw per-day-of-year means are smoothed with a circular local-quadratic
/// tricube smoother; the same smoother is applied to the per-day variance of
/// the mean-adjusted values. Output is (x - mean(doy)) / sd(doy).
///
/// Throws CoverageError when some day of year has fewer than two observed
/// years, DegenerateVarianceError when a smoothed variance is not positive.
[[nodiscard]] Standardized standardize_seasonal(const DailySeries& series,
                                                double span = kDefaultLoessSpan);

// Inverse of standardize_seasonal for the stored profile.
[[nodiscard]] DailySeries destandardize(const DailySeries& standardized,
                                        const SeasonalProfile& profile);

// Circular local-quadratic smoother over equally spaced points; exposed for tests.
[[nodiscard]] std::vector<double> loess_circular(std::span<const double> y, double span);

/// Residuals of the OLS regression of `series` on `nao` (with intercept),
/// over the dates where the series is observed. The mask is unchanged.
[[nodiscard]] DailySeries nao_adjust(const DailySeries& series, const DailySeries& nao);

struct AR1Fit {
  double r = 0.0;
  double innovation_sd = 0.0;
  std::size_t n_used = 0;
};

inline constexpr double kAr1Clamp = 0.999;

/// Yule-Walker lag-1 fit. Pairs with a missing member are skipped; r is
/// clamped to [-0.999, 0.999].
[[nodiscard]] AR1Fit fit_ar1(std::span<const double> residuals);

/// Exact Var(mean) of n consecutive values of a stationary AR(1) with
/// lag-1 coefficient r and marginal variance marginal_var.
[[nodiscard]] double ar1_mean_variance(double r, double marginal_var, std::size_t n);

/// y_t = trend * t + e_t, t = 1..n, with e a stationary AR(1) started from
/// its marginal law.
[[nodiscard]] std::vector<double> simulate_ar1_trend(std::size_t n, double trend, double r,
                                                     double innovation_sd, std::uint64_t seed);

// CSV with header `date,value`; an empty value field marks a missing day.
// Dates may be sparse or unordered in the file; absent days become missing.
[[nodiscard]] DailySeries read_series_csv(std::istream& in);
[[nodiscard]] DailySeries read_series_csv(const std::filesystem::path& path);
void write_series_csv(std::ostream& out, const DailySeries& series);

}  // namespace trendboot::series
