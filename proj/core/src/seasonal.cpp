#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "trendboot/error.hpp"
#include "trendboot/series.hpp"

namespace trendboot::series {

namespace {

// Leap-year Dec 31 (doy 366) pools with doy 365.
constexpr std::size_t kPooledDays = 365;

std::size_t pooled_index(int doy) { return static_cast<std::size_t>(std::min(doy, 365) - 1); }

}  // namespace

std::vector<double> loess_circular(std::span<const double> y, double span) {
  const std::size_t n = y.size();
  if (!(span > 0.0 && span <= 1.0)) throw std::invalid_argument("loess: span must lie in (0, 1]");
  const auto window = static_cast<std::size_t>(std::ceil(span * static_cast<double>(n)));
  if (window < 3 || n < 3) throw std::invalid_argument("loess: window holds fewer than 3 points");

  // Points are equally spaced on a circle, so the local fit reduces to one
  // fixed equivalent kernel applied at every position.
  const long half = static_cast<long>(std::min(window / 2, (n - 1) / 2));
  const double bandwidth = static_cast<double>(half) + 0.5;
  const std::size_t width = static_cast<std::size_t>(2 * half + 1);
  std::vector<double> tricube(width);
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  for (long u = -half; u <= half; ++u) {
    const double z = std::abs(static_cast<double>(u)) / bandwidth;
    const double w = std::pow(1.0 - z * z * z, 3);
    tricube[static_cast<std::size_t>(u + half)] = w;
    const Eigen::Vector3d basis(1.0, static_cast<double>(u), static_cast<double>(u * u));
    gram += w * basis * basis.transpose();
  }
  // First row of (B'WB)^{-1} B'W gives the fitted value at offset 0.
  const Eigen::Vector3d e0 = gram.ldlt().solve(Eigen::Vector3d::UnitX());
  std::vector<double> kernel(width);
  for (long u = -half; u <= half; ++u) {
    const auto k = static_cast<std::size_t>(u + half);
    const double du = static_cast<double>(u);
    kernel[k] = tricube[k] * (e0(0) + e0(1) * du + e0(2) * du * du);
  }

  std::vector<double> out(n, 0.0);
  const long ln = static_cast<long>(n);
  for (long i = 0; i < ln; ++i) {
    double acc = 0.0;
    for (long u = -half; u <= half; ++u) {
      const long j = ((i + u) % ln + ln) % ln;
      acc += kernel[static_cast<std::size_t>(u + half)] * y[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

Standardized standardize_seasonal(const DailySeries& series, double span) {
  const auto values = series.values();
  std::vector<int> doy(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) doy[i] = day_of_year(series.date_at(i));

  std::vector<double> sum(kPooledDays, 0.0);
  std::vector<std::size_t> count(kPooledDays, 0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.missing(i)) continue;
    const auto p = pooled_index(doy[i]);
    sum[p] += values[i];
    ++count[p];
  }
  for (std::size_t p = 0; p < kPooledDays; ++p) {
    if (count[p] < 2) {
      throw CoverageError("standardize_seasonal: day of year " + std::to_string(p + 1) + " has " +
                          std::to_string(count[p]) + " observed years, need at least 2");
    }
  }

  std::vector<double> raw_mean(kPooledDays);
  for (std::size_t p = 0; p < kPooledDays; ++p) raw_mean[p] = sum[p] / static_cast<double>(count[p]);
  const std::vector<double> mean = loess_circular(raw_mean, span);

  std::vector<double> sq(kPooledDays, 0.0);
  double scale = 1.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.missing(i)) continue;
    const auto p = pooled_index(doy[i]);
    const double d = values[i] - mean[p];
    sq[p] += d * d;
    scale = std::max(scale, std::abs(values[i]));
  }
  std::vector<double> raw_var(kPooledDays);
  for (std::size_t p = 0; p < kPooledDays; ++p) raw_var[p] = sq[p] / static_cast<double>(count[p]);
  const std::vector<double> var = loess_circular(raw_var, span);

  const double sd_floor = 1e-10 * scale;
  SeasonalProfile profile;
  for (std::size_t p = 0; p < kPooledDays; ++p) {
    if (!(var[p] > sd_floor * sd_floor)) {
      throw DegenerateVarianceError("standardize_seasonal: smoothed variance is not positive on day of year " +
                                    std::to_string(p + 1));
    }
    profile.mean_by_doy[p] = mean[p];
    profile.sd_by_doy[p] = std::sqrt(var[p]);
  }
  profile.mean_by_doy[365] = profile.mean_by_doy[364];
  profile.sd_by_doy[365] = profile.sd_by_doy[364];

  std::vector<double> out(series.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.missing(i)) continue;
    out[i] = (values[i] - profile.mean(doy[i])) / profile.sd(doy[i]);
  }
  return {DailySeries(series.start_date(), std::move(out)), profile};
}

DailySeries destandardize(const DailySeries& standardized, const SeasonalProfile& profile) {
  std::vector<double> out(standardized.values().begin(), standardized.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (standardized.missing(i)) continue;
    const int d = day_of_year(standardized.date_at(i));
    out[i] = out[i] * profile.sd(d) + profile.mean(d);
  }
  return DailySeries(standardized.start_date(), std::move(out));
}

}  // namespace trendboot::series
