#include "trendboot/trend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "trendboot/csv.hpp"
#include "trendboot/error.hpp"

namespace trendboot::trend {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

TrendFit fit_ols_trend(std::span<const double> values) {
  std::size_t n = 0;
  double t_sum = 0.0;
  double y_sum = 0.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = values[i];
    if (std::isnan(y)) continue;
    ++n;
    t_sum += static_cast<double>(i + 1);
    y_sum += y;
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (n < 3) {
    throw InsufficientDataError("fit_ols_trend: need at least 3 observed values, got " + std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  const double t_bar = t_sum / nd;
  const double y_bar = y_sum / nd;

  TrendFit fit;
  fit.n = n;
  fit.residuals.assign(values.size(), kNaN);

  if (y_min == y_max) {
    fit.slope = 0.0;
    fit.intercept = y_bar;
    fit.r_squared = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isnan(values[i])) fit.residuals[i] = 0.0;
    }
    return fit;
  }

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = values[i];
    if (std::isnan(y)) continue;
    const double dt = static_cast<double>(i + 1) - t_bar;
    const double dy = y - y_bar;
    sxx += dt * dt;
    sxy += dt * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = y_bar - fit.slope * t_bar;

  double sse = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = values[i];
    if (std::isnan(y)) continue;
    const double dt = static_cast<double>(i + 1) - t_bar;
    const double e = (y - y_bar) - fit.slope * dt;
    fit.residuals[i] = e;
    sse += e * e;
  }
  fit.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  return fit;
}

SlopeDesign::SlopeDesign(std::span<const double> pattern) : weights_(pattern.size(), 0.0) {
  std::size_t n = 0;
  double t_sum = 0.0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (std::isnan(pattern[i])) continue;
    ++n;
    t_sum += static_cast<double>(i + 1);
  }
  if (n < 3) throw InsufficientDataError("SlopeDesign: need at least 3 observed values");
  const double t_bar = t_sum / static_cast<double>(n);
  double sxx = 0.0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (std::isnan(pattern[i])) continue;
    const double dt = static_cast<double>(i + 1) - t_bar;
    sxx += dt * dt;
  }
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (std::isnan(pattern[i])) continue;
    weights_[i] = (static_cast<double>(i + 1) - t_bar) / sxx;
  }
}

double SlopeDesign::slope(std::span<const double> y) const {
  if (y.size() != weights_.size()) throw std::invalid_argument("SlopeDesign: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (weights_[i] != 0.0) acc += weights_[i] * y[i];
  }
  return acc;
}

bool CoefficientCurve::all_valid() const {
  return std::all_of(valid.begin(), valid.end(), [](bool v) { return v; });
}

CoefficientCurve sliding_trend_curve(const series::DailySeries& series, int first_year, int last_year,
                                     int k_max) {
  if (k_max < 1 || k_max > last_year - first_year - 1) {
    throw std::invalid_argument("sliding_trend_curve: k_max must lie in [1, last_year - first_year - 1]");
  }
  const series::Date first{std::chrono::year{first_year}, std::chrono::January, std::chrono::day{1}};
  const series::Date last{std::chrono::year{last_year}, std::chrono::December, std::chrono::day{31}};
  if (!series.index_of(first) || !series.index_of(last)) {
    throw CoverageError("sliding_trend_curve: series does not span " + std::to_string(first_year) + "-" +
                        std::to_string(last_year));
  }

  CoefficientCurve curve;
  curve.first_year = first_year;
  curve.last_year = last_year;
  curve.coeffs.assign(static_cast<std::size_t>(k_max), kNaN);
  curve.r_squareds.assign(static_cast<std::size_t>(k_max), kNaN);
  curve.valid.assign(static_cast<std::size_t>(k_max), false);
  for (int k = 0; k < k_max; ++k) {
    const auto segment = series.slice_years(first_year + k, last_year);
    try {
      const TrendFit fit = fit_ols_trend(segment.values());
      const auto idx = static_cast<std::size_t>(k);
      curve.coeffs[idx] = fit.slope;
      curve.r_squareds[idx] = fit.r_squared;
      curve.valid[idx] = true;
    } catch (const InsufficientDataError&) {
      // left masked
    }
  }
  return curve;
}

void write_curves_csv(std::ostream& out, std::span<const NamedCurve> curves) {
  out << "cell_id,k,slope,r_squared\n";
  for (const auto& named : curves) {
    for (std::size_t k = 0; k < named.curve.k_max(); ++k) {
      out << named.cell_id << ',' << k << ',' << csv::format_optional_real(named.curve.coeffs[k]) << ','
          << csv::format_optional_real(named.curve.r_squareds[k]) << '\n';
    }
  }
}

}  // namespace trendboot::trend
