#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "trendboot/error.hpp"
#include "trendboot/series.hpp"

namespace ts = trendboot::series;
using namespace testing_support;

namespace {

ts::DailySeries years_of(int first, int last, const std::function<double(int doy, Gen&)>& f, std::uint64_t seed) {
  Gen gen(seed);
  const std::size_t n = days_in_years(first, last);
  std::vector<double> v(n);
  const auto start = ymd(first, 1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const ts::Date d{std::chrono::sys_days{start} + std::chrono::days{static_cast<long>(i)}};
    v[i] = f(ts::day_of_year(d), gen);
  }
  return ts::DailySeries(start, std::move(v));
}

}  // namespace

TEST(Loess, ConstantIsPreserved) {
  const std::vector<double> y(365, 4.25);
  for (double v : ts::loess_circular(y, 0.3)) EXPECT_NEAR(v, 4.25, 1e-12);
}

TEST(Loess, SmoothSinusoidNearlyUnchanged) {
  std::vector<double> y(365);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 365.0);
  const auto s = ts::loess_circular(y, 0.3);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(s[i], y[i], 0.01);
}

TEST(Loess, WrapsAroundTheYear) {
  // A bump straddling Jan 1 is smoothed symmetrically.
  std::vector<double> y(365, 0.0);
  y[0] = 1.0;
  const auto s = ts::loess_circular(y, 0.1);
  for (std::size_t k = 1; k < 15; ++k) EXPECT_NEAR(s[k], s[365 - k], 1e-14);
}

TEST(Loess, RejectsBadSpan) {
  const std::vector<double> y(365, 1.0);
  EXPECT_THROW((void)ts::loess_circular(y, 0.0), std::invalid_argument);
  EXPECT_THROW((void)ts::loess_circular(y, 1.5), std::invalid_argument);
}

TEST(StandardizeSeasonal, StandardNormalInput) {
  const auto s = years_of(1950, 2009, [](int, Gen& g) { return g.normal(); }, 5);
  const auto out = ts::standardize_seasonal(s, 0.3);
  // 73-day bands of the year.
  std::vector<std::vector<double>> bands(5);
  for (std::size_t i = 0; i < out.series.size(); ++i) {
    const int doy = std::min(ts::day_of_year(out.series.date_at(i)), 365);
    bands[static_cast<std::size_t>((doy - 1) / 73)].push_back(out.series.values()[i]);
  }
  for (const auto& b : bands) {
    EXPECT_NEAR(mean_of(b), 0.0, 0.05);
    EXPECT_NEAR(variance_of(b), 1.0, 0.1);
  }
}

TEST(StandardizeSeasonal, TracksSinusoidalMean) {
  const auto s = years_of(
      1950, 2009, [](int doy, Gen& g) { return 10.0 * std::sin(2.0 * std::numbers::pi * doy / 365.0) + g.normal(); },
      6);
  const auto out = ts::standardize_seasonal(s, 0.3);
  double worst = 0.0;
  for (int doy = 1; doy <= 365; ++doy) {
    worst = std::max(worst, std::abs(out.profile.mean(doy) - 10.0 * std::sin(2.0 * std::numbers::pi * doy / 365.0)));
  }
  EXPECT_LT(worst, 0.2);
  for (int doy = 1; doy <= 366; ++doy) EXPECT_GT(out.profile.sd(doy), 0.0);
}

TEST(StandardizeSeasonal, RecoversSeasonalSpread) {
  const auto s = years_of(
      1950, 2009,
      [](int doy, Gen& g) { return g.normal(0.0, 2.0 + std::cos(2.0 * std::numbers::pi * doy / 365.0)); }, 7);
  const auto out = ts::standardize_seasonal(s, 0.3);
  for (int doy = 1; doy <= 365; doy += 30) {
    EXPECT_NEAR(out.profile.sd(doy), 2.0 + std::cos(2.0 * std::numbers::pi * doy / 365.0), 0.15) << doy;
  }
}

TEST(StandardizeSeasonal, RoundTripThroughProfile) {
  auto s = years_of(1980, 1990, [](int doy, Gen& g) { return 5.0 + 0.01 * doy + g.normal(0.0, 3.0); }, 8);
  std::vector<double> v(s.values().begin(), s.values().end());
  v[17] = std::numeric_limits<double>::quiet_NaN();
  s = ts::DailySeries(s.start_date(), v);
  const auto out = ts::standardize_seasonal(s, 0.3);
  EXPECT_TRUE(out.series.missing(17));
  const auto back = ts::destandardize(out.series, out.profile);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.missing(i)) continue;
    EXPECT_NEAR(back.values()[i], s.values()[i], 1e-9);
  }
}

TEST(StandardizeSeasonal, LeapDayPoolsWithDay365) {
  const auto s = years_of(1999, 2005, [](int, Gen& g) { return g.normal(); }, 9);
  const auto out = ts::standardize_seasonal(s, 0.3);
  EXPECT_EQ(out.profile.mean(366), out.profile.mean(365));
  EXPECT_EQ(out.profile.sd(366), out.profile.sd(365));
}

TEST(StandardizeSeasonal, Errors) {
  const auto constant = years_of(1990, 1995, [](int, Gen&) { return 5.0; }, 1);
  EXPECT_THROW((void)ts::standardize_seasonal(constant, 0.3), trendboot::DegenerateVarianceError);
  const auto one_year = years_of(1990, 1990, [](int, Gen& g) { return g.normal(); }, 2);
  EXPECT_THROW((void)ts::standardize_seasonal(one_year, 0.3), trendboot::CoverageError);
}
