#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "trendboot/grid.hpp"
#include "trendboot/series.hpp"

// Helpers shared by the unit and acceptance tests. Random inputs come from a
// plain std::mt19937_64 with std:: distributions so the fixtures do not share
// code with the generators under test.
namespace testing_support {

namespace fs = std::filesystem;
using trendboot::series::DailySeries;
using trendboot::series::Date;

inline Date ymd(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline std::size_t days_between(Date a, Date b) {
  return static_cast<std::size_t>((std::chrono::sys_days{b} - std::chrono::sys_days{a}).count());
}

inline std::size_t days_in_years(int first, int last) { return days_between(ymd(first, 1, 1), ymd(last + 1, 1, 1)); }

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(engine_); }
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  long long integer(long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(engine_); }

  std::vector<double> normals(std::size_t n, double sd = 1.0) {
    std::vector<double> out(n);
    for (auto& v : out) v = normal(0.0, sd);
    return out;
  }

  // Stationary AR(1) with the given innovation sd.
  std::vector<double> ar1(std::size_t n, double r, double innovation_sd) {
    std::vector<double> out(n);
    if (n == 0) return out;
    out[0] = normal(0.0, innovation_sd / std::sqrt(1.0 - r * r));
    for (std::size_t t = 1; t < n; ++t) out[t] = r * out[t - 1] + normal(0.0, innovation_sd);
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct CellSpec {
  int first_year = 1950;
  int last_year = 2015;
  double trend = 0.0;         // per day, in units of the daily noise sd
  int trend_start_year = 0;   // 0 = trend over the whole span
  double r = 0.8;
  double seasonal_amplitude = 8.0;
};

/// Daily temperature-like series: seasonal mean and sd cycles, stationary
/// AR(1) anomalies with unit marginal variance scaled by the seasonal sd,
/// plus a linear trend expressed in standardized units.
inline DailySeries synthetic_cell(const CellSpec& spec, std::uint64_t seed) {
  Gen gen(seed);
  const std::size_t n = days_in_years(spec.first_year, spec.last_year);
  const auto noise = gen.ar1(n, spec.r, std::sqrt(1.0 - spec.r * spec.r));
  const Date start = ymd(spec.first_year, 1, 1);
  const std::size_t trend_from =
      spec.trend_start_year == 0 ? 0 : days_between(start, ymd(spec.trend_start_year, 1, 1));
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Date d{std::chrono::sys_days{start} + std::chrono::days{static_cast<long>(i)}};
    const double phase = 2.0 * std::numbers::pi * (trendboot::series::day_of_year(d) - 1) / 365.25;
    const double mean = 10.0 + spec.seasonal_amplitude * std::sin(phase - 1.8);
    const double sd = 3.0 + 1.0 * std::cos(phase);
    const double trend = i >= trend_from ? spec.trend * static_cast<double>(i - trend_from + 1) : 0.0;
    values[i] = mean + sd * (noise[i] + trend);
  }
  return DailySeries(start, std::move(values));
}

// n x d points drawn around the given centers with isotropic sd.
inline Eigen::MatrixXd spherical_mixture(const std::vector<Eigen::VectorXd>& centers, std::size_t per_component,
                                         double sd, Gen& gen, std::vector<int>* labels = nullptr) {
  const auto d = centers.front().size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(centers.size() * per_component), d);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t i = 0; i < per_component; ++i, ++row) {
      for (Eigen::Index j = 0; j < d; ++j) x(row, j) = centers[c](j) + gen.normal(0.0, sd);
      if (labels) labels->push_back(static_cast<int>(c));
    }
  }
  return x;
}

// OLS of y on (1, t), t = i + 1, by forming and solving the 2x2 normal
// equations in long double. Returns {slope, intercept}.
inline std::pair<double, double> brute_force_ols(const std::vector<double>& y) {
  long double s1 = 0, st = 0, stt = 0, sy = 0, sty = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::isnan(y[i])) continue;
    const long double t = static_cast<long double>(i + 1);
    s1 += 1;
    st += t;
    stt += t * t;
    sy += y[i];
    sty += t * y[i];
  }
  const long double det = s1 * stt - st * st;
  const long double slope = (s1 * sty - st * sy) / det;
  const long double intercept = (stt * sy - st * sty) / det;
  return {static_cast<double>(slope), static_cast<double>(intercept)};
}

// Bartlett's large-sample variance of the lag-k sample autocorrelation for a
// process with autocorrelations rho[0..], rho[0] = 1.
inline double bartlett_acf_variance(const std::vector<double>& rho, std::size_t k, std::size_t n) {
  const auto at = [&](long j) {
    const auto a = static_cast<std::size_t>(std::abs(j));
    return a < rho.size() ? rho[a] : 0.0;
  };
  const long m = static_cast<long>(rho.size()) + static_cast<long>(k);
  const long kk = static_cast<long>(k);
  double sum = 0.0;
  for (long j = -m; j <= m; ++j) {
    sum += at(j) * at(j) + at(j + kk) * at(j - kk) - 4.0 * at(kk) * at(j) * at(j - kk) +
           2.0 * at(kk) * at(kk) * at(j) * at(j);
  }
  return sum / static_cast<double>(n);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double autocorrelation(const std::vector<double>& v, std::size_t lag) {
  const double m = mean_of(v);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    den += (v[i] - m) * (v[i] - m);
    if (i + lag < v.size()) num += (v[i] - m) * (v[i + lag] - m);
  }
  return num / den;
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Fresh empty directory under the system temp path.
inline fs::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  const auto dir = fs::temp_directory_path() /
                   ("trendboot_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline trendboot::grid::GridDataset synthetic_grid(int side, const CellSpec& spec, std::uint64_t seed) {
  trendboot::grid::GridDataset g;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      const std::string id = "c" + std::to_string(i) + "_" + std::to_string(j);
      g.cells.push_back({id, 45.0 + 0.5 * i, 10.0 + 0.5 * j});
      g.series.push_back(synthetic_cell(spec, seed * 1000 + static_cast<std::uint64_t>(i * side + j)));
    }
  }
  g.resolution = 0.5;
  return g;
}

}  // namespace testing_support
