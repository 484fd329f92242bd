#include "trendboot/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "trendboot/csv.hpp"
#include "trendboot/error.hpp"
#include "trendboot/rng.hpp"

namespace trendboot::series {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using std::chrono::days;
using std::chrono::sys_days;

}  // namespace

Date parse_date(std::string_view iso) {
  iso = csv::trim(iso);
  // YYYY-MM-DD
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw std::invalid_argument("malformed date '" + std::string(iso) + "'");
  }
  const auto y = csv::parse_integer(iso.substr(0, 4));
  const auto m = csv::parse_integer(iso.substr(5, 2));
  const auto d = csv::parse_integer(iso.substr(8, 2));
  if (!y || !m || !d) throw std::invalid_argument("malformed date '" + std::string(iso) + "'");
  const Date date{std::chrono::year{static_cast<int>(*y)}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) throw std::invalid_argument("invalid calendar date '" + std::string(iso) + "'");
  return date;
}

std::string format_date(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

int day_of_year(Date date) {
  const Date jan1{date.year(), std::chrono::January, std::chrono::day{1}};
  return static_cast<int>((sys_days{date} - sys_days{jan1}).count()) + 1;
}

DailySeries::DailySeries(Date start_date, std::vector<double> values)
    : start_(start_date), values_(std::move(values)) {
  if (!start_.ok()) throw std::invalid_argument("DailySeries: invalid start date");
  if (values_.empty()) throw std::invalid_argument("DailySeries: empty series");
  missing_.resize(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::isinf(values_[i])) values_[i] = kNaN;
    missing_[i] = std::isnan(values_[i]);
    if (!missing_[i]) ++present_;
  }
}

Date DailySeries::end_date() const { return date_at(values_.size() - 1); }

Date DailySeries::date_at(std::size_t i) const {
  return Date{sys_days{start_} + days{static_cast<long>(i)}};
}

double DailySeries::missing_fraction() const noexcept {
  return 1.0 - static_cast<double>(present_) / static_cast<double>(values_.size());
}

std::optional<std::size_t> DailySeries::index_of(Date date) const {
  const auto offset = (sys_days{date} - sys_days{start_}).count();
  if (offset < 0 || static_cast<std::size_t>(offset) >= values_.size()) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

DailySeries DailySeries::slice_years(int first_year, int last_year) const {
  if (last_year < first_year) throw std::invalid_argument("slice_years: empty year range");
  const Date first{std::chrono::year{first_year}, std::chrono::January, std::chrono::day{1}};
  const Date last{std::chrono::year{last_year}, std::chrono::December, std::chrono::day{31}};
  const auto len = static_cast<std::size_t>((sys_days{last} - sys_days{first}).count()) + 1;
  std::vector<double> out(len, kNaN);
  const auto shift = (sys_days{first} - sys_days{start_}).count();
  for (std::size_t i = 0; i < len; ++i) {
    const long src = shift + static_cast<long>(i);
    if (src >= 0 && static_cast<std::size_t>(src) < values_.size()) {
      out[i] = values_[static_cast<std::size_t>(src)];
    }
  }
  return DailySeries(first, std::move(out));
}

DailySeries nao_adjust(const DailySeries& series, const DailySeries& nao) {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::size_t> where;
  std::size_t uncovered = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.missing(i)) continue;
    const auto j = nao.index_of(series.date_at(i));
    if (!j || nao.missing(*j)) {
      ++uncovered;
      continue;
    }
    x.push_back(nao.values()[*j]);
    y.push_back(series.values()[i]);
    where.push_back(i);
  }
  if (x.empty()) throw EmptyOverlapError("nao_adjust: series and NAO index share no observed dates");
  if (uncovered > 0) {
    throw CoverageError("nao_adjust: NAO index missing on " + std::to_string(uncovered) +
                        " observed dates of the series");
  }

  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double xmax = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    xmax = std::max(xmax, std::abs(x[i]));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (sxx <= n * (64 * eps * xmax) * (64 * eps * xmax)) {
    throw CollinearityError("nao_adjust: NAO index is constant over the overlap");
  }
  const double slope = sxy / sxx;

  std::vector<double> out(series.size(), kNaN);
  for (std::size_t i = 0; i < where.size(); ++i) {
    out[where[i]] = (y[i] - my) - slope * (x[i] - mx);
  }
  return DailySeries(series.start_date(), std::move(out));
}

AR1Fit fit_ar1(std::span<const double> residuals) {
  double sum = 0.0;
  std::size_t present = 0;
  for (double v : residuals) {
    if (!std::isnan(v)) {
      sum += v;
      ++present;
    }
  }
  std::size_t pairs = 0;
  for (std::size_t t = 0; t + 1 < residuals.size(); ++t) {
    if (!std::isnan(residuals[t]) && !std::isnan(residuals[t + 1])) ++pairs;
  }
  if (pairs < 10) {
    throw InsufficientDataError("fit_ar1: need at least 10 consecutive observed pairs, got " +
                                std::to_string(pairs));
  }
  const double mean = sum / static_cast<double>(present);

  double ss = 0.0;
  for (double v : residuals) {
    if (!std::isnan(v)) ss += (v - mean) * (v - mean);
  }
  double cross = 0.0;
  for (std::size_t t = 0; t + 1 < residuals.size(); ++t) {
    const double a = residuals[t];
    const double b = residuals[t + 1];
    if (!std::isnan(a) && !std::isnan(b)) cross += (a - mean) * (b - mean);
  }
  if (!(ss > 0.0)) throw DegenerateVarianceError("fit_ar1: residuals have zero variance");

  const double gamma0 = ss / static_cast<double>(present);
  const double gamma1 = cross / static_cast<double>(pairs);
  AR1Fit fit;
  fit.r = std::clamp(gamma1 / gamma0, -kAr1Clamp, kAr1Clamp);
  const double sample_sd = std::sqrt(ss / static_cast<double>(present - 1));
  fit.innovation_sd = sample_sd * std::sqrt(1.0 - fit.r * fit.r);
  fit.n_used = pairs;
  return fit;
}

double ar1_mean_variance(double r, double marginal_var, std::size_t n) {
  if (!(r > -1.0 && r < 1.0)) throw std::invalid_argument("ar1_mean_variance: r must lie in (-1, 1)");
  if (!(marginal_var > 0.0)) throw std::invalid_argument("ar1_mean_variance: marginal_var must be positive");
  if (n == 0) throw std::invalid_argument("ar1_mean_variance: n must be positive");
  const double nd = static_cast<double>(n);
  // sum_{k=1}^{n-1} (1 - k/n) r^k in closed form
  const double rn = std::pow(r, nd);
  const double tail = r / (1.0 - r) - r * (1.0 - rn) / (nd * (1.0 - r) * (1.0 - r));
  return marginal_var / nd * (1.0 + 2.0 * tail);
}

std::vector<double> simulate_ar1_trend(std::size_t n, double trend, double r, double innovation_sd,
                                       std::uint64_t seed) {
  if (!(r > -1.0 && r < 1.0)) throw std::invalid_argument("simulate_ar1_trend: r must lie in (-1, 1)");
  if (!(innovation_sd > 0.0)) throw std::invalid_argument("simulate_ar1_trend: innovation_sd must be positive");
  Engine engine = substream(seed, "simulate_ar1_trend");
  NormalDistribution normal;
  std::vector<double> y(n);
  if (n == 0) return y;
  double e = normal(engine) * innovation_sd / std::sqrt(1.0 - r * r);
  y[0] = trend + e;
  for (std::size_t t = 1; t < n; ++t) {
    e = r * e + innovation_sd * normal(engine);
    y[t] = trend * static_cast<double>(t + 1) + e;
  }
  return y;
}

DailySeries read_series_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::map<long, double> by_day;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "date" || fields[1] != "value") {
        throw ParseError(line_no, "expected header 'date,value'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 2) throw ParseError(line_no, "expected 2 fields");
    Date date;
    try {
      date = parse_date(fields[0]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    bool ok = true;
    const auto value = csv::parse_real(fields[1], ok);
    if (!ok) throw ParseError(line_no, "malformed value '" + std::string(fields[1]) + "'");
    const long key = sys_days{date}.time_since_epoch().count();
    if (!by_day.emplace(key, value.value_or(kNaN)).second) {
      throw IntegrityError("duplicate date " + format_date(date));
    }
  }
  if (!have_header) throw ParseError(line_no, "missing header 'date,value'");
  if (by_day.empty()) throw ParseError(line_no, "no data rows");

  const long first = by_day.begin()->first;
  const long last = by_day.rbegin()->first;
  std::vector<double> values(static_cast<std::size_t>(last - first + 1), kNaN);
  for (const auto& [day, v] : by_day) values[static_cast<std::size_t>(day - first)] = v;
  return DailySeries(Date{sys_days{days{first}}}, std::move(values));
}

DailySeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_series_csv(in);
}

void write_series_csv(std::ostream& out, const DailySeries& series) {
  out << "date,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_date(series.date_at(i)) << ',' << csv::format_optional_real(series.values()[i]) << '\n';
  }
}

}  // namespace trendboot::series
