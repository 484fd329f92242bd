#include "trendboot/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "trendboot/csv.hpp"
#include "trendboot/error.hpp"
#include "trendboot/parallel.hpp"
#include "trendboot/resampling.hpp"
#include "trendboot/rng.hpp"

namespace trendboot::grid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using std::chrono::days;
using std::chrono::sys_days;

struct CellRows {
  double lat = 0.0;
  double lon = 0.0;
  std::size_t first_line = 0;
  std::map<long, double> by_day;
};

double min_step(std::set<double> values) {
  double step = 0.0;
  double prev = 0.0;
  bool first = true;
  for (double v : values) {
    if (!first) {
      const double diff = v - prev;
      if (diff > 0.0 && (step == 0.0 || diff < step)) step = diff;
    }
    prev = v;
    first = false;
  }
  return step;
}

double fraction_nonpositive(std::span<const double> replicates) {
  if (replicates.empty()) return kNaN;
  const auto count = std::count_if(replicates.begin(), replicates.end(), [](double v) { return v <= 0.0; });
  return static_cast<double>(count) / static_cast<double>(replicates.size());
}

}  // namespace

std::optional<std::size_t> GridDataset::find(std::string_view cell_id) const {
  const auto it = std::lower_bound(cells.begin(), cells.end(), cell_id,
                                   [](const Cell& c, std::string_view id) { return c.id < id; });
  if (it == cells.end() || it->id != cell_id) return std::nullopt;
  return static_cast<std::size_t>(it - cells.begin());
}

GridDataset ingest_grid_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::map<std::string, CellRows, std::less<>> cells;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (!have_header) {
      if (fields.size() != 5 || fields[0] != "cell_id" || fields[1] != "lat" || fields[2] != "lon" ||
          fields[3] != "date" || fields[4] != "value") {
        throw ParseError(line_no, "expected header 'cell_id,lat,lon,date,value'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    const auto id = csv::trim(fields[0]);
    if (id.empty()) throw ParseError(line_no, "empty cell_id");
    bool ok_lat = true;
    bool ok_lon = true;
    bool ok_value = true;
    const auto lat = csv::parse_real(fields[1], ok_lat);
    const auto lon = csv::parse_real(fields[2], ok_lon);
    const auto value = csv::parse_real(fields[4], ok_value);
    if (!ok_lat || !lat || *lat < -90.0 || *lat > 90.0) throw ParseError(line_no, "latitude must lie in [-90, 90]");
    if (!ok_lon || !lon || *lon < -180.0 || *lon > 180.0) {
      throw ParseError(line_no, "longitude must lie in [-180, 180]");
    }
    if (!ok_value) throw ParseError(line_no, "malformed value '" + std::string(fields[4]) + "'");
    series::Date date;
    try {
      date = series::parse_date(fields[3]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }

    auto it = cells.find(id);
    if (it == cells.end()) {
      it = cells.emplace(std::string(id), CellRows{*lat, *lon, line_no, {}}).first;
    } else if (it->second.lat != *lat || it->second.lon != *lon) {
      throw IntegrityError("cell " + std::string(id) + ": coordinates on line " + std::to_string(line_no) +
                           " differ from line " + std::to_string(it->second.first_line));
    }
    const long key = sys_days{date}.time_since_epoch().count();
    if (!it->second.by_day.emplace(key, value.value_or(kNaN)).second) {
      throw IntegrityError("cell " + std::string(id) + ": duplicate date " + series::format_date(date));
    }
  }
  if (!have_header) throw ParseError(line_no, "missing header 'cell_id,lat,lon,date,value'");

  GridDataset dataset;
  std::set<double> lats;
  std::set<double> lons;
  for (auto& [id, rows] : cells) {
    const long first = rows.by_day.begin()->first;
    const long last = rows.by_day.rbegin()->first;
    std::vector<double> values(static_cast<std::size_t>(last - first + 1), kNaN);
    for (const auto& [day, v] : rows.by_day) values[static_cast<std::size_t>(day - first)] = v;
    dataset.cells.push_back(Cell{id, rows.lat, rows.lon});
    dataset.series.emplace_back(series::Date{sys_days{days{first}}}, std::move(values));
    lats.insert(rows.lat);
    lons.insert(rows.lon);
  }
  const double lat_step = min_step(lats);
  const double lon_step = min_step(lons);
  if (lat_step > 0.0 && lon_step > 0.0) {
    dataset.resolution = std::min(lat_step, lon_step);
  } else {
    dataset.resolution = std::max(lat_step, lon_step);
  }
  return dataset;
}

GridDataset ingest_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return ingest_grid_csv(in);
}

void write_grid_csv(std::ostream& out, const GridDataset& dataset) {
  out << "cell_id,lat,lon,date,value\n";
  for (std::size_t c = 0; c < dataset.size(); ++c) {
    const auto& cell = dataset.cells[c];
    const auto lat = csv::format_real(cell.lat);
    const auto lon = csv::format_real(cell.lon);
    const auto& s = dataset.series[c];
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << cell.id << ',' << lat << ',' << lon << ',' << series::format_date(s.date_at(i)) << ','
          << csv::format_optional_real(s.values()[i]) << '\n';
    }
  }
}

void AnalysisConfig::validate() const {
  if (!(span > 0.0 && span <= 1.0)) throw std::invalid_argument("span must lie in (0, 1]");
  if (last_year <= first_year) throw std::invalid_argument("last_year must exceed first_year");
  if (k_max < 1 || k_max > last_year - first_year - 1) {
    throw std::invalid_argument("k_max must lie in [1, last_year - first_year - 1]");
  }
  for (int k : k_compare) {
    if (k < 0 || k > last_year - first_year) {
      throw std::invalid_argument("k_compare entries must lie in [0, last_year - first_year]");
    }
  }
  if (replicates == 0) throw std::invalid_argument("replicates must be positive");
  if (select_replicates < 2) throw std::invalid_argument("select_replicates must be at least 2");
  for (double r : weight_grid) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("weight_grid entries must lie in (0, 1)");
  }
  if (!(missing_threshold >= 0.0 && missing_threshold <= 1.0)) {
    throw std::invalid_argument("missing_threshold must lie in [0, 1]");
  }
}

AccelerationResult acceleration_significance(std::span<const double> earlier, std::span<const double> later) {
  if (earlier.empty() || later.empty()) throw std::invalid_argument("acceleration_significance: empty replicate set");
  AccelerationResult out;
  out.pairs = std::min(earlier.size(), later.size());
  out.length_mismatch = earlier.size() != later.size();
  double score = 0.0;
  for (std::size_t i = 0; i < out.pairs; ++i) {
    if (later[i] > earlier[i]) {
      score += 1.0;
    } else if (later[i] == earlier[i]) {
      score += 0.5;
    }
  }
  out.fraction = score / static_cast<double>(out.pairs);
  return out;
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view cell_id) {
  return derive_seed(master_seed, "cell", hash_label(cell_id));
}

CellResult analyze_cell(const series::DailySeries& series, const series::DailySeries* nao,
                        const AnalysisConfig& config, std::uint64_t seed) {
  config.validate();
  const auto sliced = series.slice_years(config.first_year, config.last_year);
  CellResult result;
  result.missing_fraction = sliced.missing_fraction();

  auto prepared = series::standardize_seasonal(sliced, config.span).series;
  if (nao != nullptr) prepared = series::nao_adjust(prepared, *nao);

  result.curve = trend::sliding_trend_curve(prepared, config.first_year, config.last_year, config.k_max);
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < result.curve.k_max(); ++k) {
    if (result.curve.valid[k] && (!best || result.curve.coeffs[k] > result.curve.coeffs[*best])) best = k;
  }
  if (!best) throw InsufficientDataError("no segment of the coefficient curve could be fitted");
  result.max_coeff = result.curve.coeffs[*best];
  result.r2_max = result.curve.r_squareds[*best];

  const std::vector<double> grid =
      config.weight_grid.empty() ? resampling::default_weight_grid() : config.weight_grid;
  for (int k : config.k_compare) {
    const auto segment = prepared.slice_years(config.first_year + k, config.last_year);
    const auto fit = trend::fit_ols_trend(segment.values());
    SegmentBootstrap seg;
    seg.k = k;
    seg.slope = fit.slope;
    seg.selected_r = resampling::select_ar1_weight_param(fit.residuals, grid, config.select_replicates,
                                                         derive_seed(seed, "select", static_cast<std::uint64_t>(k)));
    resampling::BootstrapConfig boot;
    boot.method = resampling::Method::dep_wild_ar1;
    boot.replicates = config.replicates;
    boot.weights = resampling::Ar1Weights{seg.selected_r};
    boot.seed = derive_seed(seed, "bootstrap", static_cast<std::uint64_t>(k));
    seg.replicates = resampling::bootstrap_trend(segment.values(), boot).slope_replicates;
    result.segments.push_back(std::move(seg));
  }

  result.sig_fraction = kNaN;
  result.p_nonpositive = kNaN;
  if (!result.segments.empty()) result.p_nonpositive = fraction_nonpositive(result.segments[0].replicates);
  if (result.segments.size() >= 2) {
    const auto acc = acceleration_significance(result.segments[0].replicates, result.segments[1].replicates);
    result.sig_fraction = acc.fraction;
    result.pairing_mismatch = acc.length_mismatch;
  }
  return result;
}

GridAnalysis analyze_grid(const GridDataset& dataset, const series::DailySeries* nao, const AnalysisConfig& config) {
  config.validate();
  const std::size_t n = dataset.size();
  std::vector<std::optional<CellResult>> slots(n);
  std::vector<std::string> errors(n);

  parallel_for(n, config.threads, [&](std::size_t c) {
    const auto& cell = dataset.cells[c];
    try {
      const double missing = dataset.series[c].slice_years(config.first_year, config.last_year).missing_fraction();
      CellResult result;
      if (missing > config.missing_threshold) {
        result.excluded = true;
        result.missing_fraction = missing;
        result.max_coeff = result.r2_max = result.sig_fraction = result.p_nonpositive = kNaN;
      } else {
        result = analyze_cell(dataset.series[c], nao, config, cell_seed(config.seed, cell.id));
      }
      result.cell_id = cell.id;
      result.lat = cell.lat;
      result.lon = cell.lon;
      slots[c] = std::move(result);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  });

  GridAnalysis out;
  for (std::size_t c = 0; c < n; ++c) {
    if (slots[c]) {
      out.results.push_back(std::move(*slots[c]));
    } else {
      out.failures.push_back(CellFailure{dataset.cells[c].id, errors[c]});
    }
  }
  return out;
}

Eigen::MatrixXd curve_matrix(std::span<const CellResult> results, std::vector<std::size_t>& rows) {
  rows.clear();
  std::size_t d = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.excluded || r.curve.k_max() == 0 || !r.curve.all_valid()) continue;
    if (d == 0) d = r.curve.k_max();
    if (r.curve.k_max() != d) throw std::invalid_argument("curve_matrix: curves differ in length");
    rows.push_back(i);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& coeffs = results[rows[j]].curve.coeffs;
    for (std::size_t k = 0; k < d; ++k) x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = coeffs[k];
  }
  return x;
}

}  // namespace trendboot::grid
