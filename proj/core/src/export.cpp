#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "trendboot/csv.hpp"
#include "trendboot/error.hpp"
#include "trendboot/grid.hpp"

namespace trendboot::grid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kHeader = "cell_id,lat,lon,max_coeff,r2_max,sig_fraction,p_nonpositive,cluster";

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

double number_from(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

ResultRow summarize(const CellResult& result) {
  ResultRow row;
  row.cell_id = result.cell_id;
  row.lat = result.lat;
  row.lon = result.lon;
  if (result.excluded) {
    row.max_coeff = row.r2_max = row.sig_fraction = row.p_nonpositive = kNaN;
  } else {
    row.max_coeff = result.max_coeff;
    row.r2_max = result.r2_max;
    row.sig_fraction = result.sig_fraction;
    row.p_nonpositive = result.p_nonpositive;
  }
  row.cluster = result.cluster;
  return row;
}

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << kHeader << '\n';
  for (const auto& r : rows) {
    out << r.cell_id << ',' << csv::format_real(r.lat) << ',' << csv::format_real(r.lon) << ','
        << csv::format_optional_real(r.max_coeff) << ',' << csv::format_optional_real(r.r2_max) << ','
        << csv::format_optional_real(r.sig_fraction) << ',' << csv::format_optional_real(r.p_nonpositive) << ',';
    if (r.cluster) out << *r.cluster;
    out << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<ResultRow> rows;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    if (!have_header) {
      if (csv::trim(line) != kHeader) throw ParseError(line_no, std::string("expected header '") + kHeader + "'");
      have_header = true;
      continue;
    }
    const auto f = csv::split(line);
    if (f.size() != 8) throw ParseError(line_no, "expected 8 fields");
    ResultRow row;
    row.cell_id = std::string(f[0]);
    double* targets[] = {&row.lat, &row.lon, &row.max_coeff, &row.r2_max, &row.sig_fraction, &row.p_nonpositive};
    for (std::size_t j = 0; j < 6; ++j) {
      bool ok = true;
      const auto v = csv::parse_real(f[j + 1], ok);
      if (!ok) throw ParseError(line_no, "malformed number '" + std::string(f[j + 1]) + "'");
      *targets[j] = v.value_or(kNaN);
    }
    if (!csv::trim(f[7]).empty()) {
      const auto c = csv::parse_integer(f[7]);
      if (!c) throw ParseError(line_no, "malformed cluster label '" + std::string(f[7]) + "'");
      row.cluster = static_cast<int>(*c);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(line_no, std::string("missing header '") + kHeader + "'");
  return rows;
}

void write_results_geojson(std::ostream& out, std::span<const ResultRow> rows) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json props;
    props["cell_id"] = r.cell_id;
    props["max_coeff"] = number_or_null(r.max_coeff);
    props["r2_max"] = number_or_null(r.r2_max);
    props["sig_fraction"] = number_or_null(r.sig_fraction);
    props["p_nonpositive"] = number_or_null(r.p_nonpositive);
    props["cluster"] = r.cluster ? nlohmann::json(*r.cluster) : nlohmann::json(nullptr);
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {r.lon, r.lat}}}},
                        {"properties", std::move(props)}});
  }
  const nlohmann::json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  out << doc.dump(1) << '\n';
}

std::vector<ResultRow> read_results_geojson(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("invalid GeoJSON: ") + e.what());
  }
  std::vector<ResultRow> rows;
  try {
    if (doc.at("type") != "FeatureCollection") throw ParseError(0, "expected a FeatureCollection");
    for (const auto& feature : doc.at("features")) {
      const auto& props = feature.at("properties");
      const auto& coords = feature.at("geometry").at("coordinates");
      ResultRow row;
      row.cell_id = props.at("cell_id").get<std::string>();
      row.lon = coords.at(0).get<double>();
      row.lat = coords.at(1).get<double>();
      row.max_coeff = number_from(props.at("max_coeff"));
      row.r2_max = number_from(props.at("r2_max"));
      row.sig_fraction = number_from(props.at("sig_fraction"));
      row.p_nonpositive = number_from(props.at("p_nonpositive"));
      if (!props.at("cluster").is_null()) row.cluster = props.at("cluster").get<int>();
      rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed GeoJSON feature: ") + e.what());
  }
  return rows;
}

void export_results(std::span<const CellResult> results, ExportFormat format, const std::filesystem::path& path) {
  std::vector<ResultRow> rows;
  rows.reserve(results.size());
  for (const auto& r : results) rows.push_back(summarize(r));
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  if (format == ExportFormat::csv) {
    write_results_csv(out, rows);
  } else {
    write_results_geojson(out, rows);
  }
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace trendboot::grid
