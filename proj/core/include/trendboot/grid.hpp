#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "trendboot/series.hpp"
#include "trendboot/trend.hpp"

// Gridded data ingestion, the per-cell analysis pipeline and result export.
namespace trendboot::grid {

struct Cell {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
};

/// Cells sorted by id; series[i] belongs to cells[i].
struct GridDataset {
  std::vector<Cell> cells;
  std::vector<series::DailySeries> series;
  double resolution = 0.0;  // smallest coordinate step in degrees, 0 for a single cell

  [[nodiscard]] std::size_t size() const noexcept { return cells.size(); }
  [[nodiscard]] std::optional<std::size_t> find(std::string_view cell_id) const;
};

/// CSV with header `cell_id,lat,lon,date,value`. Each cell gets a contiguous
/// series over its own date range, absent days missing. Throws ParseError
/// (with line number) on malformed rows and IntegrityError on duplicate
/// (cell, date) pairs or inconsistent coordinates.
[[nodiscard]] GridDataset ingest_grid_csv(std::istream& in);
[[nodiscard]] GridDataset ingest_grid_csv(const std::filesystem::path& path);
void write_grid_csv(std::ostream& out, const GridDataset& dataset);

struct AnalysisConfig {
  double span = series::kDefaultLoessSpan;
  int first_year = 1950;
  int last_year = 2015;
  int k_max = trend::kDefaultCurveLength;
  // Segments bootstrapped per cell; the first two feed the acceleration test.
  std::vector<int> k_compare{20, 30};
  std::size_t replicates = 100;
  std::size_t select_replicates = 200;
  std::vector<double> weight_grid;  // empty = 0.05 .. 0.95
  double missing_threshold = 0.2;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

struct SegmentBootstrap {
  int k = 0;
  double selected_r = 0.0;
  double slope = 0.0;
  std::vector<double> replicates;
};

struct CellResult {
  std::string cell_id;
  double lat = 0.0;
  double lon = 0.0;
  double missing_fraction = 0.0;
  bool excluded = false;  // too many missing days; not analyzed or clustered
  trend::CoefficientCurve curve;
  double max_coeff = 0.0;
  double r2_max = 0.0;         // R^2 of the segment attaining max_coeff
  double sig_fraction = 0.0;   // P*(x_{k2} > x_{k1}) for the first two k_compare values
  double p_nonpositive = 0.0;  // fraction of x_{k1} replicates <= 0
  bool pairing_mismatch = false;
  std::vector<SegmentBootstrap> segments;
  std::optional<int> cluster;
};

struct AccelerationResult {
  double fraction = 0.0;
  std::size_t pairs = 0;
  bool length_mismatch = false;
};

/// Fraction of index-paired replicates with later > earlier; ties count 1/2.
/// Unequal lengths are paired up to the shorter one and flagged.
[[nodiscard]] AccelerationResult acceleration_significance(std::span<const double> earlier,
                                                           std::span<const double> later);

// Per-cell seed derived from the master seed and the cell id.
[[nodiscard]] std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view cell_id);

/// standardize -> optional NAO adjustment -> sliding trend curve ->
/// dependent wild bootstrap (AR(1) weights, selected r) for each k_compare
/// segment. Does not apply the missing-data threshold.
[[nodiscard]] CellResult analyze_cell(const series::DailySeries& series, const series::DailySeries* nao,
                                      const AnalysisConfig& config, std::uint64_t seed);

struct CellFailure {
  std::string cell_id;
  std::string message;
};

struct GridAnalysis {
  std::vector<CellResult> results;  // sorted by cell_id, failed cells omitted
  std::vector<CellFailure> failures;
};

/// Runs analyze_cell over every cell, in parallel. Cells whose missing
/// fraction over the year span exceeds the threshold are returned flagged
/// as excluded. Output is independent of the thread count.
[[nodiscard]] GridAnalysis analyze_grid(const GridDataset& dataset, const series::DailySeries* nao,
                                        const AnalysisConfig& config);

// Curves of the analyzed, non-excluded cells with a complete curve, one row
// per cell; `rows` receives the index into `results` of each row.
[[nodiscard]] Eigen::MatrixXd curve_matrix(std::span<const CellResult> results, std::vector<std::size_t>& rows);

// ---------------------------------------------------------------------------
// Export

struct ResultRow {
  std::string cell_id;
  double lat = 0.0;
  double lon = 0.0;
  double max_coeff = 0.0;
  double r2_max = 0.0;
  double sig_fraction = 0.0;
  double p_nonpositive = 0.0;
  std::optional<int> cluster;
};

enum class ExportFormat { csv, geojson };

// Excluded cells export NaN metrics (empty CSV fields, JSON null).
[[nodiscard]] ResultRow summarize(const CellResult& result);

// `cell_id,lat,lon,max_coeff,r2_max,sig_fraction,p_nonpositive,cluster`
void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);
[[nodiscard]] std::vector<ResultRow> read_results_csv(std::istream& in);

// FeatureCollection of Point features carrying the CSV columns as properties.
void write_results_geojson(std::ostream& out, std::span<const ResultRow> rows);
[[nodiscard]] std::vector<ResultRow> read_results_geojson(std::istream& in);

/// Throws IoError when the path cannot be written.
void export_results(std::span<const CellResult> results, ExportFormat format, const std::filesystem::path& path);

}  // namespace trendboot::grid
