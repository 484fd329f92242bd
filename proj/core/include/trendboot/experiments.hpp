#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trendboot/resampling.hpp"

// Seeded simulation studies comparing bootstrap confidence intervals for a
// trend slope under AR(1) errors.
namespace trendboot::experiments {

struct Table1Config {
  std::size_t n = 23360;
  double r = 0.812;
  double trend = 8.6e-5;
  double innovation_sd = 1.874;
  std::size_t outer = 500;
  std::size_t inner = 500;
  std::size_t select_replicates = 200;
  std::optional<std::size_t> block_length;  // nullopt: Politis-White per series
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

using QuantileSet = std::array<double, resampling::kQuantileLevels.size()>;

struct QuantileRow {
  std::string label;
  QuantileSet values{};  // slope units (per step)

  [[nodiscard]] double width() const { return values.back() - values.front(); }
};

struct Table1Result {
  // ar1_process, moving_block, wild, dep_wild_ar1
  std::vector<QuantileRow> rows;
  double mean_selected_r = 0.0;
  double mean_block_length = 0.0;

  [[nodiscard]] const QuantileRow& row(std::string_view label) const;
};

/// `outer` simulated series y_t = trend*t + AR(1). The ar1_process row holds
/// the empirical quantiles of the fitted slopes; each bootstrap row averages
/// the per-series bootstrap quantiles over the outer simulations.
[[nodiscard]] Table1Result run_table1(const Table1Config& config);

// `method,q2.5,q5,q25,q50,q75,q95,q97.5`, values multiplied by `scale`.
void write_quantile_table_csv(std::ostream& out, const std::vector<QuantileRow>& rows, double scale = 1e5);

struct Table2Config {
  std::vector<int> years{10, 30, 60};
  double trend = 1e-4;
  double r = 0.9;
  double innovation_sd = std::sqrt(0.19);
  std::size_t outer = 100;
  std::size_t inner = 500;
  std::size_t select_replicates = 200;
  // dep_wild_ar1 (r selected per series) or wild (Rademacher).
  resampling::Method method = resampling::Method::dep_wild_ar1;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

struct Table2Row {
  int years = 0;
  std::size_t n = 0;
  double negative_percent = 0.0;  // mean over series of 100 * P*(slope <= 0)
  double mean_selected_r = 0.0;
};

[[nodiscard]] std::vector<Table2Row> run_table2(const Table2Config& config);

// `years,n,negative_percent`
void write_table2_csv(std::ostream& out, const std::vector<Table2Row>& rows);

}  // namespace trendboot::experiments
