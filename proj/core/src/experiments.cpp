#include "trendboot/experiments.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "trendboot/csv.hpp"
#include "trendboot/parallel.hpp"
#include "trendboot/rng.hpp"
#include "trendboot/series.hpp"
#include "trendboot/trend.hpp"

namespace trendboot::experiments {

namespace {

using resampling::BootstrapConfig;
using resampling::kQuantileLevels;
using resampling::Method;

QuantileSet quantiles_of(const resampling::BootstrapResult& result) {
  QuantileSet q{};
  for (std::size_t j = 0; j < kQuantileLevels.size(); ++j) q[j] = result.quantiles[j].second;
  return q;
}

void check_ar(double r, double sd) {
  if (!(r > -1.0 && r < 1.0)) throw std::invalid_argument("r must lie in (-1, 1)");
  if (!(sd > 0.0)) throw std::invalid_argument("innovation_sd must be positive");
}

}  // namespace

void Table1Config::validate() const {
  if (n < 100) throw std::invalid_argument("table1: n must be at least 100");
  check_ar(r, innovation_sd);
  if (outer == 0 || inner == 0) throw std::invalid_argument("table1: outer and inner must be positive");
  if (select_replicates < 2) throw std::invalid_argument("table1: select_replicates must be at least 2");
  if (block_length && *block_length == 0) throw std::invalid_argument("table1: block_length must be positive");
}

const QuantileRow& Table1Result::row(std::string_view label) const {
  for (const auto& r : rows) {
    if (r.label == label) return r;
  }
  throw std::invalid_argument("no row '" + std::string(label) + "'");
}

Table1Result run_table1(const Table1Config& config) {
  config.validate();
  const std::size_t outer = config.outer;
  std::vector<double> truth(outer);
  std::vector<QuantileSet> block(outer);
  std::vector<QuantileSet> wild(outer);
  std::vector<QuantileSet> dep(outer);
  std::vector<double> selected(outer);
  std::vector<double> blocks(outer);
  const auto grid = resampling::default_weight_grid();

  parallel_for(outer, config.threads, [&](std::size_t i) {
    const auto y = series::simulate_ar1_trend(config.n, config.trend, config.r, config.innovation_sd,
                                              derive_seed(config.seed, "table1_series", i));
    const auto fit = trend::fit_ols_trend(y);
    truth[i] = fit.slope;

    BootstrapConfig b;
    b.replicates = config.inner;
    b.method = Method::moving_block;
    b.block_length = config.block_length;
    b.seed = derive_seed(config.seed, "table1_block", i);
    const auto block_result = resampling::bootstrap_trend(y, b);
    block[i] = quantiles_of(block_result);
    blocks[i] = static_cast<double>(block_result.block_length);

    BootstrapConfig w;
    w.replicates = config.inner;
    w.method = Method::wild;
    w.weights = resampling::IidRademacher{};
    w.seed = derive_seed(config.seed, "table1_wild", i);
    wild[i] = quantiles_of(resampling::bootstrap_trend(y, w));

    selected[i] = resampling::select_ar1_weight_param(fit.residuals, grid, config.select_replicates,
                                                      derive_seed(config.seed, "table1_select", i));
    BootstrapConfig d;
    d.replicates = config.inner;
    d.method = Method::dep_wild_ar1;
    d.weights = resampling::Ar1Weights{selected[i]};
    d.seed = derive_seed(config.seed, "table1_dep", i);
    dep[i] = quantiles_of(resampling::bootstrap_trend(y, d));
  });

  const auto average = [&](const std::vector<QuantileSet>& sets) {
    QuantileSet mean{};
    for (const auto& s : sets) {
      for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += s[j];
    }
    for (auto& v : mean) v /= static_cast<double>(sets.size());
    return mean;
  };

  Table1Result result;
  std::sort(truth.begin(), truth.end());
  QuantileRow truth_row{"ar1_process", {}};
  for (std::size_t j = 0; j < kQuantileLevels.size(); ++j) {
    truth_row.values[j] = resampling::sample_quantile(truth, kQuantileLevels[j]);
  }
  result.rows.push_back(truth_row);
  result.rows.push_back({"moving_block", average(block)});
  result.rows.push_back({"wild", average(wild)});
  result.rows.push_back({"dep_wild_ar1", average(dep)});
  for (std::size_t i = 0; i < outer; ++i) {
    result.mean_selected_r += selected[i] / static_cast<double>(outer);
    result.mean_block_length += blocks[i] / static_cast<double>(outer);
  }
  return result;
}

void write_quantile_table_csv(std::ostream& out, const std::vector<QuantileRow>& rows, double scale) {
  out << "method,q2.5,q5,q25,q50,q75,q95,q97.5\n";
  for (const auto& row : rows) {
    out << row.label;
    for (double v : row.values) out << ',' << csv::format_real(v * scale);
    out << '\n';
  }
}

void Table2Config::validate() const {
  if (years.empty()) throw std::invalid_argument("table2: no year counts");
  for (int y : years) {
    if (y < 1) throw std::invalid_argument("table2: year counts must be positive");
  }
  check_ar(r, innovation_sd);
  if (outer == 0 || inner == 0) throw std::invalid_argument("table2: outer and inner must be positive");
  if (select_replicates < 2) throw std::invalid_argument("table2: select_replicates must be at least 2");
  if (method != Method::dep_wild_ar1 && method != Method::wild) {
    throw std::invalid_argument("table2: method must be dep_wild_ar1 or wild");
  }
}

std::vector<Table2Row> run_table2(const Table2Config& config) {
  config.validate();
  const auto grid = resampling::default_weight_grid();
  std::vector<Table2Row> rows;
  for (int years : config.years) {
    const std::size_t n = 365 * static_cast<std::size_t>(years);
    std::vector<double> negative(config.outer);
    std::vector<double> selected(config.outer, 0.0);
    const auto stream = static_cast<std::uint64_t>(years);
    parallel_for(config.outer, config.threads, [&](std::size_t i) {
      const std::uint64_t seed = derive_seed(derive_seed(config.seed, "table2", stream), "series", i);
      const auto y = series::simulate_ar1_trend(n, config.trend, config.r, config.innovation_sd, seed);
      BootstrapConfig b;
      b.replicates = config.inner;
      b.method = config.method;
      b.seed = derive_seed(seed, "bootstrap");
      if (config.method == Method::wild) {
        b.weights = resampling::IidRademacher{};
      } else {
        const auto fit = trend::fit_ols_trend(y);
        selected[i] = resampling::select_ar1_weight_param(fit.residuals, grid, config.select_replicates,
                                                          derive_seed(seed, "select"));
        b.weights = resampling::Ar1Weights{selected[i]};
      }
      const auto result = resampling::bootstrap_trend(y, b);
      const auto count = std::count_if(result.slope_replicates.begin(), result.slope_replicates.end(),
                                       [](double s) { return s <= 0.0; });
      negative[i] = static_cast<double>(count) / static_cast<double>(result.slope_replicates.size());
    });
    Table2Row row;
    row.years = years;
    row.n = n;
    for (std::size_t i = 0; i < config.outer; ++i) {
      row.negative_percent += 100.0 * negative[i] / static_cast<double>(config.outer);
      row.mean_selected_r += selected[i] / static_cast<double>(config.outer);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_table2_csv(std::ostream& out, const std::vector<Table2Row>& rows) {
  out << "years,n,negative_percent\n";
  for (const auto& row : rows) {
    out << row.years << ',' << row.n << ',' << csv::format_real(row.negative_percent) << '\n';
  }
}

}  // namespace trendboot::experiments
