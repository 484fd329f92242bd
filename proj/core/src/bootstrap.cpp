#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trendboot/error.hpp"
#include "trendboot/parallel.hpp"
#include "trendboot/resampling.hpp"
#include "trendboot/trend.hpp"

namespace trendboot::resampling {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::efron:
      return "efron";
    case Method::wild:
      return "wild";
    case Method::dep_wild_ar1:
      return "dep_wild_ar1";
    case Method::dep_wild_kernel:
      return "dep_wild_kernel";
    case Method::moving_block:
      return "moving_block";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::efron, Method::wild, Method::dep_wild_ar1, Method::dep_wild_kernel,
                   Method::moving_block}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown bootstrap method '" + std::string(name) + "'");
}

void BootstrapConfig::validate() const {
  if (replicates == 0) throw std::invalid_argument("bootstrap: replicates must be positive");
  if (block_length && method != Method::moving_block) {
    throw std::invalid_argument("bootstrap: block_length is only valid with moving_block");
  }
  if (block_length && *block_length == 0) throw std::invalid_argument("bootstrap: block_length must be positive");
  switch (method) {
    case Method::efron:
    case Method::moving_block:
      if (weights) throw std::invalid_argument("bootstrap: weight process is only valid with weighted methods");
      break;
    case Method::wild:
      if (!weights || !(std::holds_alternative<IidRademacher>(*weights) ||
                        std::holds_alternative<IidNormal>(*weights))) {
        throw std::invalid_argument("bootstrap: wild requires iid_rademacher or iid_normal weights");
      }
      break;
    case Method::dep_wild_ar1:
      if (!weights || !std::holds_alternative<Ar1Weights>(*weights)) {
        throw std::invalid_argument("bootstrap: dep_wild_ar1 requires ar1 weights");
      }
      break;
    case Method::dep_wild_kernel:
      if (!weights || !std::holds_alternative<KernelMvn>(*weights)) {
        throw std::invalid_argument("bootstrap: dep_wild_kernel requires kernel_mvn weights");
      }
      break;
  }
}

double BootstrapResult::quantile_at(double level) const {
  for (const auto& [l, v] : quantiles) {
    if (std::abs(l - level) < 1e-12) return v;
  }
  throw std::invalid_argument("quantile level not reported");
}

double sample_quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw std::invalid_argument("sample_quantile: empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("sample_quantile: level outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BootstrapResult bootstrap_trend(std::span<const double> series, const BootstrapConfig& config) {
  config.validate();
  const trend::TrendFit fit = trend::fit_ols_trend(series);
  const trend::SlopeDesign design(series);
  const std::size_t n = series.size();

  std::vector<std::size_t> present;
  present.reserve(fit.n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isnan(series[i])) present.push_back(i);
  }
  std::vector<double> fitted(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> compact_residuals;
  compact_residuals.reserve(present.size());
  for (std::size_t i : present) {
    fitted[i] = fit.intercept + fit.slope * static_cast<double>(i + 1);
    compact_residuals.push_back(fit.residuals[i]);
  }

  BootstrapResult result;
  result.point_estimate = fit.slope;

  std::size_t block = 0;
  if (config.method == Method::moving_block) {
    block = config.block_length ? *config.block_length : politis_white_block_length(fit.residuals);
    block = std::min(block, compact_residuals.size());
    result.block_length = block;
  }

  std::optional<WeightGenerator> generator;
  if (config.weights) generator.emplace(*config.weights, n);

  const std::string_view stream = to_string(config.method);
  result.slope_replicates.assign(config.replicates, 0.0);
  parallel_for(config.replicates, config.threads, [&](std::size_t rep) {
    Engine engine = substream(config.seed, stream, rep);
    std::vector<double> y(fitted);
    switch (config.method) {
      case Method::efron: {
        std::uniform_int_distribution<std::size_t> pick(0, compact_residuals.size() - 1);
        for (std::size_t i : present) y[i] += compact_residuals[pick(engine)];
        break;
      }
      case Method::wild:
      case Method::dep_wild_ar1:
      case Method::dep_wild_kernel: {
        std::vector<double> w(n);
        generator->fill(w, engine);
        for (std::size_t i : present) y[i] += w[i] * fit.residuals[i];
        break;
      }
      case Method::moving_block: {
        const std::size_t m = compact_residuals.size();
        std::uniform_int_distribution<std::size_t> start(0, m - 1);
        std::size_t filled = 0;
        while (filled < m) {
          const std::size_t s = start(engine);
          for (std::size_t j = 0; j < block && filled < m; ++j, ++filled) {
            y[present[filled]] += compact_residuals[(s + j) % m];
          }
        }
        break;
      }
    }
    result.slope_replicates[rep] = design.slope(y);
  });

  std::vector<double> sorted(result.slope_replicates);
  std::sort(sorted.begin(), sorted.end());
  for (double level : kQuantileLevels) result.quantiles.emplace_back(level, sample_quantile(sorted, level));
  return result;
}

double slope_significance(const BootstrapResult& result) {
  if (result.slope_replicates.size() < 100) {
    throw std::invalid_argument("slope_significance: need at least 100 replicates");
  }
  const auto nonpositive = std::count_if(result.slope_replicates.begin(), result.slope_replicates.end(),
                                         [](double s) { return s <= 0.0; });
  return static_cast<double>(nonpositive) / static_cast<double>(result.slope_replicates.size());
}

}  // namespace trendboot::resampling
