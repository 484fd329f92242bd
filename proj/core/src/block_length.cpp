#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trendboot/resampling.hpp"
#include "trendboot/series.hpp"

namespace trendboot::resampling {

namespace {

std::vector<double> observed(std::span<const double> series) {
  std::vector<double> x;
  x.reserve(series.size());
  for (double v : series) {
    if (!std::isnan(v)) x.push_back(v);
  }
  return x;
}

// Flat-top (trapezoidal) kernel.
double flat_top(double t) {
  const double a = std::abs(t);
  if (a <= 0.5) return 1.0;
  if (a <= 1.0) return 2.0 * (1.0 - a);
  return 0.0;
}

}  // namespace

std::size_t politis_white_block_length(std::span<const double> series) {
  std::vector<double> x = observed(series);
  const std::size_t n = x.size();
  if (n < 100) throw std::invalid_argument("politis_white_block_length: need at least 100 observations");
  const double nd = static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= nd;
  for (double& v : x) v -= mean;

  const auto kn = std::max<std::size_t>(5, static_cast<std::size_t>(std::ceil(std::sqrt(std::log10(nd)))));
  const auto m_max = static_cast<std::size_t>(std::ceil(std::sqrt(nd))) + kn;
  const std::size_t max_lag = std::min(n - 1, 2 * m_max + kn);

  std::vector<double> acov(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += x[t] * x[t + k];
    acov[k] = s / nd;
  }
  const std::size_t upper = std::min(max_lag + 1, acov.size());
  const auto upper_clamp = [&](std::size_t v) { return std::min(v, upper - 1); };
  const std::size_t clamp_max = static_cast<std::size_t>(std::ceil(3.0 * std::sqrt(nd)));
  if (!(acov[0] > 0.0)) return 1;

  // Smallest m after which kn consecutive autocorrelations are insignificant.
  const double threshold = 2.0 * std::sqrt(std::log10(nd) / nd);
  std::size_t m_hat = m_max;
  for (std::size_t m = 0; m <= m_max; ++m) {
    bool quiet = true;
    for (std::size_t j = 1; j <= kn; ++j) {
      const std::size_t lag = m + j;
      if (lag > max_lag || std::abs(acov[lag] / acov[0]) >= threshold) {
        quiet = false;
        break;
      }
    }
    if (quiet) {
      m_hat = m;
      break;
    }
  }

  const std::size_t cutoff = upper_clamp(2 * m_hat);
  double g_hat = 0.0;   // sum lambda(k/M) |k| R(k)
  double spec0 = acov[0];  // sum lambda(k/M) R(k)
  for (std::size_t k = 1; k <= cutoff; ++k) {
    const double lambda = flat_top(static_cast<double>(k) / static_cast<double>(cutoff));
    g_hat += 2.0 * lambda * static_cast<double>(k) * acov[k];
    spec0 += 2.0 * lambda * acov[k];
  }
  const double d_hat = 4.0 / 3.0 * spec0 * spec0;
  if (!(d_hat > 0.0) || cutoff == 0) return 1;

  const double b = std::pow(2.0 * g_hat * g_hat / d_hat, 1.0 / 3.0) * std::cbrt(nd);
  const auto rounded = static_cast<std::size_t>(std::ceil(std::max(b, 1.0)));
  return std::clamp<std::size_t>(rounded, 1, clamp_max);
}

std::vector<double> default_weight_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

WeightParamObjective ar1_weight_objective(std::span<const double> residuals, std::span<const double> candidate_grid,
                                          std::size_t inner_replicates, std::uint64_t seed) {
  if (candidate_grid.empty()) throw std::invalid_argument("select_ar1_weight_param: empty candidate grid");
  for (double r : candidate_grid) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("select_ar1_weight_param: candidates must lie in (0, 1)");
  }
  if (inner_replicates < 2) throw std::invalid_argument("select_ar1_weight_param: need at least 2 inner replicates");
  const std::size_t n = residuals.size();
  std::size_t present = 0;
  for (double v : residuals) present += std::isnan(v) ? 0 : 1;
  if (present < 100) throw std::invalid_argument("select_ar1_weight_param: need at least 100 residuals");

  const series::AR1Fit ar = series::fit_ar1(residuals);
  const double marginal_var = ar.innovation_sd * ar.innovation_sd / (1.0 - ar.r * ar.r);

  WeightParamObjective out;
  out.target_variance = series::ar1_mean_variance(ar.r, marginal_var, present);
  out.grid.assign(candidate_grid.begin(), candidate_grid.end());

  const std::size_t k = candidate_grid.size();
  std::vector<double> scale(k);
  for (std::size_t c = 0; c < k; ++c) scale[c] = std::sqrt(1.0 - candidate_grid[c] * candidate_grid[c]);

  // Welford accumulators of the replicate means, one per candidate.
  std::vector<double> mean(k, 0.0);
  std::vector<double> m2(k, 0.0);
  std::vector<double> eta(n);
  std::vector<double> w(k);
  std::vector<double> sums(k);
  NormalDistribution normal;
  const double inv_present = 1.0 / static_cast<double>(present);
  for (std::size_t rep = 0; rep < inner_replicates; ++rep) {
    Engine engine = substream(seed, "ar1_weight_objective", rep);
    for (auto& e : eta) e = normal(engine);
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) w[c] = eta[0];
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0) {
        for (std::size_t c = 0; c < k; ++c) w[c] = candidate_grid[c] * w[c] + scale[c] * eta[t];
      }
      const double e = residuals[t];
      if (std::isnan(e)) continue;
      for (std::size_t c = 0; c < k; ++c) sums[c] += w[c] * e;
    }
    const double count = static_cast<double>(rep + 1);
    for (std::size_t c = 0; c < k; ++c) {
      const double x = sums[c] * inv_present;
      const double delta = x - mean[c];
      mean[c] += delta / count;
      m2[c] += delta * (x - mean[c]);
    }
  }

  out.bootstrap_variance.resize(k);
  out.objective.resize(k);
  std::size_t best = 0;
  for (std::size_t c = 0; c < k; ++c) {
    out.bootstrap_variance[c] = m2[c] / static_cast<double>(inner_replicates - 1);
    out.objective[c] = std::abs(out.target_variance - out.bootstrap_variance[c]);
    if (out.objective[c] < out.objective[best]) best = c;
  }
  out.selected = candidate_grid[best];
  return out;
}

double select_ar1_weight_param(std::span<const double> residuals, std::span<const double> candidate_grid,
                               std::size_t inner_replicates, std::uint64_t seed) {
  return ar1_weight_objective(residuals, candidate_grid, inner_replicates, seed).selected;
}

}  // namespace trendboot::resampling
