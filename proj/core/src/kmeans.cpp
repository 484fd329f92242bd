#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "trendboot/clustering.hpp"
#include "trendboot/rng.hpp"

namespace trendboot::clustering {

namespace {

std::size_t distinct_rows(const Points& points) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), 0);
  const auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (points(a, j) != points(b, j)) return points(a, j) < points(b, j);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t count = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (less(order[i - 1], order[i])) ++count;
  }
  return count;
}

Eigen::MatrixXd plus_plus_centers(const Points& points, std::size_t k, Engine& engine) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(k), points.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = points.row(first(engine));
  Eigen::VectorXd nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = unit(engine) * total;
      for (pick = 0; pick < n - 1; ++pick) {
        u -= nearest(pick);
        if (u < 0.0 && nearest(pick) > 0.0) break;
      }
      // skip already-chosen (zero distance) points that the scan stopped on
      while (nearest(pick) <= 0.0 && pick > 0) --pick;
    }
    centers.row(static_cast<Eigen::Index>(c)) = points.row(pick);
    nearest = nearest.cwiseMin((points.rowwise() - centers.row(static_cast<Eigen::Index>(c))).rowwise().squaredNorm());
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const Points& points, std::size_t k, std::uint64_t seed, std::size_t max_iterations) {
  if (k == 0) throw std::invalid_argument("kmeans: K must be positive");
  if (points.rows() == 0) throw std::invalid_argument("kmeans: no points");
  if (k > distinct_rows(points)) throw std::invalid_argument("kmeans: K exceeds the number of distinct points");

  const Eigen::Index n = points.rows();
  const auto kk = static_cast<Eigen::Index>(k);
  Engine engine = substream(seed, "kmeans");

  KMeansResult result;
  result.centers = plus_plus_centers(points, k, engine);
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd dist(n);

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      const double d = (result.centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
      dist(i) = d;
      wcss += d;
      if (labels[static_cast<std::size_t>(i)] != static_cast<int>(best)) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    result.wcss_trace.push_back(wcss);
    result.iterations = iter + 1;
    if (!changed) {
      result.converged = true;
      break;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(kk, points.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto l = labels[static_cast<std::size_t>(i)];
      sums.row(l) += points.row(i);
      ++counts[static_cast<std::size_t>(l)];
    }
    for (Eigen::Index c = 0; c < kk; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        result.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      Eigen::Index far = 0;
      dist.maxCoeff(&far);
      result.centers.row(c) = points.row(far);
      dist(far) = 0.0;
    }
  }

  result.assignment.labels = labels;
  result.assignment.responsibilities = Eigen::MatrixXd::Zero(n, kk);
  for (Eigen::Index i = 0; i < n; ++i) result.assignment.responsibilities(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  return result;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: label vectors differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<double> table(static_cast<std::size_t>(ka * kb), 0.0);
  std::vector<double> rows(static_cast<std::size_t>(ka), 0.0);
  std::vector<double> cols(static_cast<std::size_t>(kb), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    table[static_cast<std::size_t>(a[i] * kb + b[i])] += 1.0;
    rows[static_cast<std::size_t>(a[i])] += 1.0;
    cols[static_cast<std::size_t>(b[i])] += 1.0;
  }
  const auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0;
  for (double v : table) index += pairs(v);
  double sum_rows = 0.0;
  for (double v : rows) sum_rows += pairs(v);
  double sum_cols = 0.0;
  for (double v : cols) sum_cols += pairs(v);
  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

}  // namespace trendboot::clustering
