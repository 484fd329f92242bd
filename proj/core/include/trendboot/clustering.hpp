#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

// Gaussian-mixture model-based clustering with parameterized covariance
// families and BIC selection, plus a k-means baseline.
namespace trendboot::clustering {

// One row per point.
using Points = Eigen::MatrixXd;

// Covariance families, in the lambda * D * A * D' decomposition:
//   EII  lambda * I             (spherical, equal volume)
//   VII  lambda_k * I           (spherical, varying volume)
//   EEE  Sigma                  (one shared ellipsoid)
//   VEV  lambda_k D_k A D_k'    (shared shape, varying volume and orientation)
//   VVV  Sigma_k                (unconstrained)
enum class CovarianceFamily { EII, VII, EEE, VEV, VVV };

inline constexpr std::array<CovarianceFamily, 5> kAllFamilies{
    CovarianceFamily::EII, CovarianceFamily::VII, CovarianceFamily::EEE, CovarianceFamily::VEV,
    CovarianceFamily::VVV};

[[nodiscard]] std::string_view to_string(CovarianceFamily family);
[[nodiscard]] CovarianceFamily parse_family(std::string_view code);

[[nodiscard]] std::size_t covariance_parameter_count(CovarianceFamily family, std::size_t k, std::size_t d);

// (K - 1) mixing weights + K*d means + covariance parameters.
[[nodiscard]] std::size_t free_parameter_count(CovarianceFamily family, std::size_t k, std::size_t d);

// B = 2 log L - m log n; larger is better.
[[nodiscard]] double bic_value(double loglik, std::size_t parameters, std::size_t n);

struct ClusterAssignment {
  std::vector<int> labels;
  Eigen::MatrixXd responsibilities;  // n x K, rows sum to 1
};

struct KMeansResult {
  ClusterAssignment assignment;
  Eigen::MatrixXd centers;          // K x d
  std::vector<double> wcss_trace;   // within-cluster sum of squares per Lloyd iteration
  std::size_t iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm from k-means++ seeding; stops at an assignment fixed
/// point or after max_iterations. An emptied cluster is re-seeded at the
/// point farthest from its center.
[[nodiscard]] KMeansResult kmeans(const Points& points, std::size_t k, std::uint64_t seed,
                                  std::size_t max_iterations = 300);

struct MixtureModel {
  CovarianceFamily family = CovarianceFamily::VVV;
  std::size_t n_points = 0;
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  // VEV only: shared shape (descending, product 1) and per-component volumes.
  Eigen::VectorXd shape;
  std::vector<double> volumes;
  double loglik = 0.0;
  double bic = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> loglik_trace;  // one entry per E-step

  [[nodiscard]] std::size_t components() const noexcept { return weights.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept {
    return means.empty() ? 0 : static_cast<std::size_t>(means.front().size());
  }
  [[nodiscard]] std::size_t parameter_count() const {
    return free_parameter_count(family, components(), dimension());
  }
};

struct EmOptions {
  std::size_t max_iterations = 500;
  double relative_tolerance = 1e-8;
  std::size_t restarts = 5;
  double shape_tolerance = 1e-6;   // VEV inner M-step
  std::size_t shape_iterations = 200;
  double eigen_floor = 1e-8;       // times trace(data covariance) / d
};

struct EmFit {
  MixtureModel model;
  ClusterAssignment assignment;
};

/// EM from k-means++/Lloyd starts followed by one hard-assignment M-step;
/// the restart with the best final log-likelihood is kept. Requires
/// n >= K*(d+1). Throws DegenerateComponentError when a component loses all
/// support or its covariance cannot be factorized.
[[nodiscard]] EmFit em_fit(const Points& points, std::size_t k, CovarianceFamily family, std::uint64_t seed,
                           const EmOptions& options = {});

[[nodiscard]] double log_likelihood(const MixtureModel& model, const Points& points);
[[nodiscard]] ClusterAssignment assign(const MixtureModel& model, const Points& points);

struct BicEntry {
  std::size_t k = 0;
  CovarianceFamily family = CovarianceFamily::EII;
  double bic = 0.0;     // NaN when not fitted
  double loglik = 0.0;  // NaN when not fitted
  bool fitted = false;
  bool converged = false;
  std::string error;
};

struct ModelSelection {
  MixtureModel best;
  ClusterAssignment assignment;
  std::vector<BicEntry> table;  // ordered by K, then family
};

/// Fits every (K, family) pair and keeps the one with the largest BIC.
/// Throws trendboot::Error listing every pair when none can be fitted.
[[nodiscard]] ModelSelection select_model(const Points& points, std::size_t k_min, std::size_t k_max,
                                          std::span<const CovarianceFamily> families, std::uint64_t seed,
                                          unsigned threads = 1);

[[nodiscard]] double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

// `K,family,bic,loglik,converged`
void write_bic_csv(std::ostream& out, std::span<const BicEntry> table);
// `point_id,label,max_responsibility`
void write_assignment_csv(std::ostream& out, const ClusterAssignment& assignment,
                          std::span<const std::string> point_ids);

}  // namespace trendboot::clustering
