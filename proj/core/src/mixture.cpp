#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "trendboot/clustering.hpp"
#include "trendboot/csv.hpp"
#include "trendboot/error.hpp"
#include "trendboot/parallel.hpp"
#include "trendboot/rng.hpp"

namespace trendboot::clustering {

std::string_view to_string(CovarianceFamily family) {
  switch (family) {
    case CovarianceFamily::EII: return "EII";
    case CovarianceFamily::VII: return "VII";
    case CovarianceFamily::EEE: return "EEE";
    case CovarianceFamily::VEV: return "VEV";
    case CovarianceFamily::VVV: return "VVV";
  }
  return "?";
}

CovarianceFamily parse_family(std::string_view code) {
  for (auto f : kAllFamilies) {
    if (to_string(f) == code) return f;
  }
  throw std::invalid_argument("unknown covariance family '" + std::string(code) + "'");
}

std::size_t covariance_parameter_count(CovarianceFamily family, std::size_t k, std::size_t d) {
  switch (family) {
    case CovarianceFamily::EII: return 1;
    case CovarianceFamily::VII: return k;
    case CovarianceFamily::EEE: return d * (d + 1) / 2;
    case CovarianceFamily::VEV: return k + (d - 1) + k * d * (d - 1) / 2;
    case CovarianceFamily::VVV: return k * d * (d + 1) / 2;
  }
  return 0;
}

std::size_t free_parameter_count(CovarianceFamily family, std::size_t k, std::size_t d) {
  return (k - 1) + k * d + covariance_parameter_count(family, k, d);
}

double bic_value(double loglik, std::size_t parameters, std::size_t n) {
  return 2.0 * loglik - static_cast<double>(parameters) * std::log(static_cast<double>(n));
}

namespace {

struct EStep {
  double loglik = 0.0;
  Eigen::MatrixXd responsibilities;
};

EStep e_step(const MixtureModel& model, const Points& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const auto k = static_cast<Eigen::Index>(model.components());
  Eigen::MatrixXd logp(n, k);
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto cs = static_cast<std::size_t>(c);
    Eigen::LLT<Eigen::MatrixXd> llt(model.covariances[cs]);
    if (llt.info() != Eigen::Success) {
      throw DegenerateComponentError(cs, "covariance is not positive definite");
    }
    const Eigen::MatrixXd l = llt.matrixL();
    const double logdet = 2.0 * l.diagonal().array().log().sum();
    if (!std::isfinite(logdet)) throw DegenerateComponentError(cs, "covariance is singular");
    Eigen::MatrixXd centred = (x.rowwise() - model.means[cs].transpose()).transpose();
    llt.matrixL().solveInPlace(centred);
    const Eigen::VectorXd maha = centred.colwise().squaredNorm().transpose();
    logp.col(c) = (-0.5 * (static_cast<double>(d) * log2pi + logdet) + std::log(model.weights[cs])) -
                  0.5 * maha.array();
  }
  EStep out;
  out.responsibilities.resize(n, k);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = logp.row(i).maxCoeff();
    const Eigen::ArrayXd e = (logp.row(i).array() - top).exp().transpose();
    const double s = e.sum();
    total += top + std::log(s);
    out.responsibilities.row(i) = (e / s).transpose();
  }
  out.loglik = total;
  return out;
}

Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& s, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.eigenvalues().minCoeff() >= floor) return 0.5 * (s + s.transpose());
  const Eigen::VectorXd v = eig.eigenvalues().cwiseMax(floor);
  return eig.eigenvectors() * v.asDiagonal() * eig.eigenvectors().transpose();
}

struct MStepContext {
  double floor = 0.0;
  const EmOptions* options = nullptr;
};

void m_step(MixtureModel& model, const Points& x, const Eigen::MatrixXd& z, const MStepContext& ctx) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const auto k = static_cast<std::size_t>(z.cols());
  const double dd = static_cast<double>(d);

  model.weights.assign(k, 0.0);
  model.means.assign(k, Eigen::VectorXd::Zero(d));
  std::vector<Eigen::MatrixXd> scatter(k);
  std::vector<double> nk(k);
  for (std::size_t c = 0; c < k; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    nk[c] = z.col(ci).sum();
    if (!(nk[c] > 1e-8 * static_cast<double>(n))) {
      throw DegenerateComponentError(c, "component has lost its support");
    }
    model.weights[c] = nk[c] / static_cast<double>(n);
    model.means[c] = (x.transpose() * z.col(ci)) / nk[c];
    const Eigen::MatrixXd centred = x.rowwise() - model.means[c].transpose();
    scatter[c] = centred.transpose() * z.col(ci).asDiagonal() * centred;
  }

  model.covariances.assign(k, Eigen::MatrixXd::Identity(d, d));
  switch (model.family) {
    case CovarianceFamily::EII: {
      double tr = 0.0;
      for (const auto& w : scatter) tr += w.trace();
      const double lambda = std::max(tr / (static_cast<double>(n) * dd), ctx.floor);
      for (auto& s : model.covariances) s *= lambda;
      break;
    }
    case CovarianceFamily::VII:
      for (std::size_t c = 0; c < k; ++c) {
        model.covariances[c] *= std::max(scatter[c].trace() / (nk[c] * dd), ctx.floor);
      }
      break;
    case CovarianceFamily::EEE: {
      Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
      for (const auto& w : scatter) pooled += w;
      const Eigen::MatrixXd shared = floor_eigenvalues(pooled / static_cast<double>(n), ctx.floor);
      for (auto& s : model.covariances) s = shared;
      break;
    }
    case CovarianceFamily::VVV:
      for (std::size_t c = 0; c < k; ++c) model.covariances[c] = floor_eigenvalues(scatter[c] / nk[c], ctx.floor);
      break;
    case CovarianceFamily::VEV: {
      // Orientation D_k: eigenvectors of W_k, eigenvalues omega_k descending.
      std::vector<Eigen::MatrixXd> orient(k);
      std::vector<Eigen::VectorXd> omega(k);
      for (std::size_t c = 0; c < k; ++c) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter[c]);
        omega[c] = eig.eigenvalues().reverse().cwiseMax(0.0);
        orient[c] = eig.eigenvectors().rowwise().reverse();
      }
      Eigen::VectorXd shape = model.shape.size() == d ? model.shape : Eigen::VectorXd::Ones(d);
      std::vector<double> lambda(k, 1.0);
      for (std::size_t it = 0; it < ctx.options->shape_iterations; ++it) {
        double change = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          const double next = (omega[c].array() / shape.array()).sum() / (dd * nk[c]);
          change = std::max(change, std::abs(next - lambda[c]) / std::max(next, 1e-300));
          lambda[c] = next;
        }
        Eigen::VectorXd raw = Eigen::VectorXd::Zero(d);
        for (std::size_t c = 0; c < k; ++c) raw += omega[c] / lambda[c];
        raw = raw.cwiseMax(1e-12 * raw.maxCoeff());
        const double geo = std::exp(raw.array().log().mean());
        const Eigen::VectorXd next_shape = raw / geo;
        change = std::max(change, ((next_shape - shape).array().abs() / next_shape.array()).maxCoeff());
        shape = next_shape;
        if (change < ctx.options->shape_tolerance) break;
      }
      const double shape_min = shape.minCoeff();
      model.volumes.assign(k, 0.0);
      for (std::size_t c = 0; c < k; ++c) {
        lambda[c] = std::max(lambda[c], ctx.floor / shape_min);
        model.volumes[c] = lambda[c];
        model.covariances[c] = lambda[c] * orient[c] * shape.asDiagonal() * orient[c].transpose();
        model.covariances[c] = 0.5 * (model.covariances[c] + model.covariances[c].transpose());
      }
      model.shape = shape;
      break;
    }
  }
}

ClusterAssignment to_assignment(Eigen::MatrixXd responsibilities) {
  ClusterAssignment out;
  out.labels.resize(static_cast<std::size_t>(responsibilities.rows()));
  for (Eigen::Index i = 0; i < responsibilities.rows(); ++i) {
    Eigen::Index best = 0;
    responsibilities.row(i).maxCoeff(&best);
    out.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  out.responsibilities = std::move(responsibilities);
  return out;
}

EmFit run_em(const Points& x, std::size_t k, CovarianceFamily family, std::uint64_t init_seed,
             const MStepContext& ctx) {
  const EmOptions& opt = *ctx.options;
  const KMeansResult start = kmeans(x, k, init_seed);

  MixtureModel model;
  model.family = family;
  model.n_points = static_cast<std::size_t>(x.rows());
  m_step(model, x, start.assignment.responsibilities, ctx);

  EStep e = e_step(model, x);
  model.loglik_trace.push_back(e.loglik);
  for (std::size_t iter = 1; iter <= opt.max_iterations; ++iter) {
    m_step(model, x, e.responsibilities, ctx);
    EStep next = e_step(model, x);
    const double prev = e.loglik;
    e = std::move(next);
    model.loglik_trace.push_back(e.loglik);
    model.iterations = iter;
    if (e.loglik - prev < opt.relative_tolerance * std::abs(e.loglik)) {
      model.converged = true;
      break;
    }
  }
  model.loglik = e.loglik;
  model.bic = bic_value(model.loglik, model.parameter_count(), model.n_points);
  return EmFit{std::move(model), to_assignment(std::move(e.responsibilities))};
}

}  // namespace

EmFit em_fit(const Points& points, std::size_t k, CovarianceFamily family, std::uint64_t seed,
             const EmOptions& options) {
  if (k == 0) throw std::invalid_argument("em_fit: K must be positive");
  const auto n = static_cast<std::size_t>(points.rows());
  const auto d = static_cast<std::size_t>(points.cols());
  if (d == 0) throw std::invalid_argument("em_fit: points have dimension 0");
  if (n < k * (d + 1)) {
    throw std::invalid_argument("em_fit: need n >= K*(d+1) = " + std::to_string(k * (d + 1)) + " points, got " +
                                std::to_string(n));
  }
  if (!points.allFinite()) throw std::invalid_argument("em_fit: points contain non-finite values");

  const Eigen::RowVectorXd centre = points.colwise().mean();
  const double data_trace = (points.rowwise() - centre).squaredNorm() / static_cast<double>(n);
  MStepContext ctx;
  ctx.options = &options;
  ctx.floor = options.eigen_floor * (data_trace > 0.0 ? data_trace / static_cast<double>(d) : 1.0);

  const std::size_t restarts = k == 1 ? 1 : std::max<std::size_t>(1, options.restarts);
  std::optional<EmFit> best;
  std::optional<DegenerateComponentError> last_error;
  for (std::size_t r = 0; r < restarts; ++r) {
    try {
      EmFit fit = run_em(points, k, family, derive_seed(seed, "em_init", r), ctx);
      if (!best || fit.model.loglik > best->model.loglik) best = std::move(fit);
    } catch (const DegenerateComponentError& e) {
      last_error = e;
    }
  }
  if (!best) throw *last_error;
  return std::move(*best);
}

double log_likelihood(const MixtureModel& model, const Points& points) { return e_step(model, points).loglik; }

ClusterAssignment assign(const MixtureModel& model, const Points& points) {
  return to_assignment(e_step(model, points).responsibilities);
}

ModelSelection select_model(const Points& points, std::size_t k_min, std::size_t k_max,
                            std::span<const CovarianceFamily> families, std::uint64_t seed, unsigned threads) {
  if (k_min == 0 || k_max < k_min) throw std::invalid_argument("select_model: empty or invalid K range");
  if (families.empty()) throw std::invalid_argument("select_model: no covariance families");

  const std::size_t nf = families.size();
  const std::size_t pairs = (k_max - k_min + 1) * nf;
  std::vector<BicEntry> table(pairs);
  std::vector<std::optional<EmFit>> fits(pairs);
  parallel_for(pairs, threads, [&](std::size_t i) {
    BicEntry& entry = table[i];
    entry.k = k_min + i / nf;
    entry.family = families[i % nf];
    entry.bic = std::numeric_limits<double>::quiet_NaN();
    entry.loglik = std::numeric_limits<double>::quiet_NaN();
    try {
      EmFit fit = em_fit(points, entry.k, entry.family, derive_seed(seed, to_string(entry.family), entry.k));
      entry.fitted = true;
      entry.bic = fit.model.bic;
      entry.loglik = fit.model.loglik;
      entry.converged = fit.model.converged;
      fits[i] = std::move(fit);
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < pairs; ++i) {
    if (table[i].fitted && (!best || table[i].bic > table[*best].bic)) best = i;
  }
  if (!best) {
    std::string message = "select_model: no (K, family) pair could be fitted";
    for (const auto& entry : table) {
      message += "\n  K=" + std::to_string(entry.k) + " " + std::string(to_string(entry.family)) + ": " + entry.error;
    }
    throw Error(message);
  }
  ModelSelection out;
  out.best = std::move(fits[*best]->model);
  out.assignment = std::move(fits[*best]->assignment);
  out.table = std::move(table);
  return out;
}

void write_bic_csv(std::ostream& out, std::span<const BicEntry> table) {
  out << "K,family,bic,loglik,converged\n";
  for (const auto& e : table) {
    out << e.k << ',' << to_string(e.family) << ',' << csv::format_optional_real(e.bic) << ','
        << csv::format_optional_real(e.loglik) << ',' << (e.converged ? "true" : "false") << '\n';
  }
}

void write_assignment_csv(std::ostream& out, const ClusterAssignment& assignment,
                          std::span<const std::string> point_ids) {
  if (point_ids.size() != assignment.labels.size()) {
    throw std::invalid_argument("write_assignment_csv: one id per point required");
  }
  out << "point_id,label,max_responsibility\n";
  for (std::size_t i = 0; i < point_ids.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out << point_ids[i] << ',' << assignment.labels[i] << ','
        << csv::format_real(assignment.responsibilities.row(row).maxCoeff()) << '\n';
  }
}

}  // namespace trendboot::clustering
