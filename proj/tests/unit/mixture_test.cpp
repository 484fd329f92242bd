#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "test_support.hpp"
#include "trendboot/clustering.hpp"
#include "trendboot/error.hpp"

namespace cl = trendboot::clustering;
using namespace testing_support;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Eigen::Matrix2d rotation(double degrees) {
  const double a = degrees * std::numbers::pi / 180.0;
  Eigen::Matrix2d r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

// Draws from N(mean, cov) via a Cholesky factor.
void draw_gaussian(MatrixXd& x, Eigen::Index row0, Eigen::Index count, const VectorXd& mean, const MatrixXd& cov,
                   Gen& gen) {
  const MatrixXd l = cov.llt().matrixL();
  for (Eigen::Index i = 0; i < count; ++i) {
    VectorXd z(mean.size());
    for (auto& v : z) v = gen.normal();
    x.row(row0 + i) = (mean + l * z).transpose();
  }
}

// Three VEV components: shape diag(4,1)/2, volumes 1/2/4, rotations 0/45/90.
MatrixXd vev_sample(std::size_t n, Gen& gen, std::vector<int>& labels) {
  const Eigen::Matrix2d shape = Eigen::Vector2d(2.0, 0.5).asDiagonal();
  const double volumes[] = {1.0, 2.0, 4.0};
  const double angles[] = {0.0, 45.0, 90.0};
  const Eigen::Vector2d centers[] = {{0.0, 0.0}, {12.0, 0.0}, {0.0, 12.0}};
  MatrixXd x(static_cast<Eigen::Index>(n), 2);
  const auto per = static_cast<Eigen::Index>(n / 3);
  for (int c = 0; c < 3; ++c) {
    const Eigen::Matrix2d d = rotation(angles[c]);
    draw_gaussian(x, c * per, per, centers[c], volumes[c] * d * shape * d.transpose(), gen);
    labels.insert(labels.end(), static_cast<std::size_t>(per), c);
  }
  return x;
}

VectorXd normalized_shape(const MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  VectorXd ev = es.eigenvalues().reverse();
  return ev / std::pow(ev.prod(), 1.0 / static_cast<double>(ev.size()));
}

MatrixXd random_points(Gen& gen, Eigen::Index n, Eigen::Index d, int groups) {
  MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      x(i, j) = gen.normal(0.0, 1.0 + 0.5 * static_cast<double>(j)) + 4.0 * static_cast<double>((i + j) % groups);
  return x;
}

// Covariance parametrizations per family, mapped to the stacked lower
// triangles of all K matrices. The Jacobian rank is the number of free
// covariance parameters.
MatrixXd spd_from(const VectorXd& theta, Eigen::Index& at, Eigen::Index d) {
  MatrixXd l = MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = j; i < d; ++i) l(i, j) = theta(at++);
  return l * l.transpose();
}

MatrixXd orthogonal_from(const VectorXd& theta, Eigen::Index& at, Eigen::Index d) {
  MatrixXd s = MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = j + 1; i < d; ++i) {
      s(i, j) = theta(at++);
      s(j, i) = -s(i, j);
    }
  const MatrixXd id = MatrixXd::Identity(d, d);
  return (id - s).lu().solve(id + s);  // Cayley transform
}

std::vector<MatrixXd> covariances_from(cl::CovarianceFamily family, const VectorXd& theta, Eigen::Index k,
                                       Eigen::Index d) {
  std::vector<MatrixXd> out;
  Eigen::Index at = 0;
  const MatrixXd id = MatrixXd::Identity(d, d);
  switch (family) {
    case cl::CovarianceFamily::EII: {
      const double lambda = theta(at++);
      for (Eigen::Index c = 0; c < k; ++c) out.push_back(lambda * id);
      break;
    }
    case cl::CovarianceFamily::VII:
      for (Eigen::Index c = 0; c < k; ++c) out.push_back(theta(at++) * id);
      break;
    case cl::CovarianceFamily::EEE: {
      const MatrixXd s = spd_from(theta, at, d);
      for (Eigen::Index c = 0; c < k; ++c) out.push_back(s);
      break;
    }
    case cl::CovarianceFamily::VVV:
      for (Eigen::Index c = 0; c < k; ++c) out.push_back(spd_from(theta, at, d));
      break;
    case cl::CovarianceFamily::VEV: {
      VectorXd log_shape(d);
      for (Eigen::Index j = 0; j < d; ++j) log_shape(j) = theta(at++);
      log_shape.array() -= log_shape.mean();
      const MatrixXd a = log_shape.array().exp().matrix().asDiagonal();
      std::vector<double> lambdas;
      for (Eigen::Index c = 0; c < k; ++c) lambdas.push_back(theta(at++));
      for (Eigen::Index c = 0; c < k; ++c) {
        const MatrixXd rot = orthogonal_from(theta, at, d);
        out.push_back(lambdas[static_cast<std::size_t>(c)] * rot * a * rot.transpose());
      }
      break;
    }
  }
  return out;
}

Eigen::Index raw_parameter_count(cl::CovarianceFamily family, Eigen::Index k, Eigen::Index d) {
  switch (family) {
    case cl::CovarianceFamily::EII: return 1;
    case cl::CovarianceFamily::VII: return k;
    case cl::CovarianceFamily::EEE: return d * (d + 1) / 2;
    case cl::CovarianceFamily::VVV: return k * d * (d + 1) / 2;
    case cl::CovarianceFamily::VEV: return d + k + k * d * (d - 1) / 2;  // one redundant shape coordinate
  }
  return 0;
}

VectorXd stack(const std::vector<MatrixXd>& covs) {
  std::vector<double> v;
  for (const auto& c : covs)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      for (Eigen::Index i = j; i < c.rows(); ++i) v.push_back(c(i, j));
  return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::Index jacobian_rank(cl::CovarianceFamily family, Eigen::Index k, Eigen::Index d, Gen& gen) {
  const Eigen::Index p = raw_parameter_count(family, k, d);
  VectorXd theta(p);
  for (auto& v : theta) v = gen.uniform(0.3, 1.5);
  const double h = 1e-6;
  const VectorXd base = stack(covariances_from(family, theta, k, d));
  MatrixXd jac(base.size(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    VectorXd up = theta, down = theta;
    up(j) += h;
    down(j) -= h;
    jac.col(j) = (stack(covariances_from(family, up, k, d)) - stack(covariances_from(family, down, k, d))) / (2 * h);
  }
  Eigen::JacobiSVD<MatrixXd> svd(jac);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > 1e-6 * s(0);
  return rank;
}

}  // namespace

TEST(ParameterCount, ClosedForms) {
  using F = cl::CovarianceFamily;
  EXPECT_EQ(cl::covariance_parameter_count(F::EII, 3, 4), 1u);
  EXPECT_EQ(cl::covariance_parameter_count(F::VII, 3, 4), 3u);
  EXPECT_EQ(cl::covariance_parameter_count(F::EEE, 3, 4), 10u);
  EXPECT_EQ(cl::covariance_parameter_count(F::VEV, 3, 4), 3u + 3u + 18u);
  EXPECT_EQ(cl::covariance_parameter_count(F::VVV, 3, 4), 30u);
  EXPECT_EQ(cl::free_parameter_count(F::VVV, 3, 4), 2u + 12u + 30u);
}

TEST(ParameterCount, MatchesJacobianRank) {
  Gen gen(1);
  for (auto family : cl::kAllFamilies) {
    for (auto [k, d] : {std::pair<Eigen::Index, Eigen::Index>{2, 3}, {3, 4}, {1, 2}}) {
      EXPECT_EQ(static_cast<std::size_t>(jacobian_rank(family, k, d, gen)),
                cl::covariance_parameter_count(family, static_cast<std::size_t>(k), static_cast<std::size_t>(d)))
          << cl::to_string(family) << " K=" << k << " d=" << d;
    }
  }
}

TEST(Families, NamesRoundTrip) {
  for (auto f : cl::kAllFamilies) EXPECT_EQ(cl::parse_family(cl::to_string(f)), f);
  EXPECT_THROW((void)cl::parse_family("XYZ"), std::invalid_argument);
}

TEST(EmFit, SingleSphericalGaussian) {
  Gen gen(2);
  const double sd = 2.0;
  const std::size_t n = 4000;
  const auto x = spherical_mixture({Eigen::Vector3d(1.0, -2.0, 0.5)}, n, sd, gen);
  const auto fit = cl::em_fit(x, 1, cl::CovarianceFamily::EII, 3);
  const VectorXd truth = Eigen::Vector3d(1.0, -2.0, 0.5);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(fit.model.means[0](j), truth(j), 3.0 * sd / std::sqrt(n));
  const MatrixXd& cov = fit.model.covariances[0];
  EXPECT_NEAR(cov(0, 0), sd * sd, 0.1 * sd * sd);
  EXPECT_EQ(cov(0, 1), 0.0);
  EXPECT_EQ(cov(0, 0), cov(2, 2));
  EXPECT_NEAR(fit.model.weights[0], 1.0, 1e-15);
}

TEST(EmFit, RecoversVevMixture) {
  Gen gen(4);
  std::vector<int> truth;
  const auto x = vev_sample(3000, gen, truth);
  const auto fit = cl::em_fit(x, 3, cl::CovarianceFamily::VEV, 5);
  const VectorXd first = normalized_shape(fit.model.covariances[0]);
  for (const auto& cov : fit.model.covariances) {
    EXPECT_LT((normalized_shape(cov) - first).cwiseAbs().maxCoeff(), 1e-4);
  }
  EXPECT_NEAR(fit.model.shape.prod(), 1.0, 1e-6);
  EXPECT_GE(cl::adjusted_rand_index(fit.assignment.labels, truth), 0.95);
  // Shape close to the generating (2, 0.5).
  EXPECT_NEAR(first(0), 2.0, 0.2);
}

TEST(EmFit, LogLikelihoodNeverDecreases) {
  Gen gen(6);
  for (int instance = 0; instance < 50; ++instance) {
    const auto family = cl::kAllFamilies[static_cast<std::size_t>(instance) % cl::kAllFamilies.size()];
    const auto d = static_cast<Eigen::Index>(gen.integer(1, 4));
    const auto x = random_points(gen, static_cast<Eigen::Index>(gen.integer(60, 300)), d, 3);
    const auto k = static_cast<std::size_t>(gen.integer(1, 4));
    cl::EmFit fit;
    try {
      fit = cl::em_fit(x, k, family, static_cast<std::uint64_t>(instance));
    } catch (const trendboot::DegenerateComponentError&) {
      continue;
    }
    const auto& trace = fit.model.loglik_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      EXPECT_GE(trace[i], trace[i - 1] - 1e-9 * std::max(1.0, std::abs(trace[i - 1])))
          << "instance " << instance << " " << cl::to_string(family) << " step " << i;
    }
  }
}

TEST(EmFit, ModelInvariants) {
  Gen gen(7);
  const auto x = random_points(gen, 200, 3, 3);
  for (auto family : cl::kAllFamilies) {
    const auto fit = cl::em_fit(x, 3, family, 8);
    const auto& m = fit.model;
    double wsum = 0.0;
    for (double w : m.weights) {
      EXPECT_GT(w, 0.0);
      wsum += w;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-10);
    for (const auto& cov : m.covariances) {
      EXPECT_LT((cov - cov.transpose()).norm(), 1e-12);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatrixXd>(cov).eigenvalues().minCoeff(), 0.0);
    }
    const auto& resp = fit.assignment.responsibilities;
    for (Eigen::Index i = 0; i < resp.rows(); ++i) {
      EXPECT_NEAR(resp.row(i).sum(), 1.0, 1e-10);
      Eigen::Index arg;
      resp.row(i).maxCoeff(&arg);
      EXPECT_EQ(fit.assignment.labels[static_cast<std::size_t>(i)], arg);
    }
    EXPECT_EQ(m.bic, cl::bic_value(m.loglik, m.parameter_count(), 200));
    EXPECT_DOUBLE_EQ(m.bic, 2.0 * m.loglik - static_cast<double>(m.parameter_count()) * std::log(200.0));
    EXPECT_NEAR(cl::log_likelihood(m, x), m.loglik, 1e-8 * std::abs(m.loglik));
  }
}

TEST(EmFit, ComponentRelabelingChangesNothing) {
  Gen gen(9);
  const auto x = random_points(gen, 150, 2, 3);
  const auto fit = cl::em_fit(x, 3, cl::CovarianceFamily::VVV, 1);
  auto permuted = fit.model;
  const std::size_t order[] = {2, 0, 1};
  for (std::size_t c = 0; c < 3; ++c) {
    permuted.weights[c] = fit.model.weights[order[c]];
    permuted.means[c] = fit.model.means[order[c]];
    permuted.covariances[c] = fit.model.covariances[order[c]];
  }
  EXPECT_NEAR(cl::log_likelihood(permuted, x), fit.model.loglik, 1e-9 * std::abs(fit.model.loglik));
  EXPECT_DOUBLE_EQ(cl::adjusted_rand_index(cl::assign(permuted, x).labels, fit.assignment.labels), 1.0);
}

TEST(EmFit, RowOrderDoesNotChangeTheFit) {
  Gen gen(10);
  const auto x = spherical_mixture({Eigen::Vector2d(0, 0), Eigen::Vector2d(8, 0), Eigen::Vector2d(0, 8)}, 60, 1.0,
                                   gen);
  MatrixXd reversed = x.colwise().reverse();
  const auto a = cl::em_fit(x, 3, cl::CovarianceFamily::VII, 2);
  const auto b = cl::em_fit(reversed, 3, cl::CovarianceFamily::VII, 2);
  EXPECT_NEAR(a.model.bic, b.model.bic, 1e-6 * std::abs(a.model.bic));
  std::vector<int> b_back(b.assignment.labels.rbegin(), b.assignment.labels.rend());
  EXPECT_DOUBLE_EQ(cl::adjusted_rand_index(a.assignment.labels, b_back), 1.0);
}

TEST(EmFit, RejectsBadInput) {
  MatrixXd x = MatrixXd::Random(5, 2);
  EXPECT_THROW((void)cl::em_fit(x, 2, cl::CovarianceFamily::EII, 0), std::invalid_argument);  // 5 < 2*3
  x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW((void)cl::em_fit(x, 1, cl::CovarianceFamily::EII, 0), std::invalid_argument);
}

TEST(SelectModel, FindsThreeSeparatedComponents) {
  Gen gen(11);
  std::vector<int> truth;
  const auto x = spherical_mixture({Eigen::Vector2d(0, 0), Eigen::Vector2d(10, 0), Eigen::Vector2d(5, 9)}, 100, 1.0,
                                   gen, &truth);
  const std::vector<cl::CovarianceFamily> families{cl::CovarianceFamily::EII, cl::CovarianceFamily::VVV};
  const auto sel = cl::select_model(x, 1, 8, families, 12);
  EXPECT_EQ(sel.best.components(), 3u);
  EXPECT_EQ(sel.table.size(), 16u);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : sel.table)
    if (e.fitted) best = std::max(best, e.bic);
  EXPECT_EQ(sel.best.bic, best);
  EXPECT_DOUBLE_EQ(cl::adjusted_rand_index(sel.assignment.labels, truth), 1.0);
}

TEST(SelectModel, ThreadCountDoesNotMatter) {
  Gen gen(13);
  const auto x = random_points(gen, 120, 2, 2);
  const std::vector<cl::CovarianceFamily> families(cl::kAllFamilies.begin(), cl::kAllFamilies.end());
  const auto a = cl::select_model(x, 1, 4, families, 3, 1);
  const auto b = cl::select_model(x, 1, 4, families, 3, 3);
  ASSERT_EQ(a.table.size(), b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    EXPECT_EQ(a.table[i].fitted, b.table[i].fitted);
    if (a.table[i].fitted) EXPECT_EQ(a.table[i].bic, b.table[i].bic);
  }
}

TEST(SelectModel, SphericalVersusFullBicGap) {
  // One component: both MLEs are closed form, so
  // bic_EII - bic_VVV = n (log det S - d log(tr S / d)) + (d (d + 1) / 2 - 1) log n.
  Gen gen(14);
  const std::vector<cl::CovarianceFamily> both{cl::CovarianceFamily::EII, cl::CovarianceFamily::VVV};
  for (Eigen::Index d : {2, 3, 5}) {
    for (Eigen::Index n : {d + 1, 10 * d, Eigen::Index{400}}) {
      MatrixXd x(n, d);
      for (auto& v : x.reshaped()) v = gen.normal();
      const MatrixXd centered = x.rowwise() - x.colwise().mean();
      const MatrixXd s = centered.transpose() * centered / static_cast<double>(n);
      const double nn = static_cast<double>(n);
      const double dd = static_cast<double>(d);
      const double gap =
          nn * (std::log(s.determinant()) - dd * std::log(s.trace() / dd)) + (dd * (dd + 1) / 2 - 1) * std::log(nn);
      const auto eii = cl::em_fit(x, 1, cl::CovarianceFamily::EII, 1);
      const auto vvv = cl::em_fit(x, 1, cl::CovarianceFamily::VVV, 1);
      EXPECT_NEAR(eii.model.bic - vvv.model.bic, gap, 1e-6 * std::max(1.0, std::abs(gap))) << d << " " << n;
      const auto chosen = cl::select_model(x, 1, 1, both, 1).best.family;
      EXPECT_EQ(chosen, gap > 0 ? cl::CovarianceFamily::EII : cl::CovarianceFamily::VVV);
    }
  }
}

TEST(SelectModel, LargeSphericalSamplePrefersEii) {
  Gen gen(15);
  int eii = 0;
  const std::vector<cl::CovarianceFamily> both{cl::CovarianceFamily::EII, cl::CovarianceFamily::VVV};
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = spherical_mixture({Eigen::Vector2d(0, 0), Eigen::Vector2d(20, 0)}, 200, 1.0, gen);
    eii += cl::select_model(x, 2, 2, both, static_cast<std::uint64_t>(trial)).best.family == cl::CovarianceFamily::EII;
  }
  EXPECT_GE(eii, 18);
}

TEST(SelectModel, AllPairsFailing) {
  MatrixXd x(4, 2);
  x << 0, 0, 1, 0, 0, 1, 1, 1;
  const std::vector<cl::CovarianceFamily> families{cl::CovarianceFamily::VVV};
  try {
    (void)cl::select_model(x, 3, 4, families, 0);
    FAIL() << "expected an error";
  } catch (const trendboot::Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("K=3"), std::string::npos) << what;
    EXPECT_NE(what.find("K=4"), std::string::npos) << what;
  }
}

TEST(ClusteringCsv, BicTableAndAssignments) {
  std::vector<cl::BicEntry> table(2);
  table[0] = {1, cl::CovarianceFamily::EII, -10.5, -3.0, true, true, ""};
  table[1] = {2, cl::CovarianceFamily::VVV, std::nan(""), std::nan(""), false, false, "degenerate"};
  std::ostringstream out;
  cl::write_bic_csv(out, table);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "K,family,bic,loglik,converged");
  EXPECT_NE(out.str().find("1,EII,-10.5,-3,true"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("2,VVV,,,false"), std::string::npos) << out.str();

  cl::ClusterAssignment a;
  a.labels = {1, 0};
  a.responsibilities.resize(2, 2);
  a.responsibilities << 0.25, 0.75, 1.0, 0.0;
  const std::vector<std::string> ids{"p", "q"};
  std::ostringstream aout;
  cl::write_assignment_csv(aout, a, ids);
  EXPECT_EQ(aout.str(), "point_id,label,max_responsibility\np,1,0.75\nq,0,1\n");
}
