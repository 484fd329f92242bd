#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "trendboot/error.hpp"
#include "trendboot/resampling.hpp"

namespace trendboot::resampling {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string describe(const WeightProcess& process) {
  return std::visit(Overloaded{
                        [](const IidRademacher&) { return std::string("iid_rademacher"); },
                        [](const IidNormal&) { return std::string("iid_normal"); },
                        [](const Ar1Weights& w) {
                          std::ostringstream os;
                          os << "ar1(" << w.r << ")";
                          return os.str();
                        },
                        [](const KernelMvn& w) { return "kernel_mvn(" + std::to_string(w.bandwidth) + ")"; },
                    },
                    process);
}

// Lower Cholesky factor of the banded Bartlett covariance. The kernel has
// compact support, so the factor stays inside the band and costs
// O(n * bandwidth^2) to compute.
struct WeightGenerator::KernelFactor {
  Eigen::SparseMatrix<double> lower;
};

WeightGenerator::WeightGenerator(const WeightProcess& process, std::size_t n) : process_(process), n_(n) {
  if (n == 0) throw std::invalid_argument("WeightGenerator: n must be positive");
  if (const auto* ar = std::get_if<Ar1Weights>(&process_)) {
    if (!(ar->r > -1.0 && ar->r < 1.0)) throw std::invalid_argument("ar1 weights: r must lie in (-1, 1)");
  }
  if (const auto* kernel = std::get_if<KernelMvn>(&process_)) {
    const std::size_t bw = kernel->bandwidth;
    if (bw == 0) throw std::invalid_argument("kernel weights: bandwidth must be positive");
    const auto ni = static_cast<Eigen::Index>(n);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(n * std::min(bw, n));
    for (Eigen::Index j = 0; j < ni; ++j) {
      for (Eigen::Index lag = 0; lag < static_cast<Eigen::Index>(bw) && j + lag < ni; ++lag) {
        entries.emplace_back(j + lag, j, 1.0 - static_cast<double>(lag) / static_cast<double>(bw));
      }
    }
    Eigen::SparseMatrix<double> cov(ni, ni);
    cov.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw FactorizationError("kernel weights: Bartlett covariance (bandwidth " + std::to_string(bw) +
                               ") is not positive definite");
    }
    kernel_ = std::make_unique<KernelFactor>();
    kernel_->lower = llt.matrixL();
  }
}

WeightGenerator::~WeightGenerator() = default;
WeightGenerator::WeightGenerator(WeightGenerator&&) noexcept = default;
WeightGenerator& WeightGenerator::operator=(WeightGenerator&&) noexcept = default;

void WeightGenerator::fill(std::span<double> out, Engine& engine) const {
  if (out.size() != n_) throw std::invalid_argument("WeightGenerator: output length mismatch");
  NormalDistribution normal;
  std::visit(Overloaded{
                 [&](const IidRademacher&) {
                   std::size_t i = 0;
                   while (i < n_) {
                     std::uint64_t bits = engine();
                     for (int b = 0; b < 64 && i < n_; ++b, ++i) {
                       out[i] = (bits & 1u) ? 1.0 : -1.0;
                       bits >>= 1;
                     }
                   }
                 },
                 [&](const IidNormal&) {
                   for (auto& w : out) w = normal(engine);
                 },
                 [&](const Ar1Weights& ar) {
                   const double scale = std::sqrt(1.0 - ar.r * ar.r);
                   double w = normal(engine);
                   out[0] = w;
                   for (std::size_t i = 1; i < n_; ++i) {
                     w = ar.r * w + scale * normal(engine);
                     out[i] = w;
                   }
                 },
                 [&](const KernelMvn&) {
                   Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
                   for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(engine);
                   Eigen::Map<Eigen::VectorXd>(out.data(), z.size()) = kernel_->lower * z;
                 },
             },
             process_);
}

std::vector<double> generate_weights(const WeightProcess& process, std::size_t n, std::uint64_t seed) {
  const WeightGenerator generator(process, n);
  Engine engine = substream(seed, "weights");
  std::vector<double> out(n);
  generator.fill(out, engine);
  return out;
}

}  // namespace trendboot::resampling
