#include "qetlab/entropy.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

using namespace qet;

namespace {

DensityMatrix diag_state(std::initializer_list<double> p) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(p.size()),
                          static_cast<Eigen::Index>(p.size()));
  Eigen::Index k = 0;
  for (double x : p) {
    m(k, k) = x;
    ++k;
  }
  return DensityMatrix(m, {static_cast<int>(p.size())});
}

// Independent matrix log through Eigen's own solver.
Matrix log_via_eigen(const Matrix &m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvectors() *
         es.eigenvalues().array().log().matrix().cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

DensityMatrix werner(double p) {
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  Matrix m = p * bell * bell.adjoint() + (1.0 - p) / 4.0 * Matrix::Identity(4, 4);
  return DensityMatrix(m, {2, 2});
}

} // namespace

TEST(VonNeumann, QubitGibbsBenchmark) {
  // tau = diag(1, e^-1)/(1 + e^-1) at beta = 1, H = diag(0, 1).
  const double p1 = std::exp(-1.0) / (1.0 + std::exp(-1.0));
  const double oracle = -(1 - p1) * std::log(1 - p1) - p1 * std::log(p1);
  const auto s = von_neumann(diag_state({1 - p1, p1}));
  EXPECT_NEAR(s.nats, oracle, 1e-14);
  EXPECT_NEAR(s.nats, 0.5822, 5e-5);
  EXPECT_NEAR(s.bits(), oracle / std::log(2.0), 1e-14);
}

TEST(VonNeumann, PureAndMaximallyMixed) {
  EXPECT_NEAR(von_neumann(diag_state({1.0, 0.0, 0.0})).nats, 0.0, 1e-15);
  EXPECT_NEAR(von_neumann(DensityMatrix::maximally_mixed(5)).nats, std::log(5.0), 1e-14);
}

TEST(RelativeEntropy, CommutingCaseIsKullbackLeibler) {
  const auto rho = diag_state({0.6, 0.3, 0.1});
  const auto sigma = diag_state({0.2, 0.5, 0.3});
  const double kl = 0.6 * std::log(0.6 / 0.2) + 0.3 * std::log(0.3 / 0.5) +
                    0.1 * std::log(0.1 / 0.3);
  EXPECT_NEAR(relative_entropy(rho, sigma).nats, kl, 1e-14);
}

TEST(RelativeEntropy, NonCommutingMatchesDirectTrace) {
  const auto rho = random_density_matrix(4, 31);
  const auto sigma = random_density_matrix(4, 32);
  const double oracle =
      (rho.matrix() * (log_via_eigen(rho.matrix()) - log_via_eigen(sigma.matrix())))
          .trace()
          .real();
  EXPECT_NEAR(relative_entropy(rho, sigma).nats, oracle, 1e-11);
  EXPECT_NEAR(relative_entropy(rho, rho).nats, 0.0, 1e-12);
}

TEST(RelativeEntropy, SupportViolationIsInfinite) {
  const auto rho = diag_state({0.5, 0.5});
  const auto sigma = diag_state({1.0, 0.0});
  const auto r = relative_entropy(rho, sigma);
  EXPECT_TRUE(r.is_infinite());
  EXPECT_FALSE(relative_entropy(sigma, rho).is_infinite());
}

TEST(MaxRelativeEntropy, CommutingCaseIsLogMaxRatio) {
  const auto rho = diag_state({0.6, 0.3, 0.1});
  const auto sigma = diag_state({0.2, 0.5, 0.3});
  EXPECT_NEAR(max_relative_entropy(rho, sigma).nats, std::log(3.0), 1e-13);
}

TEST(MaxRelativeEntropy, DominatesRelativeEntropy) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto rho = random_density_matrix(3, 100 + s);
    const auto sigma = random_density_matrix(3, 200 + s);
    EXPECT_GE(max_relative_entropy(rho, sigma).nats,
              relative_entropy(rho, sigma).nats - 1e-10);
  }
}

TEST(BinaryEntropy, EndpointsAndMidpoint) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5), std::log(2.0), 1e-15);
  EXPECT_THROW(binary_entropy(1.5), InputError);
}

TEST(ContinuityBounds, QubitValues) {
  // d = 2: eps log(1) vanishes, leaving h2(eps).
  const auto b = continuity_bounds(0.1, 2, 3.0);
  EXPECT_NEAR(b.entropy_bound, -0.1 * std::log(0.1) - 0.9 * std::log(0.9), 1e-15);
  EXPECT_NEAR(b.energy_bound, 0.3, 1e-15);
  const auto z = continuity_bounds(0.0, 4, 1.0);
  EXPECT_EQ(z.entropy_bound, 0.0);
}

TEST(ContinuityBounds, HoldOnRandomPerturbations) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto a = random_density_matrix(3, 300 + s);
    const auto noise = random_density_matrix(3, 400 + s);
    const double w = 0.05 * (1 + s % 5);
    const DensityMatrix b((1 - w) * a.matrix() + w * noise.matrix(), {3});
    const double eps = trace_distance(a.matrix(), b.matrix());
    const auto bound = continuity_bounds(eps, 3, 1.0);
    EXPECT_LE(std::abs(von_neumann(a).nats - von_neumann(b).nats),
              bound.entropy_bound + 1e-12);
  }
}

TEST(Concurrence, BellProductAndWerner) {
  EXPECT_NEAR(concurrence(werner(1.0)), 1.0, 1e-7);
  EXPECT_NEAR(concurrence(DensityMatrix::maximally_mixed(4)), 0.0, 1e-7);
  // Werner family: C = max(0, (3p - 1)/2).
  EXPECT_NEAR(concurrence(werner(0.8)), 0.7, 1e-7);
  EXPECT_NEAR(concurrence(werner(0.2)), 0.0, 1e-7);
  EXPECT_THROW(concurrence(DensityMatrix::maximally_mixed(3)), InputError);
}

TEST(EntanglementOfFormation, BellIsLogTwo) {
  EXPECT_NEAR(two_qubit_ef(werner(1.0)).nats, std::log(2.0), 1e-7);
  EXPECT_NEAR(two_qubit_ef(DensityMatrix::maximally_mixed(4)).nats, 0.0, 1e-12);
}

TEST(EntanglementOfFormation, PureStateEqualsMarginalEntropy) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Vector psi = random_pure_state(4, 500 + s);
    const auto rho = DensityMatrix::from_pure(psi, {2, 2});
    const double sb = von_neumann(rho.reduce(std::vector<int>{1})).nats;
    EXPECT_NEAR(two_qubit_ef(rho).nats, sb, 1e-6);
  }
}
