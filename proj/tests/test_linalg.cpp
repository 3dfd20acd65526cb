#include "qetlab/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qet;

namespace {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
  return m;
}

Vector ket(std::initializer_list<cplx> c) {
  Vector v(static_cast<Eigen::Index>(c.size()));
  Eigen::Index k = 0;
  for (auto x : c)
    v(k++) = x;
  return v;
}

} // namespace

TEST(Kron, MatchesHandExpandedBlocks) {
  Matrix a(2, 2), b(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  b << 0.0, 1.0, 1.0, 0.0;
  const Matrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 4);
  EXPECT_EQ(k(0, 1), cplx(1.0));
  EXPECT_EQ(k(1, 2), cplx(2.0));
  EXPECT_EQ(k(2, 1), cplx(3.0));
  EXPECT_EQ(k(3, 2), cplx(4.0));
  EXPECT_EQ(k(0, 0), cplx(0.0));
}

TEST(PartialTrace, ProductStateKeepsFactor) {
  const auto a = random_density_matrix(2, 1);
  const auto b = random_density_matrix(3, 2);
  const std::vector<int> dims{2, 3};
  const Matrix ab = kron(a.matrix(), b.matrix());
  EXPECT_LT(max_abs(partial_trace(ab, dims, std::vector<int>{0}) - a.matrix()), 1e-14);
  EXPECT_LT(max_abs(partial_trace(ab, dims, std::vector<int>{1}) - b.matrix()), 1e-14);
}

TEST(PartialTrace, BellPairIsMaximallyMixed) {
  const Vector bell = ket({1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)});
  const std::vector<int> dims{2, 2};
  const Matrix r = partial_trace(bell * bell.adjoint(), dims, std::vector<int>{1});
  EXPECT_LT(max_abs(r - 0.5 * Matrix::Identity(2, 2)), 1e-15);
}

TEST(PartialTrace, KeptFactorsStayInOrder) {
  const auto a = random_density_matrix(2, 3);
  const auto b = random_density_matrix(2, 4);
  const auto c = random_density_matrix(3, 5);
  const std::vector<int> dims{2, 2, 3};
  const Matrix abc = kron(kron(a.matrix(), b.matrix()), c.matrix());
  const Matrix ac = partial_trace(abc, dims, std::vector<int>{0, 2});
  EXPECT_LT(max_abs(ac - kron(a.matrix(), c.matrix())), 1e-14);
}

TEST(PermuteSubsystems, SwapsFactors) {
  const Vector u = random_pure_state(2, 7);
  const Vector v = random_pure_state(3, 8);
  const std::vector<int> dims{2, 3};
  const std::vector<int> perm{1, 0};
  EXPECT_LT((permute_subsystems(kron(u, v), dims, perm) - kron(v, u)).norm(), 1e-15);
}

TEST(EigHermitian, PauliSpectrumAndReconstruction) {
  const auto s = eig_hermitian(pauli_y());
  EXPECT_NEAR(s.eigenvalues(0), -1.0, 1e-15);
  EXPECT_NEAR(s.eigenvalues(1), 1.0, 1e-15);
  const Matrix h = random_hermitian(6, 11);
  EXPECT_LT(max_abs(eig_hermitian(h).reconstruct() - h), 1e-12);
}

TEST(EigHermitian, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(eig_hermitian(m), InputError);
}

TEST(EigHermitian, PhaseConventionIsDeterministic) {
  const auto s = eig_hermitian(pauli_x());
  for (Eigen::Index k = 0; k < 2; ++k) {
    const cplx first = s.eigenvectors(0, k);
    EXPECT_NEAR(first.imag(), 0.0, 1e-15);
    EXPECT_GT(first.real(), 0.0);
  }
}

TEST(MatrixFunction, SqrtSquaresBack) {
  const auto rho = random_density_matrix(4, 12);
  const Matrix r = matrix_func_psd(rho.matrix(), PsdFunction::sqrt);
  EXPECT_LT(max_abs(r * r - rho.matrix()), 1e-13);
}

TEST(MatrixFunction, LogOnSupportOnly) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  const Matrix l = matrix_func_psd(m, PsdFunction::log);
  EXPECT_NEAR(l(0, 0).real(), std::log(0.5), 1e-15);
  EXPECT_NEAR(std::abs(l(2, 2)), 0.0, 1e-15);
}

TEST(MatrixFunction, RejectsNegativeOperand) {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = -0.1;
  EXPECT_THROW(matrix_func_psd(m, PsdFunction::sqrt), InputError);
}

TEST(DensityMatrix, ValidatesTraceHermiticityPositivity) {
  EXPECT_THROW(DensityMatrix(Matrix::Identity(2, 2)), InputError);
  Matrix neg(2, 2);
  neg << 1.2, 0.0, 0.0, -0.2;
  EXPECT_THROW(DensityMatrix(neg, {2}), InputError);
  Matrix nh(2, 2);
  nh << 0.5, 0.3, 0.0, 0.5;
  EXPECT_THROW(DensityMatrix(nh, {2}), InputError);
  EXPECT_THROW(DensityMatrix(0.25 * Matrix::Identity(4, 4), {2, 3}), InputError);
}

TEST(DensityMatrix, ReduceMatchesPartialTrace) {
  const Vector psi = random_pure_state(6, 21);
  const auto rho = DensityMatrix::from_pure(psi, {2, 3});
  const auto rb = rho.reduce(std::vector<int>{1});
  const std::vector<int> dims{2, 3};
  EXPECT_LT(max_abs(rb.matrix() - partial_trace(psi * psi.adjoint(), dims,
                                                 std::vector<int>{1})),
            1e-15);
  EXPECT_EQ(rb.dim(), 3);
}

TEST(Distances, OrthogonalAndOverlappingPureStates) {
  const auto zero = DensityMatrix::from_pure(ket({1.0, 0.0}), {2});
  const auto one = DensityMatrix::from_pure(ket({0.0, 1.0}), {2});
  const double r = 1.0 / std::sqrt(2.0);
  const auto plus = DensityMatrix::from_pure(ket({r, r}), {2});
  const auto d01 = distances(zero, one);
  EXPECT_NEAR(d01.trace_distance, 1.0, 1e-12);
  EXPECT_NEAR(d01.fidelity, 0.0, 1e-12);
  // Pure states: T = sqrt(1 - |<a|b>|^2) = sqrt(1/2), F = |<a|b>|^2 = 1/2.
  const auto d0p = distances(zero, plus);
  EXPECT_NEAR(d0p.trace_distance, std::sqrt(0.5), 1e-7);
  EXPECT_NEAR(d0p.fidelity, 0.5, 1e-7);
  EXPECT_NEAR(d0p.purified_distance, std::sqrt(0.5), 1e-7);
}

TEST(Random, HaarUnitaryIsUnitaryAndSeeded) {
  const Matrix u = haar_unitary(8, 5);
  EXPECT_LT(unitarity_error(u), 1e-13);
  EXPECT_LT(max_abs(u - haar_unitary(8, 5)), 0.0 + 1e-300);
  EXPECT_GT(max_abs(u - haar_unitary(8, 6)), 1e-3);
}

TEST(Random, RankLimitedDensityMatrix) {
  const auto rho = random_density_matrix(5, 3, 2);
  int support = 0;
  for (Eigen::Index k = 0; k < rho.eigenvalues().size(); ++k)
    if (rho.eigenvalues()(k) > 1e-12)
      ++support;
  EXPECT_EQ(support, 2);
}

TEST(Random, SplitSeedSeparatesIndices) {
  EXPECT_NE(split_seed(0, 0), split_seed(0, 1));
  EXPECT_NE(split_seed(0, 0), split_seed(1, 0));
  EXPECT_EQ(split_seed(42, 9), split_seed(42, 9));
}

TEST(Json, MatrixRoundTrip) {
  const Matrix m = haar_unitary(3, 4);
  EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
  nlohmann::json real{{"rows", 2}, {"cols", 2}, {"re", {1.0, 2.0, 3.0, 4.0}}};
  const Matrix r = matrix_from_json(real);
  EXPECT_EQ(r(0, 1), cplx(2.0));
  EXPECT_EQ(r(1, 0), cplx(3.0));
}
