#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qet {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised for malformed inputs: dimension mismatches, non-Hermitian
/// operands, invalid parameters.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace tol {
inline constexpr double hermitian = 1e-8;
inline constexpr double state = 1e-10;
inline constexpr double clamp = 1e-10;
// Relative to the largest eigenvalue.
inline constexpr double support = 1e-12;
} // namespace tol

Matrix kron(const Matrix &a, const Matrix &b);
Vector kron(const Vector &a, const Vector &b);

/// Product of `dims`; throws on empty lists or non-positive entries.
std::size_t dim_product(std::span<const int> dims);

/// Traces out every subsystem not listed in `keep`. The kept factors appear
/// in their original order.
Matrix partial_trace(const Matrix &m, std::span<const int> dims,
                     std::span<const int> keep);

/// Reorders tensor factors of a ket: output factor k is input factor perm[k].
Vector permute_subsystems(const Vector &v, std::span<const int> dims,
                          std::span<const int> perm);

struct SpectralDecomposition {
  RealVector eigenvalues; // ascending
  Matrix eigenvectors;    // columns

  Matrix reconstruct() const;
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// diagonalization; anything further than 1e-8 from Hermitian is rejected.
/// Each eigenvector's first non-negligible component is made real positive.
SpectralDecomposition eig_hermitian(const Matrix &m);

enum class PsdFunction { sqrt, log, exp, inv_sqrt };

/// Spectral calculus on positive semidefinite operators.
///
/// Eigenvalues in (-1e-10, 0) are clamped to zero; more negative ones are an
/// error for sqrt/log/inv_sqrt. log and inv_sqrt act on the support only
/// (eigenvalues above 1e-12 of the largest); the kernel maps to zero.
/// exp is applied to every eigenvalue of a Hermitian input.
Matrix matrix_func_psd(const Matrix &m, PsdFunction f);
Matrix matrix_func_psd(const SpectralDecomposition &spec, PsdFunction f);

double hermitian_error(const Matrix &m);
double max_abs(const Matrix &m);
double unitarity_error(const Matrix &u);

/// Support cutoff in absolute terms for a spectrum.
double support_cutoff(const RealVector &eigenvalues);

/// Unit-trace PSD operator on a tensor product of `dims`. Immutable once
/// built; the spectral decomposition is computed at construction.
class DensityMatrix {
public:
  DensityMatrix(Matrix m, std::vector<int> dims);
  explicit DensityMatrix(Matrix m);

  static DensityMatrix from_pure(const Vector &ket, std::vector<int> dims);
  static DensityMatrix maximally_mixed(int d);

  const Matrix &matrix() const { return matrix_; }
  const std::vector<int> &dims() const { return dims_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const SpectralDecomposition &spectrum() const { return spectrum_; }
  const RealVector &eigenvalues() const { return spectrum_.eigenvalues; }

  /// Reduced state on the listed subsystems.
  DensityMatrix reduce(std::span<const int> keep) const;

  double expectation(const Matrix &op) const;

private:
  Matrix matrix_;
  std::vector<int> dims_;
  SpectralDecomposition spectrum_;
};

struct Distances {
  double trace_distance;
  double fidelity;
  double purified_distance;
};

Distances distances(const DensityMatrix &rho, const DensityMatrix &sigma);
double trace_distance(const Matrix &a, const Matrix &b);

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix, with R's diagonal phases absorbed into Q. Deterministic in `seed`.
Matrix haar_unitary(int d, std::uint64_t seed);

/// Random density matrix of rank `rank` (partial trace of a Haar-random pure
/// state); rank defaults to full.
DensityMatrix random_density_matrix(int d, std::uint64_t seed, int rank = 0);
Vector random_pure_state(int d, std::uint64_t seed);
Matrix random_hermitian(int d, std::uint64_t seed);

/// splitmix64 finalizer; used to derive per-sample seeds from a master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

// JSON form {"rows", "cols", "re", "im"}, entries row-major.
nlohmann::json matrix_to_json(const Matrix &m);
Matrix matrix_from_json(const nlohmann::json &j);

} // namespace qet
