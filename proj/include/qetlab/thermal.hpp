#pragma once

#include "qetlab/linalg.hpp"

#include <memory>

namespace qet {

/// Bob's Hamiltonian with its spectrum shifted so the ground energy is zero.
class Hamiltonian {
public:
  explicit Hamiltonian(const Matrix &m);
  static Hamiltonian diagonal(const std::vector<double> &energies);

  /// Sum of `copies` commuting single-site copies, one per tensor factor.
  Hamiltonian tensor_sum(int copies) const;

  const Matrix &matrix() const { return matrix_; }
  const SpectralDecomposition &spectrum() const { return spectrum_; }
  const RealVector &energies() const { return spectrum_.eigenvalues; }
  double ground_offset() const { return ground_offset_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  /// Operator norm; equals the largest shifted energy.
  double norm() const { return spectrum_.eigenvalues.maxCoeff(); }
  int ground_degeneracy() const;

private:
  Matrix matrix_;
  SpectralDecomposition spectrum_;
  double ground_offset_ = 0.0;
};

/// Hamiltonian from JSON: {"eigenvalues": [...]} or a matrix object.
Hamiltonian hamiltonian_from_json(const nlohmann::json &j);

struct GibbsData {
  double beta;
  DensityMatrix tau;
  double log_Z;
};

/// e^{-beta H}/Z. beta = +inf yields the normalized ground-space projector.
GibbsData gibbs_state(const Hamiltonian &h, double beta);

/// Entropy of the Gibbs state at beta, from the energies alone.
double gibbs_entropy(const RealVector &energies, double beta);

struct TFDState {
  Vector ket; // on A (x) B
  double beta;
  std::shared_ptr<const Hamiltonian> hamiltonian;

  int side_dim() const { return hamiltonian->dim(); }
};

/// Thermofield double (I (x) sqrt(tau))|I>, i.e. amplitudes sqrt(p_k) on
/// conj(|E_k>)_A |E_k>_B.
TFDState tfd_state(const Hamiltonian &h, double beta);

struct Ergotropy {
  double value;
  Matrix extractor;
};

/// Single-copy ergotropy: sorted populations (descending) against sorted
/// energies (ascending). The extractor rotates rho's eigenbasis onto H's.
Ergotropy ergotropy(const DensityMatrix &rho, const Hamiltonian &h);

/// Energy extracted by an arbitrary unitary: Tr H (rho - U rho U^dag).
double extracted_energy(const DensityMatrix &rho, const Hamiltonian &h,
                        const Matrix &u);

/// Inverse temperature whose Gibbs state has the entropy of rho. Returns 0
/// at maximal entropy and +inf below the zero-temperature entropy floor.
double effective_beta(const DensityMatrix &rho, const Hamiltonian &h);

/// Alicki-Fannes regularized ergotropy S(rho || tau_{beta*}) / beta*.
double regularized_ergotropy(const DensityMatrix &rho, const Hamiltonian &h);

/// (1/n) ergotropy of rho^{(x)n} under the n-site sum Hamiltonian, from the
/// spectra alone (d^n <= 256).
double tensor_power_ergotropy_per_copy(const DensityMatrix &rho,
                                       const Hamiltonian &h, int n);

} // namespace qet
