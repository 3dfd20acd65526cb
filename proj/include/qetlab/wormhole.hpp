#pragma once

#include "qetlab/linalg.hpp"
#include "qetlab/thermal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qet {

struct WormholeParams {
  double g = 1.0;
  double delta = 1.0; // conformal weight, > 0
  double beta = 1.0;  // > 0
  double t = 0.0;
};

/// g Delta (2 pi/beta)^{2 Delta + 1} tanh(pi t/beta) / cosh^{2 Delta}(pi t/beta).
/// Odd in t.
double teleported_energy(const WormholeParams &p);

struct PeakInfo {
  double t_star = 0.0;
  double energy_per_g = 0.0;
};

/// Closed-form stationary point t* = (beta/pi) asinh(1/sqrt(2 Delta)).
PeakInfo peak_time(double delta, double beta);

/// Maximizer found without the closed form: golden-section search, then
/// bisection on the sign of a complex-step derivative.
double numeric_peak_time(double delta, double beta);

// Majorana operators use {psi_a, psi_b} = delta_ab, so psi_a^2 = 1/2. The
// other common convention (2 delta_ab) rescales every coupling below.

/// Jordan-Wigner Majorana number `index` (0-based) among n_modes:
/// psi_{2k} = Z..Z X_k / sqrt2, psi_{2k+1} = Z..Z Y_k / sqrt2, qubit 0 leading.
Matrix majorana_operator(int index, int n_modes);

class MajoranaAlgebra {
public:
  /// Builds all n_modes operators (even, at most 16).
  explicit MajoranaAlgebra(int n_modes);

  int n_modes() const { return n_modes_; }
  int dim() const { return static_cast<int>(ops_.front().rows()); }
  const Matrix &operator[](int i) const { return ops_.at(static_cast<std::size_t>(i)); }
  const std::vector<Matrix> &operators() const { return ops_; }

  /// max |{psi_a, psi_b} - delta_ab I| over all pairs.
  double anticommutator_error() const;
  /// (2i)^{n/2} psi_1 psi_2 ... psi_n.
  Matrix parity() const;

private:
  int n_modes_;
  std::vector<Matrix> ops_;
};

MajoranaAlgebra majorana_algebra(int n_modes);

/// Random even Hamiltonian on the K qubits of 2K Majoranas: 4-body with
/// Gaussian couplings of variance 3!/(2K)^3, or i J psi_1 psi_2 when 2K < 4.
Matrix random_majorana_hamiltonian(int K, std::uint64_t seed);

/// Dimension of the kernel of psi_0^A + i psi_0^B inside the even-parity
/// sector of the four auxiliary Majoranas.
int epr_kernel_dimension();

enum class LoccStateKind { random_pure, tfd };

struct LoccConfig {
  int K = 1;
  double g = 0.3;
  LoccStateKind state = LoccStateKind::random_pure;
  double beta = 1.0;        // tfd only
  std::uint64_t seed = 0;   // state (and tfd Hamiltonian) seed
  std::vector<int> order;   // measurement order over 1..K; empty = 1..K
};

struct LoccReport {
  int K = 0;
  double g = 0.0;
  nlohmann::json state_spec;
  std::vector<int> order;
  double trace_distance = 0.0;
  std::vector<double> probs; // outcome strings in binary order, + = 0
  double total_probability = 0.0;
  double epr_annihilation_error = 0.0;
  double deformation_unitarity_error = 0.0;
  /// |W|Psi> - sum_x U_x Pi_x |Psi>|: the coherent sum over outcomes. The
  /// reduced outputs can still differ through cross terms between outcomes
  /// when the P_{i,+-} fail to commute (K >= 2).
  double operator_identity_error = 0.0;
  double majorana_anticommutator_error = 0.0;

  nlohmann::json to_json() const;
};

/// Compares Bob's reduced output under the two-sided coupling
/// exp(i (g/K) sum_i psi_i^A psi_i^B psi_0^A psi_0^B) with the sequential
/// measurement of P_{i,+-} on A followed by exp(-+(g/2K) psi_0^B psi_i^B) on B.
LoccReport locc_equivalence(const LoccConfig &config);

struct DeformationConfig {
  int K = 2;
  double g = 0.1;
  double beta = 1.0;
  double t = 0.0;
  std::uint64_t seed = 0; // Hamiltonian seed
};

/// sum_x p_x Tr h (rho_x - U_x(t) rho_x U_x(t)^dag) for the sequential
/// channel on the TFD of a random Majorana Hamiltonian h, with
/// U_x(t) = e^{iht} U_x e^{-iht}.
double deformation_energy_gain(const DeformationConfig &config);

} // namespace qet
