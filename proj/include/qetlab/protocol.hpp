#pragma once

#include "qetlab/linalg.hpp"
#include "qetlab/thermal.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qet {

// Subsystem conventions:
//   resource   |psi>_{AB}, dims (d_A, d_B)
//   reference  |Phi>_{A'R}, maximally entangled, d_A' = d_R = d_A
//   Alice measures A (x) A' (A is the leading factor)
//   Bob's output lives on R (x) B (R is the leading factor)
// The transpose in the steering formula is taken in the computational basis
// in which |I> = sum_k |k>|k> is written.

/// Pure bipartite state on A (x) B.
struct PureResource {
  Vector ket;
  int dim_a;
  int dim_b;

  /// C(a, b) = <a, b|psi>.
  Matrix coefficients() const;
  DensityMatrix bob_marginal() const;
};

PureResource as_resource(const TFDState &tfd);

/// sum_k sqrt(w_k) |k>|k> with weights normalized to one.
PureResource schmidt_resource(const std::vector<double> &weights);

/// psi^{(x)n} regrouped as (A_1..A_n)(B_1..B_n).
PureResource tensor_power(const PureResource &r, int n);

/// (1/sqrt d) sum_k |k>|k>.
Vector bell_state(int d);

enum class MeasurementKind { rank_one_projective, kraus_instrument };

/// Measurement on A (x) A'. Rank-one schemes are stored as their unit
/// vectors; instruments as Kraus operators. Completeness sum K^dag K = I is
/// enforced to 1e-9 at construction.
class MeasurementScheme {
public:
  static MeasurementScheme rank_one(std::vector<Vector> vectors, int dim_a,
                                    int dim_ap, nlohmann::json metadata = {});
  static MeasurementScheme kraus(std::vector<Matrix> operators, int dim_a,
                                 int dim_ap, nlohmann::json metadata = {});

  MeasurementKind kind() const { return kind_; }
  std::size_t size() const;
  int dim_a() const { return dim_a_; }
  int dim_ap() const { return dim_ap_; }
  const std::vector<Vector> &vectors() const { return vectors_; }
  /// Kraus operator of outcome x (the projector for rank-one schemes).
  Matrix kraus_operator(std::size_t x) const;
  /// POVM element K_x^dag K_x on A (x) A'.
  Matrix povm_element(std::size_t x) const;
  const nlohmann::json &metadata() const { return metadata_; }

  double completeness_error() const;

private:
  MeasurementScheme() = default;
  void validate() const;

  MeasurementKind kind_ = MeasurementKind::rank_one_projective;
  std::vector<Vector> vectors_;
  std::vector<Matrix> kraus_;
  int dim_a_ = 0;
  int dim_ap_ = 0;
  nlohmann::json metadata_;
};

enum class MeasurementFamily { bell, product, interpolated, haar };

std::string to_string(MeasurementFamily f);
MeasurementFamily family_from_string(const std::string &s);

struct MeasurementSpec {
  MeasurementFamily family = MeasurementFamily::haar;
  double theta = 0.0;
  std::uint64_t seed = 0;
};

/// Heisenberg-Weyl Bell basis (I (x) X^a Z^b)|I>/sqrt d.
MeasurementScheme bell_measurement(int d);
/// Computational product basis |a>|a'>.
MeasurementScheme product_measurement(int d);
/// Columns of B exp(-i theta G): the Bell basis B at theta = 0, the product
/// basis at theta = pi/2. G is the Hermitian generator with
/// exp(-i pi/2 G) = B^dag from the principal logarithm.
MeasurementScheme interpolated_measurement(int d, double theta);
/// Columns of a Haar-random unitary on A (x) A'.
MeasurementScheme haar_measurement(int d, std::uint64_t seed);
MeasurementScheme make_measurement(const MeasurementSpec &spec, int d);

/// The interpolation generator G for dimension d.
Matrix interpolation_generator(int d);

/// Groups outcomes of a rank-one scheme into coarser projective Kraus
/// operators; groups[k] lists the merged outcome indices.
MeasurementScheme coarse_grain(const MeasurementScheme &fine,
                               const std::vector<std::vector<int>> &groups);

/// n-fold product scheme on (A_1..A_n)(A'_1..A'_n).
MeasurementScheme tensor_scheme(const MeasurementScheme &single, int n);

struct SchmidtForm {
  Matrix sigma; // PSD on A
  Matrix u;     // unitary on A'
};

/// Writes |v> = (sqrt(sigma) (x) U)|I> with |I> = sum_k |k>|k> unnormalized.
/// Over a complete rank-one scheme the sigmas sum to d_A' times identity.
SchmidtForm schmidt_split(const Vector &v, int dim_a, int dim_ap);
Vector schmidt_join(const SchmidtForm &s);

enum class DecoderKind { ergotropy_optimal, explicit_unitaries, none };

struct Decoder {
  DecoderKind kind = DecoderKind::ergotropy_optimal;
  std::vector<Matrix> unitaries; // one per outcome for explicit_unitaries
};

std::string to_string(DecoderKind k);

inline constexpr double kNegligibleProbability = 1e-14;

struct ProtocolOutcome {
  std::size_t x = 0;
  double p = 0.0;
  /// False when p < 1e-14; the conditional state is then not formed and the
  /// outcome is excluded from averages.
  bool defined = false;
  std::optional<DensityMatrix> rho;
  /// Conditional pure state on R (x) B (rank-one schemes only).
  Vector rb_state;
  /// Conditional state on R (x) B for Kraus instruments.
  Matrix rb_matrix;
  Matrix decoder;
  double energy = 0.0;
  double entropy = 0.0;

  /// rho_{RB|x} as a matrix, for either scheme kind.
  Matrix rb_density() const;
};

struct ProtocolReport {
  std::vector<ProtocolOutcome> outcomes;
  double avg_E = 0.0;
  double avg_S = 0.0;
  double beta_used = std::numeric_limits<double>::quiet_NaN();
  int copies = 1;
  int dim_r = 0;
  int dim_b = 0;
  std::optional<DensityMatrix> bob_marginal;
  /// sum_x p_x <Phi|(I (x) U_x) rho_{RB|x} (I (x) U_x)^dag|Phi>; NaN if d_R != d_B.
  double entanglement_fidelity = std::numeric_limits<double>::quiet_NaN();
  nlohmann::json metadata;

  double per_copy_E() const { return avg_E / copies; }
  double per_copy_S() const { return avg_S / copies; }
  /// sum_x p_x rho_x over defined outcomes.
  Matrix ensemble_average() const;
  double total_probability() const;
};

/// Simulates Alice's measurement on A A' against |psi>_{AB}|Phi>_{A'R} by
/// the Born rule on the full state, then Bob's conditional decoding.
ProtocolReport run_protocol(const PureResource &resource, const Hamiltonian &h,
                            const MeasurementScheme &m,
                            const Decoder &decoder = {});

/// run_protocol on a thermofield double with its own Hamiltonian; records
/// the inverse temperature in the report.
ProtocolReport run_protocol(const TFDState &tfd, const MeasurementScheme &m,
                            const Decoder &decoder = {});

/// Same chain on psi^{(x)n} with the n-site sum Hamiltonian; the scheme acts
/// on (A_1..A_n)(A'_1..A'_n). Measurement dimension d_A^{2n} <= 256.
ProtocolReport run_tensor_protocol(const PureResource &single, const Hamiltonian &h,
                                   int n, const MeasurementScheme &m,
                                   const Decoder &decoder = {});

/// Steered ensemble from the reduced POVM on A alone:
/// p_x rho_x = C^T sigma_x^T conj(C), sigma_x = Tr_{A'} (K_x^dag K_x) / d_A'.
/// Independent of run_protocol; used to cross-check it.
struct SteeredEnsemble {
  std::vector<double> p;
  std::vector<Matrix> weighted_states; // p_x rho_x on B
};
SteeredEnsemble steer_via_povm(const PureResource &resource,
                               const MeasurementScheme &m);

nlohmann::json report_to_json(const ProtocolReport &r);

} // namespace qet
