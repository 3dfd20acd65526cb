#pragma once

#include "qetlab/entropy.hpp"
#include "qetlab/protocol.hpp"
#include "qetlab/thermal.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qet {

inline constexpr double kSlackTolerance = 1e-8;

/// Where a point came from. theta is NaN and seed unused unless the family
/// needs them.
struct ProtocolTag {
  std::string family;
  double theta = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  bool has_seed = false;
  int n = 1;
};

struct TradeoffPoint {
  double beta_E = 0.0;
  double S = 0.0;
  double bound = 0.0;
  double slack = 0.0; // bound - beta_E - S
  ProtocolTag tag;

  bool holds(double tol = kSlackTolerance) const { return slack >= -tol; }
};

/// (beta avg_E, avg_S) against S(tau_beta). The report must come from a
/// resource whose B marginal is tau_beta (checked to 1e-8).
TradeoffPoint theorem1_check(const ProtocolReport &report, const GibbsData &gibbs,
                             ProtocolTag tag = {});

struct OutcomeSlack {
  std::size_t x = 0;
  double p = 0.0;
  double relent_bound_slack = 0.0; // S(rho_x || tau)/beta - E_x
  double klein_slack = 0.0;        // S(U rho_x U^dag || tau)
};

/// Step-by-step inequalities behind the trade-off bound. tau is the Gibbs
/// state of `gibbs`; the ensemble is compared with the report's B marginal,
/// so non-thermal resources are accepted.
struct ProofStepReport {
  std::vector<OutcomeSlack> outcomes;
  /// max |sum_x p_x rho_x - rho_B|
  double ensemble_identity_error = 0.0;
  /// min over rho_B and every rho_x of S_max(. || tau) - S(. || tau)
  double smax_vs_rel_gap = 0.0;
  /// min over the same states of lambda_min(e^{S_max} tau - rho)
  double operator_ineq_min_eig = 0.0;
  /// sum_x p_x S(U_x rho_x U_x^dag || tau)
  double reconstructed_slack = 0.0;
  /// |S(rho_B) + S(rho_B||tau) - avg_S - beta avg_E - reconstructed_slack|
  double reconstruction_residual = 0.0;
  /// S(rho_B) + S_max(rho_B||tau) - avg_S - beta avg_E
  double finite_n_chain_slack = 0.0;

  double worst_relent_slack() const;
  double worst_klein_slack() const;
  bool passes() const;
};

ProofStepReport proof_step_check(const ProtocolReport &report, const GibbsData &gibbs);

/// Worst values of a batch of proof-step reports.
struct ProofSummary {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_relent_slack = std::numeric_limits<double>::infinity();
  double worst_klein_slack = std::numeric_limits<double>::infinity();
  double worst_ensemble_error = 0.0;
  double worst_smax_gap = std::numeric_limits<double>::infinity();
  double worst_operator_eig = std::numeric_limits<double>::infinity();
  double worst_reconstruction_residual = 0.0;
  double worst_chain_slack = std::numeric_limits<double>::infinity();

  void add(const ProofStepReport &r);
  nlohmann::json to_json() const;
};

struct Theorem1SweepConfig {
  int dim = 2;
  double beta = 1.0;
  int samples = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  double tolerance = kSlackTolerance;
  /// Defaults to diag(0, 1, ..., d-1) when empty.
  std::optional<Hamiltonian> hamiltonian;
};

struct Theorem1SweepSummary {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::uint64_t worst_seed = 0;
  TradeoffPoint bell;
  TradeoffPoint product;
  double log_Z = 0.0;
  double bound = 0.0;
  ProofSummary proof;

  bool passes(double tol) const;
  nlohmann::json to_json() const;
};

/// Haar-random rank-one schemes on the TFD of the configured Hamiltonian,
/// with theorem1_check and proof_step_check on each sample. Sample k uses
/// seed split_seed(seed, k).
Theorem1SweepSummary theorem1_sweep(const Theorem1SweepConfig &config);

struct Theorem2Options {
  MeasurementFamily family = MeasurementFamily::haar;
  int samples = 200;
  std::uint64_t seed = 0;
  int threads = 1;
  double tolerance = kSlackTolerance;
};

struct Theorem2Record {
  int n = 1;
  double beta_star = 0.0;
  /// "zero" or "infinite" when the energy term cannot be converted; the
  /// record then carries the entropy-only bound.
  std::string degenerate;
  double bound = 0.0; // S(rho_B)
  double tensor_ergotropy_per_copy = 0.0;
  double regularized_ergotropy = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  /// Components of the sample attaining worst_slack.
  double worst_S_per_copy = 0.0;
  double worst_energy_term = 0.0;
  ProofSummary proof;

  bool holds(double tol = kSlackTolerance) const { return worst_slack >= -tol; }
  nlohmann::json to_json() const;
};

/// Finite-n surrogate: for n = 1..n_max, avg_S/n + beta* (avg_E/n - W_n)
/// against S(rho_B), with W_n the exact per-copy ergotropy of rho_B^{(x)n}.
/// Scheme families: haar (samples per n), bell and product (one each).
std::vector<Theorem2Record> theorem2_finite_n(const PureResource &resource,
                                              const Hamiltonian &h, int n_max,
                                              const Theorem2Options &options);

struct ParetoConfig {
  Hamiltonian hamiltonian = Hamiltonian::diagonal({0.0, 1.0});
  double beta = 1.0;
  std::vector<MeasurementFamily> families{MeasurementFamily::interpolated};
  int samples = 100;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ParetoResult {
  /// The two endpoints come first: bell (0, S(tau)) then product
  /// (beta Tr H tau, 0).
  std::vector<TradeoffPoint> points;
  double bound = 0.0;         // S(tau_beta): intercept of the bound line
  double max_beta_E = 0.0;    // beta Tr H tau_beta
  double log_Z = 0.0;
  std::size_t violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
};

/// Sampled achievable region on the TFD with ergotropy-optimal decoding.
/// Interpolated samples use theta_k = (pi/2) k/(samples-1); Haar sample k
/// uses split_seed(seed, k).
ParetoResult pareto_sweep(const ParetoConfig &config);

struct EfVariantRecord {
  double ef = 0.0;
  double avg_S = 0.0;
  double beta_E = 0.0;
  double bound = 0.0;
  double entropy_slack = 0.0; // avg_S - E_f
  double bound_slack = 0.0;   // bound - E_f - beta_E

  bool holds(double tol = kSlackTolerance) const {
    return entropy_slack >= -tol && bound_slack >= -tol;
  }
};

/// Entanglement-of-formation variant on a qubit pair R B, using the decoded
/// mixture sum_x p_x (I (x) U_x) rho_{RB|x} (I (x) U_x)^dag.
EfVariantRecord ef_variant_check(const ProtocolReport &report, const GibbsData &gibbs);

struct ErgotropyScalingRow {
  int n = 1;
  double per_copy = 0.0;
  double regularized = 0.0;
  double gap = 0.0;
};

/// Per-copy ergotropy of rho^{(x)n} for n = 1..n_max next to its regularized
/// limit.
std::vector<ErgotropyScalingRow> ergotropy_scaling(const DensityMatrix &rho,
                                                   const Hamiltonian &h, int n_max);

} // namespace qet
