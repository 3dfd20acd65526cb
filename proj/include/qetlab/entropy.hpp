#pragma once

#include "qetlab/linalg.hpp"

namespace qet {

enum class EntropyMeasure { vn, relative, max_relative, binary, ef };

/// An entropy in nats. Support violations of the relative entropies are
/// reported as +infinity rather than thrown.
struct EntropyValue {
  double nats = 0.0;
  EntropyMeasure measure = EntropyMeasure::vn;

  bool is_infinite() const { return std::isinf(nats); }
  double bits() const { return nats / std::log(2.0); }
};

EntropyValue von_neumann(const DensityMatrix &rho);

/// Shannon entropy of a probability vector (entries at or below the support
/// cutoff of the largest entry contribute nothing).
double shannon_entropy(const RealVector &p);

/// Umegaki relative entropy Tr rho (log rho - log sigma).
EntropyValue relative_entropy(const DensityMatrix &rho, const DensityMatrix &sigma);

/// log of the smallest alpha with rho <= alpha sigma.
EntropyValue max_relative_entropy(const DensityMatrix &rho, const DensityMatrix &sigma);

/// True if rho has no weight outside the support of sigma (tolerance 1e-10).
bool support_contained(const DensityMatrix &rho, const DensityMatrix &sigma);

double binary_entropy(double eps);

struct ContinuityBounds {
  double entropy_bound; // eps log(d-1) + h2(eps)
  double energy_bound;  // eps ||H||_inf
  double h2;
};

/// Fannes-Audenaert entropy bound and Hoelder energy bound for states at
/// trace distance at most eps.
ContinuityBounds continuity_bounds(double eps, int d, double h_norm);

/// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix &rho);

/// Two-qubit entanglement of formation (nats) from the concurrence.
EntropyValue two_qubit_ef(const DensityMatrix &rho);

} // namespace qet
