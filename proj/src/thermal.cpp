#include "qetlab/thermal.hpp"

#include "qetlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace qet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxTensorDim = 256;

void check_beta(double beta) {
  if (std::isnan(beta) || beta < 0.0)
    throw InputError("inverse temperature must be non-negative");
}

} // namespace

Hamiltonian::Hamiltonian(const Matrix &m) {
  if (!m.allFinite())
    throw InputError("Hamiltonian has non-finite entries");
  spectrum_ = eig_hermitian(m);
  ground_offset_ = spectrum_.eigenvalues(0);
  spectrum_.eigenvalues.array() -= ground_offset_;
  spectrum_.eigenvalues(0) = 0.0;
  matrix_ = 0.5 * (m + m.adjoint());
  matrix_.diagonal().array() -= ground_offset_;
}

Hamiltonian Hamiltonian::diagonal(const std::vector<double> &energies) {
  if (energies.empty())
    throw InputError("Hamiltonian needs at least one energy");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(energies.size()),
                          static_cast<Eigen::Index>(energies.size()));
  for (std::size_t k = 0; k < energies.size(); ++k)
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = energies[k];
  return Hamiltonian(m);
}

Hamiltonian Hamiltonian::tensor_sum(int copies) const {
  if (copies < 1)
    throw InputError("tensor_sum: copies must be positive");
  const Eigen::Index d = matrix_.rows();
  double total = 1.0;
  for (int i = 0; i < copies; ++i)
    total *= static_cast<double>(d);
  if (total > 4096.0)
    throw InputError("tensor_sum: total dimension exceeds 4096");
  const auto n = static_cast<Eigen::Index>(total);
  Matrix sum = Matrix::Zero(n, n);
  for (int site = 0; site < copies; ++site) {
    Matrix term = Matrix::Identity(1, 1);
    for (int k = 0; k < copies; ++k)
      term = kron(term, k == site ? matrix_ : Matrix::Identity(d, d));
    sum += term;
  }
  return Hamiltonian(sum);
}

int Hamiltonian::ground_degeneracy() const {
  const double cut = 1e-10 * std::max(1.0, norm());
  return static_cast<int>((spectrum_.eigenvalues.array() <= cut).count());
}

Hamiltonian hamiltonian_from_json(const nlohmann::json &j) {
  if (j.is_object() && j.contains("eigenvalues"))
    return Hamiltonian::diagonal(j.at("eigenvalues").get<std::vector<double>>());
  return Hamiltonian(matrix_from_json(j));
}

namespace {

// Normalized Boltzmann weights and log Z.
std::pair<RealVector, double> boltzmann(const RealVector &energies, double beta) {
  const Eigen::Index d = energies.size();
  RealVector p(d);
  if (std::isinf(beta)) {
    const double cut = 1e-10 * std::max(1.0, energies.maxCoeff());
    for (Eigen::Index k = 0; k < d; ++k)
      p(k) = energies(k) <= cut ? 1.0 : 0.0;
    const double g = p.sum();
    return {p / g, std::log(g)};
  }
  for (Eigen::Index k = 0; k < d; ++k)
    p(k) = std::exp(-beta * energies(k));
  const double z = p.sum();
  return {p / z, std::log(z)};
}

} // namespace

double gibbs_entropy(const RealVector &energies, double beta) {
  check_beta(beta);
  const auto [p, log_z] = boltzmann(energies, beta);
  if (std::isinf(beta))
    return log_z;
  double mean = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k)
    mean += p(k) * energies(k);
  return beta * mean + log_z;
}

GibbsData gibbs_state(const Hamiltonian &h, double beta) {
  check_beta(beta);
  const auto [p, log_z] = boltzmann(h.energies(), beta);
  const auto &v = h.spectrum().eigenvectors;
  Matrix tau = v * p.cast<cplx>().asDiagonal() * v.adjoint();
  tau /= tau.trace().real();
  return {beta, DensityMatrix(tau, {h.dim()}), log_z};
}

TFDState tfd_state(const Hamiltonian &h, double beta) {
  check_beta(beta);
  const auto [p, log_z] = boltzmann(h.energies(), beta);
  (void)log_z;
  const auto &v = h.spectrum().eigenvectors;
  const Eigen::Index d = v.rows();
  Vector ket = Vector::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (p(k) == 0.0)
      continue;
    ket += std::sqrt(p(k)) * kron(Vector(v.col(k).conjugate()), Vector(v.col(k)));
  }
  ket /= ket.norm();
  return {ket, beta, std::make_shared<const Hamiltonian>(h)};
}

Ergotropy ergotropy(const DensityMatrix &rho, const Hamiltonian &h) {
  if (rho.dim() != h.dim())
    throw InputError("ergotropy: state and Hamiltonian dimensions differ");
  const auto &rs = rho.spectrum();
  const auto &hs = h.spectrum();
  const Eigen::Index d = rho.dim();
  double passive = 0.0;
  Matrix u = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index r = d - 1 - k; // populations descending
    passive += rs.eigenvalues(r) * hs.eigenvalues(k);
    u += hs.eigenvectors.col(k) * rs.eigenvectors.col(r).adjoint();
  }
  return {rho.expectation(h.matrix()) - passive, u};
}

double extracted_energy(const DensityMatrix &rho, const Hamiltonian &h,
                        const Matrix &u) {
  if (u.rows() != rho.dim() || u.cols() != rho.dim() || h.dim() != rho.dim())
    throw InputError("extracted_energy: dimension mismatch");
  const Matrix after = u * rho.matrix() * u.adjoint();
  return rho.expectation(h.matrix()) - (h.matrix() * after).trace().real();
}

double effective_beta(const DensityMatrix &rho, const Hamiltonian &h) {
  if (rho.dim() != h.dim())
    throw InputError("effective_beta: state and Hamiltonian dimensions differ");
  const double target = von_neumann(rho).nats;
  const RealVector &e = h.energies();
  const double top = std::log(static_cast<double>(h.dim()));
  const double floor = std::log(static_cast<double>(h.ground_degeneracy()));
  if (target >= top - 1e-12)
    return 0.0;
  if (target < floor + 1e-12)
    return kInf;
  double lo = 0.0;
  double hi = 1e6;
  while (gibbs_entropy(e, hi) > target && hi < 1e300)
    hi *= 2.0;
  if (gibbs_entropy(e, hi) > target)
    return kInf;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (gibbs_entropy(e, mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double regularized_ergotropy(const DensityMatrix &rho, const Hamiltonian &h) {
  const double b = effective_beta(rho, h);
  const double energy = rho.expectation(h.matrix());
  if (std::isinf(b))
    return energy;
  if (b == 0.0)
    return 0.0;
  const auto [p, log_z] = boltzmann(h.energies(), b);
  (void)p;
  // S(rho || tau) / beta with log tau = -beta H - log Z.
  return energy + (log_z - von_neumann(rho).nats) / b;
}

double tensor_power_ergotropy_per_copy(const DensityMatrix &rho,
                                       const Hamiltonian &h, int n) {
  if (rho.dim() != h.dim())
    throw InputError("tensor_power_ergotropy: dimension mismatch");
  if (n < 1)
    throw InputError("tensor_power_ergotropy: copies must be positive");
  const auto d = static_cast<std::size_t>(rho.dim());
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= d;
    if (total > kMaxTensorDim)
      throw InputError("tensor_power_ergotropy: d^n exceeds 256");
  }
  const RealVector &r = rho.eigenvalues();
  const RealVector &e = h.energies();
  std::vector<double> pops{1.0};
  std::vector<double> levels{0.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> np, nl;
    np.reserve(pops.size() * d);
    nl.reserve(levels.size() * d);
    for (std::size_t a = 0; a < pops.size(); ++a)
      for (std::size_t k = 0; k < d; ++k) {
        np.push_back(pops[a] * std::max(r(static_cast<Eigen::Index>(k)), 0.0));
        nl.push_back(levels[a] + e(static_cast<Eigen::Index>(k)));
      }
    pops = std::move(np);
    levels = std::move(nl);
  }
  std::sort(pops.begin(), pops.end(), std::greater<>());
  std::sort(levels.begin(), levels.end());
  double passive = 0.0;
  for (std::size_t k = 0; k < pops.size(); ++k)
    passive += pops[k] * levels[k];
  const double energy = static_cast<double>(n) * rho.expectation(h.matrix());
  return (energy - passive) / static_cast<double>(n);
}

} // namespace qet
