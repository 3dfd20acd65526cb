#include "qetlab/entropy.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <limits>

namespace qet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSupportLeak = 1e-10;

} // namespace

double shannon_entropy(const RealVector &p) {
  const double cut = support_cutoff(p);
  double s = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (p(k) > cut)
      s -= p(k) * std::log(p(k));
  return s;
}

EntropyValue von_neumann(const DensityMatrix &rho) {
  return {shannon_entropy(rho.eigenvalues()), EntropyMeasure::vn};
}

bool support_contained(const DensityMatrix &rho, const DensityMatrix &sigma) {
  const auto &spec = sigma.spectrum();
  const double cut = support_cutoff(spec.eigenvalues);
  double leak = 0.0;
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    if (spec.eigenvalues(k) > cut)
      continue;
    const auto v = spec.eigenvectors.col(k);
    leak += (v.adjoint() * rho.matrix() * v)(0, 0).real();
  }
  return leak <= kSupportLeak;
}

EntropyValue relative_entropy(const DensityMatrix &rho, const DensityMatrix &sigma) {
  if (rho.dim() != sigma.dim())
    throw InputError("relative_entropy: dimension mismatch");
  if (!support_contained(rho, sigma))
    return {kInf, EntropyMeasure::relative};
  // Tr rho log sigma in the eigenbasis of sigma.
  const auto &spec = sigma.spectrum();
  const double cut = support_cutoff(spec.eigenvalues);
  double cross = 0.0;
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    if (spec.eigenvalues(k) <= cut)
      continue;
    const auto v = spec.eigenvectors.col(k);
    const double w = (v.adjoint() * rho.matrix() * v)(0, 0).real();
    cross += w * std::log(spec.eigenvalues(k));
  }
  return {-von_neumann(rho).nats - cross, EntropyMeasure::relative};
}

EntropyValue max_relative_entropy(const DensityMatrix &rho, const DensityMatrix &sigma) {
  if (rho.dim() != sigma.dim())
    throw InputError("max_relative_entropy: dimension mismatch");
  if (!support_contained(rho, sigma))
    return {kInf, EntropyMeasure::max_relative};
  const Matrix w = matrix_func_psd(sigma.spectrum(), PsdFunction::inv_sqrt);
  const auto spec = eig_hermitian(w * rho.matrix() * w);
  return {std::log(spec.eigenvalues.maxCoeff()), EntropyMeasure::max_relative};
}

double binary_entropy(double eps) {
  if (eps < 0.0 || eps > 1.0)
    throw InputError("binary_entropy: argument outside [0, 1]");
  double h = 0.0;
  if (eps > 0.0)
    h -= eps * std::log(eps);
  if (eps < 1.0)
    h -= (1.0 - eps) * std::log1p(-eps);
  return h;
}

ContinuityBounds continuity_bounds(double eps, int d, double h_norm) {
  if (eps < 0.0 || eps > 1.0)
    throw InputError("continuity_bounds: eps outside [0, 1]");
  if (d < 2)
    throw InputError("continuity_bounds: dimension must be at least 2");
  if (h_norm < 0.0)
    throw InputError("continuity_bounds: negative operator norm");
  const double h2 = binary_entropy(eps);
  const double ent = (eps > 0.0 ? eps * std::log(d - 1.0) : 0.0) + h2;
  return {ent, eps * h_norm, h2};
}

double concurrence(const DensityMatrix &rho) {
  if (rho.dim() != 4)
    throw InputError("concurrence: state must be two-qubit (4x4)");
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix tilde = yy * rho.matrix().conjugate() * yy;
  const Matrix root = matrix_func_psd(rho.spectrum(), PsdFunction::sqrt);
  // Eigenvalues of sqrt(rho) tilde sqrt(rho) are those of rho tilde.
  const auto spec = eig_hermitian(root * tilde * root);
  std::array<double, 4> lam{};
  for (int k = 0; k < 4; ++k)
    lam[static_cast<std::size_t>(k)] = std::sqrt(std::max(spec.eigenvalues(k), 0.0));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

EntropyValue two_qubit_ef(const DensityMatrix &rho) {
  const double c = std::min(concurrence(rho), 1.0);
  const double x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
  return {binary_entropy(x), EntropyMeasure::ef};
}

} // namespace qet
