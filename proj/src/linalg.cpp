#include "qetlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qet {

Matrix kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron(const Vector &a, const Vector &b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

std::size_t dim_product(std::span<const int> dims) {
  if (dims.empty())
    throw InputError("empty dimension list");
  std::size_t p = 1;
  for (int d : dims) {
    if (d < 1)
      throw InputError("subsystem dimensions must be positive");
    p *= static_cast<std::size_t>(d);
  }
  return p;
}

namespace {

std::vector<std::size_t> strides_of(std::span<const int> dims) {
  std::vector<std::size_t> s(dims.size());
  std::size_t acc = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    s[k] = acc;
    acc *= static_cast<std::size_t>(dims[k]);
  }
  return s;
}

// Flat offsets of every multi-index over the listed factors.
std::vector<std::size_t> offsets_for(std::span<const int> dims,
                                     const std::vector<std::size_t> &strides,
                                     const std::vector<int> &factors) {
  std::vector<std::size_t> out{0};
  for (int f : factors) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * static_cast<std::size_t>(dims[f]));
    for (std::size_t base : out)
      for (int v = 0; v < dims[f]; ++v)
        next.push_back(base + static_cast<std::size_t>(v) * strides[f]);
    out = std::move(next);
  }
  return out;
}

} // namespace

Matrix partial_trace(const Matrix &m, std::span<const int> dims,
                     std::span<const int> keep) {
  const std::size_t n = dim_product(dims);
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != n)
    throw InputError("partial_trace: dimension list does not match matrix side");
  const int nf = static_cast<int>(dims.size());
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw InputError("partial_trace: repeated subsystem index");
  for (int k : kept)
    if (k < 0 || k >= nf)
      throw InputError("partial_trace: subsystem index out of range");
  std::vector<int> traced;
  for (int f = 0; f < nf; ++f)
    if (!std::binary_search(kept.begin(), kept.end(), f))
      traced.push_back(f);

  const auto strides = strides_of(dims);
  const auto ok = offsets_for(dims, strides, kept);
  const auto ot = offsets_for(dims, strides, traced);
  const auto nk = static_cast<Eigen::Index>(ok.size());
  Matrix out = Matrix::Zero(nk, nk);
  for (Eigen::Index i = 0; i < nk; ++i)
    for (Eigen::Index j = 0; j < nk; ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t t : ot)
        acc += m(static_cast<Eigen::Index>(ok[i] + t),
                 static_cast<Eigen::Index>(ok[j] + t));
      out(i, j) = acc;
    }
  return out;
}

Vector permute_subsystems(const Vector &v, std::span<const int> dims,
                          std::span<const int> perm) {
  const std::size_t n = dim_product(dims);
  if (static_cast<std::size_t>(v.size()) != n)
    throw InputError("permute_subsystems: dimension list does not match vector");
  if (perm.size() != dims.size())
    throw InputError("permute_subsystems: permutation has wrong length");
  std::vector<int> check(perm.begin(), perm.end());
  std::sort(check.begin(), check.end());
  for (std::size_t k = 0; k < check.size(); ++k)
    if (check[k] != static_cast<int>(k))
      throw InputError("permute_subsystems: not a permutation");

  std::vector<int> out_dims(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k)
    out_dims[k] = dims[perm[k]];
  const auto in_strides = strides_of(dims);
  const auto out_strides = strides_of(out_dims);

  Vector out(v.size());
  std::vector<int> digits(dims.size());
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      digits[k] = static_cast<int>(rem / in_strides[k]);
      rem %= in_strides[k];
    }
    std::size_t o = 0;
    for (std::size_t k = 0; k < dims.size(); ++k)
      o += static_cast<std::size_t>(digits[perm[k]]) * out_strides[k];
    out(static_cast<Eigen::Index>(o)) = v(static_cast<Eigen::Index>(idx));
  }
  return out;
}

double max_abs(const Matrix &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermitian_error(const Matrix &m) {
  if (m.rows() != m.cols())
    return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

double unitarity_error(const Matrix &u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.cols(), u.cols()));
}

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() *
         eigenvectors.adjoint();
}

SpectralDecomposition eig_hermitian(const Matrix &m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw InputError("eig_hermitian: matrix must be square and non-empty");
  if (!m.allFinite())
    throw InputError("eig_hermitian: non-finite entries");
  if (hermitian_error(m) > tol::hermitian * std::max(1.0, max_abs(m)))
    throw InputError("eig_hermitian: matrix is not Hermitian");
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw InputError("eig_hermitian: eigensolver failed");
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    auto col = out.eigenvectors.col(c);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) > 1e-8) {
        col *= std::conj(col(r)) / std::abs(col(r));
        break;
      }
    }
  }
  return out;
}

double support_cutoff(const RealVector &eigenvalues) {
  const double top = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return tol::support * std::max(top, std::numeric_limits<double>::min());
}

Matrix matrix_func_psd(const SpectralDecomposition &spec, PsdFunction f) {
  const RealVector &ev = spec.eigenvalues;
  const double cut = support_cutoff(ev);
  RealVector out(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    double x = ev(k);
    if (f == PsdFunction::exp) {
      out(k) = std::exp(x);
      continue;
    }
    if (x < -tol::clamp)
      throw InputError("matrix_func_psd: operator is not positive semidefinite");
    x = std::max(x, 0.0);
    switch (f) {
    case PsdFunction::sqrt:
      out(k) = std::sqrt(x);
      break;
    case PsdFunction::log:
      out(k) = x > cut ? std::log(x) : 0.0;
      break;
    case PsdFunction::inv_sqrt:
      out(k) = x > cut ? 1.0 / std::sqrt(x) : 0.0;
      break;
    case PsdFunction::exp:
      break;
    }
  }
  return spec.eigenvectors * out.cast<cplx>().asDiagonal() *
         spec.eigenvectors.adjoint();
}

Matrix matrix_func_psd(const Matrix &m, PsdFunction f) {
  return matrix_func_psd(eig_hermitian(m), f);
}

DensityMatrix::DensityMatrix(Matrix m, std::vector<int> dims)
    : dims_(std::move(dims)) {
  if (m.rows() != m.cols())
    throw InputError("density matrix must be square");
  if (dims_.empty())
    dims_ = {static_cast<int>(m.rows())};
  if (dim_product(dims_) != static_cast<std::size_t>(m.rows()))
    throw InputError("density matrix: subsystem dimensions do not match");
  if (!m.allFinite())
    throw InputError("density matrix: non-finite entries");
  if (hermitian_error(m) > tol::state)
    throw InputError("density matrix is not Hermitian");
  matrix_ = 0.5 * (m + m.adjoint());
  if (std::abs(matrix_.trace().real() - 1.0) > tol::state)
    throw InputError("density matrix trace differs from one");
  spectrum_ = eig_hermitian(matrix_);
  if (spectrum_.eigenvalues(0) < -tol::state)
    throw InputError("density matrix has a negative eigenvalue");
}

DensityMatrix::DensityMatrix(Matrix m)
    : DensityMatrix(std::move(m), std::vector<int>{}) {}

DensityMatrix DensityMatrix::from_pure(const Vector &ket, std::vector<int> dims) {
  const double nrm = ket.norm();
  if (nrm == 0.0)
    throw InputError("from_pure: zero vector");
  const Vector v = ket / nrm;
  return DensityMatrix(v * v.adjoint(), std::move(dims));
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  if (d < 1)
    throw InputError("maximally_mixed: dimension must be positive");
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), {d});
}

DensityMatrix DensityMatrix::reduce(std::span<const int> keep) const {
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  std::vector<int> out_dims;
  for (int k : kept) {
    if (k < 0 || k >= static_cast<int>(dims_.size()))
      throw InputError("reduce: subsystem index out of range");
    out_dims.push_back(dims_[k]);
  }
  return DensityMatrix(partial_trace(matrix_, dims_, kept), out_dims);
}

double DensityMatrix::expectation(const Matrix &op) const {
  if (op.rows() != matrix_.rows() || op.cols() != matrix_.cols())
    throw InputError("expectation: operator dimension mismatch");
  return (op * matrix_).trace().real();
}

double trace_distance(const Matrix &a, const Matrix &b) {
  const auto spec = eig_hermitian(a - b);
  return 0.5 * spec.eigenvalues.cwiseAbs().sum();
}

Distances distances(const DensityMatrix &rho, const DensityMatrix &sigma) {
  if (rho.dim() != sigma.dim())
    throw InputError("distances: dimension mismatch");
  const double td = std::clamp(trace_distance(rho.matrix(), sigma.matrix()), 0.0, 1.0);
  const Matrix root = matrix_func_psd(sigma.spectrum(), PsdFunction::sqrt);
  const auto inner = eig_hermitian(root * rho.matrix() * root);
  double s = 0.0;
  for (Eigen::Index k = 0; k < inner.eigenvalues.size(); ++k)
    s += std::sqrt(std::max(inner.eigenvalues(k), 0.0));
  const double f = std::clamp(s * s, 0.0, 1.0);
  return {td, f, std::sqrt(1.0 - f)};
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

Matrix ginibre(int rows, int cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  return z;
}

} // namespace

Matrix haar_unitary(int d, std::uint64_t seed) {
  if (d < 1)
    throw InputError("haar_unitary: dimension must be positive");
  std::mt19937_64 rng(seed);
  const Matrix z = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0)
      q.col(k) *= r(k, k) / a;
  }
  return q;
}

Vector random_pure_state(int d, std::uint64_t seed) {
  if (d < 1)
    throw InputError("random_pure_state: dimension must be positive");
  std::mt19937_64 rng(seed);
  Vector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

DensityMatrix random_density_matrix(int d, std::uint64_t seed, int rank) {
  if (rank <= 0)
    rank = d;
  std::mt19937_64 rng(seed);
  const Matrix g = ginibre(d, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho, {d});
}

Matrix random_hermitian(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix g = ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

nlohmann::json matrix_to_json(const Matrix &m) {
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("re"))
    throw InputError("matrix JSON needs rows, cols and re");
  const auto rows = j.at("rows").get<long>();
  const auto cols = j.at("cols").get<long>();
  if (rows < 1 || cols < 1)
    throw InputError("matrix JSON: rows and cols must be positive");
  const auto re = j.at("re").get<std::vector<double>>();
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im"))
    im = j.at("im").get<std::vector<double>>();
  const auto n = static_cast<std::size_t>(rows * cols);
  if (re.size() != n || im.size() != n)
    throw InputError("matrix JSON: entry count differs from rows*cols");
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long c = 0; c < cols; ++c) {
      const auto k = static_cast<std::size_t>(i * cols + c);
      m(i, c) = cplx(re[k], im[k]);
    }
  if (!m.allFinite())
    throw InputError("matrix JSON: non-finite entries");
  return m;
}

} // namespace qet
