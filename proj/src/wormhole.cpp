#include "qetlab/wormhole.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace qet {

namespace {

void check_params(double delta, double beta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InputError("conformal weight delta must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InputError("inverse temperature beta must be positive");
}

// log cosh x without overflow.
double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// Shape tanh(x) / cosh^{2 delta}(x) in the scaled time x = pi t / beta.
double shape(double x, double delta) {
  return std::tanh(x) * std::exp(-2.0 * delta * log_cosh(x));
}

// Same shape at complex argument; only used near the peak, where cosh is
// moderate.
std::complex<double> shape(std::complex<double> x, double delta) {
  return std::tanh(x) * std::pow(std::cosh(x), -2.0 * delta);
}

double prefactor(double delta, double beta) {
  return delta * std::pow(2.0 * std::numbers::pi / beta, 2.0 * delta + 1.0);
}

} // namespace

double teleported_energy(const WormholeParams &p) {
  check_params(p.delta, p.beta);
  if (p.t == 0.0)
    return 0.0;
  return p.g * prefactor(p.delta, p.beta) * shape(std::numbers::pi * p.t / p.beta, p.delta);
}

PeakInfo peak_time(double delta, double beta) {
  check_params(delta, beta);
  const double t = beta / std::numbers::pi * std::asinh(1.0 / std::sqrt(2.0 * delta));
  return {t, teleported_energy({1.0, delta, beta, t})};
}

double numeric_peak_time(double delta, double beta) {
  check_params(delta, beta);
  auto f = [delta](double x) { return shape(x, delta); };
  // The shape rises from 0 and decays, so doubling b until f(b) < f(b/2)
  // brackets the maximum in [0, b].
  double b = 1.0;
  while (f(b) >= f(0.5 * b))
    b *= 2.0;
  while (f(0.5 * b) < f(0.25 * b) && b > 1e-12)
    b *= 0.5;
  double lo = 0.0, hi = b;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-9 * b) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  // Golden section alone resolves the maximizer to ~sqrt(eps); refine on
  // the sign of f' computed by complex step (no cancellation).
  auto slope = [delta](double x) {
    constexpr double h = 1e-30;
    return shape(std::complex<double>(x, h), delta).imag() / h;
  };
  lo = std::max(0.0, lo - 1e-6 * b);
  hi = hi + 1e-6 * b;
  if (slope(lo) > 0.0 && slope(hi) < 0.0) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi)
        break;
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
  }
  return 0.5 * (lo + hi) * beta / std::numbers::pi;
}

// ---------------------------------------------------------------------------

Matrix majorana_operator(int index, int n_modes) {
  if (n_modes < 2 || n_modes % 2 != 0)
    throw InputError("Majorana mode count must be even and positive");
  if (n_modes > 20)
    throw InputError("Majorana mode count exceeds 20");
  if (index < 0 || index >= n_modes)
    throw InputError("Majorana index out of range");
  Matrix x(2, 2), y(2, 2), z(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  y << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  z << 1.0, 0.0, 0.0, -1.0;
  const int qubit = index / 2;
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 0; q < n_modes / 2; ++q) {
    if (q < qubit)
      out = kron(out, z);
    else if (q == qubit)
      out = kron(out, index % 2 == 0 ? x : y);
    else
      out = kron(out, Matrix::Identity(2, 2));
  }
  return out / std::sqrt(2.0);
}

MajoranaAlgebra::MajoranaAlgebra(int n_modes) : n_modes_(n_modes) {
  if (n_modes > 16)
    throw InputError("MajoranaAlgebra holds at most 16 modes; build larger ones per operator");
  for (int i = 0; i < n_modes; ++i)
    ops_.push_back(majorana_operator(i, n_modes));
}

double MajoranaAlgebra::anticommutator_error() const {
  double err = 0.0;
  const Matrix id = Matrix::Identity(dim(), dim());
  for (int a = 0; a < n_modes_; ++a)
    for (int b = a; b < n_modes_; ++b) {
      Matrix ac = (*this)[a] * (*this)[b] + (*this)[b] * (*this)[a];
      if (a == b)
        ac -= id;
      err = std::max(err, max_abs(ac));
    }
  return err;
}

Matrix MajoranaAlgebra::parity() const {
  Matrix p = Matrix::Identity(dim(), dim());
  for (const auto &m : ops_)
    p = p * m;
  return std::pow(cplx(0.0, 2.0), n_modes_ / 2) * p;
}

MajoranaAlgebra majorana_algebra(int n_modes) { return MajoranaAlgebra(n_modes); }

Matrix random_majorana_hamiltonian(int K, std::uint64_t seed) {
  if (K < 1)
    throw InputError("random_majorana_hamiltonian: K must be positive");
  const int n = 2 * K;
  const MajoranaAlgebra alg(n);
  std::mt19937_64 rng(seed);
  const Eigen::Index d = alg.dim();
  Matrix h = Matrix::Zero(d, d);
  if (n < 4) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    h = cplx(0.0, gauss(rng)) * alg[0] * alg[1];
  } else {
    std::normal_distribution<double> gauss(0.0, std::sqrt(6.0 / (n * n * n)));
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c)
          for (int e = c + 1; e < n; ++e)
            h += gauss(rng) * alg[a] * alg[b] * alg[c] * alg[e];
  }
  return 0.5 * (h + h.adjoint());
}

int epr_kernel_dimension() {
  const MajoranaAlgebra alg(4); // psi_0^A, chi^A, psi_0^B, chi^B
  const auto par = eig_hermitian(alg.parity());
  Matrix even(alg.dim(), 0);
  for (Eigen::Index k = 0; k < par.eigenvalues.size(); ++k)
    if (par.eigenvalues(k) > 0.0) {
      even.conservativeResize(Eigen::NoChange, even.cols() + 1);
      even.col(even.cols() - 1) = par.eigenvectors.col(k);
    }
  const Matrix c = alg[0] + cplx(0.0, 1.0) * alg[2];
  Eigen::JacobiSVD<Matrix> svd(c * even);
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > 1e-10)
      ++rank;
  return static_cast<int>(even.cols()) - rank;
}

// ---------------------------------------------------------------------------

namespace {

// exp(i theta H) for Hermitian H.
Matrix expi(const Matrix &h, double theta) {
  const auto spec = eig_hermitian(h);
  Vector ph(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < ph.size(); ++k)
    ph(k) = std::exp(cplx(0.0, theta * spec.eigenvalues(k)));
  return spec.eigenvectors * ph.asDiagonal() * spec.eigenvectors.adjoint();
}

// Tr_A |v><v| with A the leading factor of dimension da.
Matrix reduce_to_b(const Vector &v, Eigen::Index da) {
  const Eigen::Index db = v.size() / da;
  Matrix m(da, db);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index b = 0; b < db; ++b)
      m(a, b) = v(a * db + b);
  return m.transpose() * m.conjugate();
}

// Global layout, one qubit per Majorana pair:
//   [A_aux | A_sys (K qubits) | B_aux | B_sys (K qubits)]
// psi_0^A = mode 0, chi^A = 1, psi_i^A = 1 + i, and the B side repeats with
// offset 2K + 2.
struct Layout {
  int K;
  int modes() const { return 4 * K + 4; }
  int psi0_a() const { return 0; }
  int psi_a(int i) const { return 1 + i; }
  int psi0_b() const { return 2 * K + 2; }
  int psi_b(int i) const { return 2 * K + 3 + i; }
  Eigen::Index side_dim() const { return Eigen::Index{1} << (K + 1); }
};

struct Prepared {
  Vector psi;
  double annihilation_error;
};

// state (on A_sys B_sys) (x) |EPR_0>, where |EPR_0> on the auxiliary pair is
// fixed by (psi_0^A + i psi_0^B)|EPR_0> = 0.
Prepared prepare(const Layout &lay, const Vector &sys_state) {
  const Eigen::Index ds = Eigen::Index{1} << lay.K;
  if (sys_state.size() != ds * ds)
    throw InputError("system state has the wrong dimension");
  Vector aux = Vector::Zero(4);
  aux(0) = 1.0;
  const std::vector<int> dims{2, 2, static_cast<int>(ds), static_cast<int>(ds)};
  const std::vector<int> perm{0, 2, 1, 3};
  const Vector base = permute_subsystems(kron(aux, sys_state), dims, perm);
  const Matrix c = majorana_operator(lay.psi0_a(), lay.modes()) +
                   cplx(0.0, 1.0) * majorana_operator(lay.psi0_b(), lay.modes());
  Vector psi = c * (c.adjoint() * base);
  const double nrm = psi.norm();
  if (nrm < 1e-8)
    throw InputError("auxiliary pair projection vanished");
  psi /= nrm;
  return {psi, (c * psi).norm()};
}

Vector system_state(const LoccConfig &cfg) {
  const int ds = 1 << cfg.K;
  if (cfg.state == LoccStateKind::random_pure)
    return random_pure_state(ds * ds, cfg.seed);
  const Hamiltonian h(random_majorana_hamiltonian(cfg.K, cfg.seed));
  return tfd_state(h, cfg.beta).ket;
}

std::vector<int> resolve_order(int K, const std::vector<int> &order) {
  if (order.empty()) {
    std::vector<int> o;
    for (int i = 1; i <= K; ++i)
      o.push_back(i);
    return o;
  }
  std::vector<int> seen(static_cast<std::size_t>(K) + 1, 0);
  if (static_cast<int>(order.size()) != K)
    throw InputError("measurement order must list each of 1..K once");
  for (int i : order) {
    if (i < 1 || i > K || seen[static_cast<std::size_t>(i)]++)
      throw InputError("measurement order must list each of 1..K once");
  }
  return order;
}

void check_k(int K) {
  if (K < 1 || K > 4)
    throw InputError("K must be between 1 and 4");
}

// Projector P_{i,+} onto the kernel of psi_i^A + i psi_0^A (global).
Matrix plus_projector(const Layout &lay, int i) {
  const Matrix c = majorana_operator(lay.psi_a(i), lay.modes()) +
                   cplx(0.0, 1.0) * majorana_operator(lay.psi0_a(), lay.modes());
  return 0.5 * c * c.adjoint();
}

// Enumerates outcome strings depth first; outcome bit s at step k selects
// P_{order[k], s ? - : +}. Leaves are visited in binary order.
template <class Leaf>
void branch(const std::vector<Matrix> &plus, const Vector &v, std::size_t step,
            std::size_t code, const Leaf &leaf) {
  if (step == plus.size()) {
    leaf(code, v);
    return;
  }
  const Vector up = plus[step] * v;
  branch(plus, up, step + 1, code << 1, leaf);
  branch(plus, Vector(v - up), step + 1, (code << 1) | 1u, leaf);
}

} // namespace

nlohmann::json LoccReport::to_json() const {
  return {{"K", K},
          {"g", g},
          {"state_spec", state_spec},
          {"order", order},
          {"trace_distance", trace_distance},
          {"probs", probs},
          {"total_probability", total_probability},
          {"epr_annihilation_error", epr_annihilation_error},
          {"deformation_unitarity_error", deformation_unitarity_error},
          {"operator_identity_error", operator_identity_error},
          {"majorana_anticommutator_error", majorana_anticommutator_error}};
}

LoccReport locc_equivalence(const LoccConfig &cfg) {
  check_k(cfg.K);
  if (!std::isfinite(cfg.g))
    throw InputError("coupling g must be finite");
  const Layout lay{cfg.K};
  const auto order = resolve_order(cfg.K, cfg.order);
  const auto prep = prepare(lay, system_state(cfg));
  const int n = lay.modes();

  LoccReport rep;
  rep.K = cfg.K;
  rep.g = cfg.g;
  rep.order = order;
  rep.epr_annihilation_error = prep.annihilation_error;
  if (cfg.state == LoccStateKind::random_pure)
    rep.state_spec = {{"kind", "random_pure"}, {"seed", cfg.seed}};
  else
    rep.state_spec = {{"kind", "tfd"}, {"beta", cfg.beta}, {"seed", cfg.seed}};

  // Channel 1: two-sided coupling.
  const Matrix psi0a = majorana_operator(lay.psi0_a(), n);
  const Matrix psi0b = majorana_operator(lay.psi0_b(), n);
  const Eigen::Index dim = prep.psi.size();
  Matrix coupling = Matrix::Zero(dim, dim);
  std::vector<Matrix> bob_bilinear; // psi_0^B psi_i^B, i = 1..K
  double acomm = 0.0;
  for (int i = 1; i <= cfg.K; ++i) {
    const Matrix pa = majorana_operator(lay.psi_a(i), n);
    const Matrix pb = majorana_operator(lay.psi_b(i), n);
    acomm = std::max({acomm, max_abs(pa * pb + pb * pa), max_abs(pa * psi0a + psi0a * pa),
                      max_abs(pb * psi0b + psi0b * pb)});
    coupling += pa * pb * psi0a * psi0b;
    bob_bilinear.push_back(psi0b * pb);
  }
  rep.majorana_anticommutator_error = acomm;
  const Matrix w = expi(coupling, cfg.g / cfg.K);
  rep.deformation_unitarity_error = unitarity_error(w);
  const Eigen::Index da = lay.side_dim();
  const Matrix rho1 = reduce_to_b(w * prep.psi, da);

  // Channel 2: sequential measurement on A, conditional unitaries on B.
  // exp(-+ c psi_0^B psi_i^B) = exp(i (+-c) (i psi_0^B psi_i^B)).
  const double c = cfg.g / (2.0 * cfg.K);
  std::vector<Matrix> plus, u_plus, u_minus;
  for (int i : order) {
    plus.push_back(plus_projector(lay, i));
    const Matrix herm = cplx(0.0, 1.0) * bob_bilinear[static_cast<std::size_t>(i - 1)];
    u_plus.push_back(expi(herm, c));
    u_minus.push_back(expi(herm, -c));
  }
  rep.probs.assign(std::size_t{1} << cfg.K, 0.0);
  Matrix rho2 = Matrix::Zero(da, da);
  Vector coherent = Vector::Zero(dim);
  branch(plus, prep.psi, 0, 0, [&](std::size_t code, const Vector &v) {
    rep.probs[code] = v.squaredNorm();
    Vector out = v;
    for (std::size_t k = 0; k < plus.size(); ++k) {
      const bool minus = (code >> (plus.size() - 1 - k)) & 1u;
      out = (minus ? u_minus[k] : u_plus[k]) * out;
    }
    rho2 += reduce_to_b(out, da);
    coherent += out;
  });
  rep.operator_identity_error = (w * prep.psi - coherent).norm();
  for (double p : rep.probs)
    rep.total_probability += p;
  rep.trace_distance = trace_distance(rho1, rho2);
  return rep;
}

double deformation_energy_gain(const DeformationConfig &cfg) {
  check_k(cfg.K);
  const Layout lay{cfg.K};
  const Matrix hsys = random_majorana_hamiltonian(cfg.K, cfg.seed);
  const Hamiltonian h(hsys);
  const auto prep = prepare(lay, tfd_state(h, cfg.beta).ket);

  // Bob's side in its own Jordan-Wigner frame: B_aux then B_sys. Even
  // operators on B act as identity on A in the global frame.
  const int nb = 2 * cfg.K + 2;
  const Matrix hb = kron(Matrix::Identity(2, 2), h.matrix());
  const Matrix evolve = expi(hb, cfg.t);
  const Matrix b0 = majorana_operator(0, nb);
  const double c = cfg.g / (2.0 * cfg.K);
  std::vector<Matrix> plus, u_plus, u_minus;
  for (int i = 1; i <= cfg.K; ++i) {
    plus.push_back(plus_projector(lay, i));
    const Matrix herm = cplx(0.0, 1.0) * b0 * majorana_operator(1 + i, nb);
    u_plus.push_back(evolve * expi(herm, c) * evolve.adjoint());
    u_minus.push_back(evolve * expi(herm, -c) * evolve.adjoint());
  }
  const Eigen::Index da = lay.side_dim();
  double gain = 0.0;
  branch(plus, prep.psi, 0, 0, [&](std::size_t code, const Vector &v) {
    const Matrix rho = reduce_to_b(v, da); // p_x rho_x
    Matrix u = Matrix::Identity(da, da);
    for (std::size_t k = 0; k < plus.size(); ++k) {
      const bool minus = (code >> (plus.size() - 1 - k)) & 1u;
      u = (minus ? u_minus[k] : u_plus[k]) * u;
    }
    gain += (hb * (rho - u * rho * u.adjoint())).trace().real();
  });
  return gain;
}

} // namespace qet
