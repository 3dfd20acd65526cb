#include "qetlab/protocol.hpp"

#include "qetlab/entropy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace qet {

namespace {

constexpr double kCompleteness = 1e-9;
constexpr std::size_t kMaxMeasurementDim = 256;

std::vector<int> grouping_permutation(int n) {
  std::vector<int> perm;
  for (int i = 0; i < n; ++i)
    perm.push_back(2 * i);
  for (int i = 0; i < n; ++i)
    perm.push_back(2 * i + 1);
  return perm;
}

} // namespace

Matrix PureResource::coefficients() const {
  if (ket.size() != static_cast<Eigen::Index>(dim_a) * dim_b)
    throw InputError("resource ket does not match its dimensions");
  Matrix c(dim_a, dim_b);
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b)
      c(a, b) = ket(static_cast<Eigen::Index>(a) * dim_b + b);
  return c;
}

DensityMatrix PureResource::bob_marginal() const {
  const Matrix c = coefficients();
  Matrix rho = c.transpose() * c.conjugate();
  rho /= rho.trace().real();
  return DensityMatrix(rho, {dim_b});
}

PureResource as_resource(const TFDState &tfd) {
  return {tfd.ket, tfd.side_dim(), tfd.side_dim()};
}

PureResource schmidt_resource(const std::vector<double> &weights) {
  if (weights.empty())
    throw InputError("schmidt_resource: no weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0))
      throw InputError("schmidt_resource: weights must be non-negative");
    total += w;
  }
  if (total <= 0.0)
    throw InputError("schmidt_resource: weights sum to zero");
  const int d = static_cast<int>(weights.size());
  Vector ket = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int k = 0; k < d; ++k)
    ket(static_cast<Eigen::Index>(k) * d + k) = std::sqrt(weights[k] / total);
  return {ket, d, d};
}

PureResource tensor_power(const PureResource &r, int n) {
  if (n < 1)
    throw InputError("tensor_power: copies must be positive");
  Vector ket = r.ket;
  std::vector<int> dims{r.dim_a, r.dim_b};
  for (int i = 1; i < n; ++i) {
    ket = kron(ket, r.ket);
    dims.push_back(r.dim_a);
    dims.push_back(r.dim_b);
  }
  const auto perm = grouping_permutation(n);
  int da = 1, db = 1;
  for (int i = 0; i < n; ++i) {
    da *= r.dim_a;
    db *= r.dim_b;
  }
  return {permute_subsystems(ket, dims, perm), da, db};
}

Vector bell_state(int d) {
  if (d < 1)
    throw InputError("bell_state: dimension must be positive");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int k = 0; k < d; ++k)
    v(static_cast<Eigen::Index>(k) * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

// ---------------------------------------------------------------------------

MeasurementScheme MeasurementScheme::rank_one(std::vector<Vector> vectors,
                                              int dim_a, int dim_ap,
                                              nlohmann::json metadata) {
  MeasurementScheme m;
  m.kind_ = MeasurementKind::rank_one_projective;
  m.vectors_ = std::move(vectors);
  m.dim_a_ = dim_a;
  m.dim_ap_ = dim_ap;
  m.metadata_ = std::move(metadata);
  m.validate();
  return m;
}

MeasurementScheme MeasurementScheme::kraus(std::vector<Matrix> operators,
                                           int dim_a, int dim_ap,
                                           nlohmann::json metadata) {
  MeasurementScheme m;
  m.kind_ = MeasurementKind::kraus_instrument;
  m.kraus_ = std::move(operators);
  m.dim_a_ = dim_a;
  m.dim_ap_ = dim_ap;
  m.metadata_ = std::move(metadata);
  m.validate();
  return m;
}

std::size_t MeasurementScheme::size() const {
  return kind_ == MeasurementKind::rank_one_projective ? vectors_.size()
                                                       : kraus_.size();
}

Matrix MeasurementScheme::kraus_operator(std::size_t x) const {
  if (kind_ == MeasurementKind::rank_one_projective)
    return vectors_.at(x) * vectors_.at(x).adjoint();
  return kraus_.at(x);
}

Matrix MeasurementScheme::povm_element(std::size_t x) const {
  if (kind_ == MeasurementKind::rank_one_projective)
    return vectors_.at(x) * vectors_.at(x).adjoint();
  return kraus_.at(x).adjoint() * kraus_.at(x);
}

double MeasurementScheme::completeness_error() const {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a_) * dim_ap_;
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t x = 0; x < size(); ++x)
    sum += povm_element(x);
  return max_abs(sum - Matrix::Identity(n, n));
}

void MeasurementScheme::validate() const {
  if (dim_a_ < 1 || dim_ap_ < 1)
    throw InputError("measurement dimensions must be positive");
  const auto n = static_cast<std::size_t>(dim_a_) * static_cast<std::size_t>(dim_ap_);
  if (n > kMaxMeasurementDim)
    throw InputError("measurement dimension exceeds 256");
  if (size() == 0)
    throw InputError("measurement has no outcomes");
  for (const auto &v : vectors_) {
    if (static_cast<std::size_t>(v.size()) != n)
      throw InputError("measurement vector has wrong dimension");
    if (std::abs(v.norm() - 1.0) > kCompleteness)
      throw InputError("rank-one measurement vectors must be normalized");
  }
  for (const auto &k : kraus_)
    if (static_cast<std::size_t>(k.rows()) != n || k.rows() != k.cols())
      throw InputError("Kraus operator has wrong dimension");
  if (completeness_error() > kCompleteness)
    throw InputError("measurement is not complete: sum of POVM elements != I");
}

std::string to_string(MeasurementFamily f) {
  switch (f) {
  case MeasurementFamily::bell:
    return "bell";
  case MeasurementFamily::product:
    return "product";
  case MeasurementFamily::interpolated:
    return "interpolated";
  case MeasurementFamily::haar:
    return "haar";
  }
  return "unknown";
}

MeasurementFamily family_from_string(const std::string &s) {
  if (s == "bell")
    return MeasurementFamily::bell;
  if (s == "product")
    return MeasurementFamily::product;
  if (s == "interpolated")
    return MeasurementFamily::interpolated;
  if (s == "haar")
    return MeasurementFamily::haar;
  throw InputError("unknown measurement family '" + s + "'");
}

namespace {

Matrix bell_basis_matrix(int d) {
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Matrix basis(n, n);
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  Eigen::Index col = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      // (I (x) X^a Z^b)|I>: |k> (x) omega^{bk} |k + a>.
      Vector v = Vector::Zero(n);
      for (int k = 0; k < d; ++k) {
        const double phase = 2.0 * std::numbers::pi * b * k / d;
        v(static_cast<Eigen::Index>(k) * d + (k + a) % d) =
            inv * cplx(std::cos(phase), std::sin(phase));
      }
      basis.col(col++) = v;
    }
  return basis;
}

std::vector<Vector> columns(const Matrix &m) {
  std::vector<Vector> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    out.emplace_back(m.col(c));
  return out;
}

void check_dim(int d) {
  if (d < 2)
    throw InputError("measurement dimension must be at least 2");
  if (static_cast<long>(d) * d > static_cast<long>(kMaxMeasurementDim))
    throw InputError("measurement dimension exceeds 256");
}

} // namespace

MeasurementScheme bell_measurement(int d) {
  check_dim(d);
  return MeasurementScheme::rank_one(columns(bell_basis_matrix(d)), d, d,
                                     {{"family", "bell"}});
}

MeasurementScheme product_measurement(int d) {
  check_dim(d);
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  return MeasurementScheme::rank_one(columns(Matrix::Identity(n, n)), d, d,
                                     {{"family", "product"}});
}

Matrix interpolation_generator(int d) {
  check_dim(d);
  const Matrix target = bell_basis_matrix(d).adjoint();
  Eigen::ComplexSchur<Matrix> schur(target);
  const Matrix &w = schur.matrixU();
  const Matrix &t = schur.matrixT();
  RealVector phases(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k)
    phases(k) = std::arg(t(k, k));
  // exp(-i pi/2 G) = W diag(e^{i phi}) W^dag  =>  G = -(2/pi) W diag(phi) W^dag.
  Matrix g = -(2.0 / std::numbers::pi) * w * phases.cast<cplx>().asDiagonal() *
             w.adjoint();
  return 0.5 * (g + g.adjoint());
}

MeasurementScheme interpolated_measurement(int d, double theta) {
  check_dim(d);
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2 + 1e-12))
    throw InputError("interpolated measurement needs theta in [0, pi/2]");
  const Matrix g = interpolation_generator(d);
  const auto spec = eig_hermitian(g);
  Vector phase(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < phase.size(); ++k)
    phase(k) = std::exp(cplx(0.0, -theta * spec.eigenvalues(k)));
  const Matrix rot = spec.eigenvectors * phase.asDiagonal() * spec.eigenvectors.adjoint();
  return MeasurementScheme::rank_one(columns(bell_basis_matrix(d) * rot), d, d,
                                     {{"family", "interpolated"},
                                      {"theta", theta},
                                      {"generator", matrix_to_json(g)}});
}

MeasurementScheme haar_measurement(int d, std::uint64_t seed) {
  check_dim(d);
  return MeasurementScheme::rank_one(columns(haar_unitary(d * d, seed)), d, d,
                                     {{"family", "haar"}, {"seed", seed}});
}

MeasurementScheme make_measurement(const MeasurementSpec &spec, int d) {
  switch (spec.family) {
  case MeasurementFamily::bell:
    return bell_measurement(d);
  case MeasurementFamily::product:
    return product_measurement(d);
  case MeasurementFamily::interpolated:
    return interpolated_measurement(d, spec.theta);
  case MeasurementFamily::haar:
    return haar_measurement(d, spec.seed);
  }
  throw InputError("unknown measurement family");
}

MeasurementScheme coarse_grain(const MeasurementScheme &fine,
                               const std::vector<std::vector<int>> &groups) {
  if (fine.kind() != MeasurementKind::rank_one_projective)
    throw InputError("coarse_grain needs a rank-one scheme");
  std::vector<Matrix> ops;
  std::vector<bool> used(fine.size(), false);
  const Eigen::Index n = static_cast<Eigen::Index>(fine.dim_a()) * fine.dim_ap();
  for (const auto &g : groups) {
    Matrix p = Matrix::Zero(n, n);
    for (int x : g) {
      if (x < 0 || static_cast<std::size_t>(x) >= fine.size() || used[x])
        throw InputError("coarse_grain: invalid or repeated outcome index");
      used[x] = true;
      p += fine.vectors()[x] * fine.vectors()[x].adjoint();
    }
    ops.push_back(p);
  }
  nlohmann::json meta = fine.metadata();
  meta["coarse_grained"] = groups;
  return MeasurementScheme::kraus(std::move(ops), fine.dim_a(), fine.dim_ap(), meta);
}

MeasurementScheme tensor_scheme(const MeasurementScheme &single, int n) {
  if (single.kind() != MeasurementKind::rank_one_projective)
    throw InputError("tensor_scheme needs a rank-one scheme");
  if (n < 1)
    throw InputError("tensor_scheme: copies must be positive");
  std::vector<Vector> current = single.vectors();
  std::vector<int> dims{single.dim_a(), single.dim_ap()};
  for (int i = 1; i < n; ++i) {
    std::vector<Vector> next;
    for (const auto &v : current)
      for (const auto &w : single.vectors())
        next.push_back(kron(v, w));
    current = std::move(next);
    dims.push_back(single.dim_a());
    dims.push_back(single.dim_ap());
  }
  const auto perm = grouping_permutation(n);
  for (auto &v : current)
    v = permute_subsystems(v, dims, perm);
  int da = 1, dap = 1;
  for (int i = 0; i < n; ++i) {
    da *= single.dim_a();
    dap *= single.dim_ap();
  }
  nlohmann::json meta = single.metadata();
  meta["tensor_copies"] = n;
  return MeasurementScheme::rank_one(std::move(current), da, dap, meta);
}

// ---------------------------------------------------------------------------

SchmidtForm schmidt_split(const Vector &v, int dim_a, int dim_ap) {
  if (dim_a != dim_ap)
    throw InputError("schmidt_split: A and A' must have equal dimension");
  if (v.size() != static_cast<Eigen::Index>(dim_a) * dim_ap)
    throw InputError("schmidt_split: vector dimension mismatch");
  if (v.norm() == 0.0)
    throw InputError("schmidt_split: zero vector");
  // v = (sqrt(sigma) (x) U)|I>  <=>  M = sqrt(sigma) U^T, M(a, a') = v[a d + a'].
  Matrix m(dim_a, dim_ap);
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_ap; ++b)
      m(a, b) = v(static_cast<Eigen::Index>(a) * dim_ap + b);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix &left = svd.matrixU();
  const Matrix &right = svd.matrixV();
  const RealVector s = svd.singularValues();
  Matrix sigma = left * (s.array().square()).matrix().cast<cplx>().asDiagonal() *
                 left.adjoint();
  const Matrix w = left * right.adjoint();
  return {0.5 * (sigma + sigma.adjoint()), w.transpose()};
}

Vector schmidt_join(const SchmidtForm &s) {
  const Matrix root = matrix_func_psd(s.sigma, PsdFunction::sqrt);
  const Eigen::Index d = s.sigma.rows();
  const Matrix m = root * s.u.transpose();
  Vector v(d * s.u.rows());
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < s.u.rows(); ++b)
      v(a * s.u.rows() + b) = m(a, b);
  return v;
}

// ---------------------------------------------------------------------------

std::string to_string(DecoderKind k) {
  switch (k) {
  case DecoderKind::ergotropy_optimal:
    return "ergotropy_optimal";
  case DecoderKind::explicit_unitaries:
    return "explicit";
  case DecoderKind::none:
    return "none";
  }
  return "unknown";
}

Matrix ProtocolOutcome::rb_density() const {
  if (rb_state.size() > 0)
    return rb_state * rb_state.adjoint();
  return rb_matrix;
}

Matrix ProtocolReport::ensemble_average() const {
  Matrix avg = Matrix::Zero(dim_b, dim_b);
  for (const auto &o : outcomes)
    if (o.defined)
      avg += o.p * o.rho->matrix();
  return avg;
}

double ProtocolReport::total_probability() const {
  double s = 0.0;
  for (const auto &o : outcomes)
    s += o.p;
  return s;
}

namespace {

// Rows index (a, a'), columns (r, b).
Matrix joint_state_matrix(const PureResource &res) {
  const int da = res.dim_a, db = res.dim_b, dap = res.dim_a;
  const Matrix c = res.coefficients();
  const double inv = 1.0 / std::sqrt(static_cast<double>(dap));
  Matrix psi = Matrix::Zero(static_cast<Eigen::Index>(da) * dap,
                            static_cast<Eigen::Index>(dap) * db);
  for (int a = 0; a < da; ++a)
    for (int k = 0; k < dap; ++k)
      for (int b = 0; b < db; ++b)
        psi(static_cast<Eigen::Index>(a) * dap + k,
            static_cast<Eigen::Index>(k) * db + b) = c(a, b) * inv;
  return psi;
}

void finish_outcome(ProtocolOutcome &o, const Hamiltonian &h, const Decoder &dec,
                    int dim_r, int dim_b) {
  const Matrix rb = o.rb_density();
  const std::vector<int> dims{dim_r, dim_b};
  const std::vector<int> keep{1};
  Matrix rho = partial_trace(rb, dims, keep);
  rho /= rho.trace().real();
  o.rho.emplace(rho, std::vector<int>{dim_b});
  switch (dec.kind) {
  case DecoderKind::ergotropy_optimal: {
    auto erg = ergotropy(*o.rho, h);
    o.energy = erg.value;
    o.decoder = std::move(erg.extractor);
    break;
  }
  case DecoderKind::explicit_unitaries:
    o.decoder = dec.unitaries.at(o.x);
    o.energy = extracted_energy(*o.rho, h, o.decoder);
    break;
  case DecoderKind::none:
    o.decoder = Matrix::Identity(dim_b, dim_b);
    o.energy = 0.0;
    break;
  }
  o.entropy = von_neumann(*o.rho).nats;
}

} // namespace

ProtocolReport run_protocol(const PureResource &resource, const Hamiltonian &h,
                            const MeasurementScheme &m, const Decoder &decoder) {
  const int da = resource.dim_a, db = resource.dim_b;
  if (m.dim_a() != da || m.dim_ap() != da)
    throw InputError("measurement must act on A (x) A' with d_A' = d_A");
  if (h.dim() != db)
    throw InputError("Hamiltonian does not act on Bob's system");
  if (std::abs(resource.ket.norm() - 1.0) > 1e-10)
    throw InputError("resource state is not normalized");
  if (decoder.kind == DecoderKind::explicit_unitaries) {
    if (decoder.unitaries.size() != m.size())
      throw InputError("explicit decoder needs one unitary per outcome");
    for (const auto &u : decoder.unitaries)
      if (u.rows() != db || u.cols() != db || unitarity_error(u) > 1e-9)
        throw InputError("explicit decoder entries must be unitaries on B");
  }

  const int dr = da;
  const Matrix psi = joint_state_matrix(resource);
  ProtocolReport rep;
  rep.dim_r = dr;
  rep.dim_b = db;
  rep.bob_marginal.emplace(resource.bob_marginal());
  rep.metadata = m.metadata();
  rep.metadata["decoder"] = to_string(decoder.kind);
  rep.outcomes.resize(m.size());

  Matrix amplitudes; // row x: conditional unnormalized vector on R (x) B
  if (m.kind() == MeasurementKind::rank_one_projective) {
    Matrix v(psi.rows(), static_cast<Eigen::Index>(m.size()));
    for (std::size_t x = 0; x < m.size(); ++x)
      v.col(static_cast<Eigen::Index>(x)) = m.vectors()[x];
    amplitudes = v.adjoint() * psi;
  }

  for (std::size_t x = 0; x < m.size(); ++x) {
    auto &o = rep.outcomes[x];
    o.x = x;
    if (m.kind() == MeasurementKind::rank_one_projective) {
      const Vector phi = amplitudes.row(static_cast<Eigen::Index>(x)).transpose();
      o.p = phi.squaredNorm();
      if (o.p >= kNegligibleProbability)
        o.rb_state = phi / std::sqrt(o.p);
    } else {
      const Matrix post = m.kraus_operator(x) * psi;
      Matrix rb = post.transpose() * post.conjugate();
      o.p = rb.trace().real();
      if (o.p >= kNegligibleProbability)
        o.rb_matrix = rb / o.p;
    }
    o.defined = o.p >= kNegligibleProbability;
    if (o.defined)
      finish_outcome(o, h, decoder, dr, db);
  }

  double fid = 0.0;
  const bool square = dr == db;
  const Vector phi = square ? bell_state(db) : Vector();
  for (const auto &o : rep.outcomes) {
    if (!o.defined)
      continue;
    rep.avg_E += o.p * o.energy;
    rep.avg_S += o.p * o.entropy;
    if (square) {
      const Matrix local = kron(Matrix::Identity(dr, dr), o.decoder);
      const Vector w = local.adjoint() * phi;
      fid += o.p * (w.adjoint() * o.rb_density() * w)(0, 0).real();
    }
  }
  if (square)
    rep.entanglement_fidelity = fid;
  return rep;
}

ProtocolReport run_protocol(const TFDState &tfd, const MeasurementScheme &m,
                            const Decoder &decoder) {
  auto rep = run_protocol(as_resource(tfd), *tfd.hamiltonian, m, decoder);
  rep.beta_used = tfd.beta;
  rep.metadata["resource"] = "tfd";
  return rep;
}

ProtocolReport run_tensor_protocol(const PureResource &single, const Hamiltonian &h,
                                   int n, const MeasurementScheme &m,
                                   const Decoder &decoder) {
  if (n < 1)
    throw InputError("run_tensor_protocol: copies must be positive");
  double meas_dim = 1.0;
  for (int i = 0; i < 2 * n; ++i)
    meas_dim *= single.dim_a;
  if (meas_dim > static_cast<double>(kMaxMeasurementDim))
    throw InputError("run_tensor_protocol: d^{2n} exceeds 256");
  const PureResource big = tensor_power(single, n);
  const Hamiltonian hn = n == 1 ? h : h.tensor_sum(n);
  auto rep = run_protocol(big, hn, m, decoder);
  rep.copies = n;
  rep.metadata["copies"] = n;
  return rep;
}

SteeredEnsemble steer_via_povm(const PureResource &resource,
                               const MeasurementScheme &m) {
  const int da = resource.dim_a;
  if (m.dim_a() != da || m.dim_ap() != da)
    throw InputError("steer_via_povm: measurement dimension mismatch");
  const Matrix c = resource.coefficients();
  const std::vector<int> dims{da, da};
  const std::vector<int> keep{0};
  SteeredEnsemble out;
  for (std::size_t x = 0; x < m.size(); ++x) {
    const Matrix sigma = partial_trace(m.povm_element(x), dims, keep) /
                         static_cast<double>(da);
    const Matrix w = c.transpose() * sigma.transpose() * c.conjugate();
    out.p.push_back(w.trace().real());
    out.weighted_states.push_back(w);
  }
  return out;
}

nlohmann::json report_to_json(const ProtocolReport &r) {
  nlohmann::json outs = nlohmann::json::array();
  for (const auto &o : r.outcomes)
    outs.push_back({{"x", o.x},
                    {"p", o.p},
                    {"defined", o.defined},
                    {"E", o.energy},
                    {"S", o.entropy}});
  nlohmann::json j{{"avg_E", r.avg_E},
                   {"avg_S", r.avg_S},
                   {"copies", r.copies},
                   {"outcomes", outs},
                   {"metadata", r.metadata}};
  if (!std::isnan(r.beta_used))
    j["beta"] = r.beta_used;
  if (!std::isnan(r.entanglement_fidelity))
    j["entanglement_fidelity"] = r.entanglement_fidelity;
  return j;
}

} // namespace qet
