#include "qetlab/tradeoff.hpp"

#include "qetlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMarginalMatch = 1e-8;

void check_finite_beta(double beta, const char *who) {
  if (!(beta > 0.0) || std::isinf(beta))
    throw InputError(std::string(who) + ": needs a finite positive inverse temperature");
}

DensityMatrix as_state(const Matrix &m, int d) {
  Matrix h = 0.5 * (m + m.adjoint());
  h /= h.trace().real();
  return DensityMatrix(h, {d});
}

double min_eigenvalue(const Matrix &m) { return eig_hermitian(m).eigenvalues(0); }

struct MaxRelChecks {
  double gap;
  double min_eig;
};

MaxRelChecks max_rel_checks(const DensityMatrix &rho, const DensityMatrix &tau) {
  const double smax = max_relative_entropy(rho, tau).nats;
  const double rel = relative_entropy(rho, tau).nats;
  if (std::isinf(smax))
    return {std::isinf(rel) ? 0.0 : kInf, 0.0};
  const Matrix diff = std::exp(smax) * tau.matrix() - rho.matrix();
  return {smax - rel, min_eigenvalue(diff)};
}

} // namespace

TradeoffPoint theorem1_check(const ProtocolReport &report, const GibbsData &gibbs,
                             ProtocolTag tag) {
  if (!report.bob_marginal)
    throw InputError("theorem1_check: report carries no B marginal");
  if (report.bob_marginal->dim() != gibbs.tau.dim() ||
      max_abs(report.bob_marginal->matrix() - gibbs.tau.matrix()) > kMarginalMatch)
    throw InputError("theorem1_check: resource marginal is not the Gibbs state");
  TradeoffPoint pt;
  pt.beta_E = gibbs.beta * report.avg_E;
  pt.S = report.avg_S;
  pt.bound = von_neumann(gibbs.tau).nats;
  pt.slack = pt.bound - pt.beta_E - pt.S;
  if (tag.family.empty() && report.metadata.contains("family"))
    tag.family = report.metadata["family"].get<std::string>();
  tag.n = report.copies;
  pt.tag = std::move(tag);
  return pt;
}

double ProofStepReport::worst_relent_slack() const {
  double w = kInf;
  for (const auto &o : outcomes)
    w = std::min(w, o.relent_bound_slack);
  return w;
}

double ProofStepReport::worst_klein_slack() const {
  double w = kInf;
  for (const auto &o : outcomes)
    w = std::min(w, o.klein_slack);
  return w;
}

bool ProofStepReport::passes() const {
  return worst_relent_slack() >= -1e-9 && worst_klein_slack() >= -1e-10 &&
         ensemble_identity_error <= 1e-8 && smax_vs_rel_gap >= -1e-9 &&
         operator_ineq_min_eig >= -1e-9 && reconstruction_residual <= 1e-7 &&
         finite_n_chain_slack >= -1e-8;
}

ProofStepReport proof_step_check(const ProtocolReport &report, const GibbsData &gibbs) {
  check_finite_beta(gibbs.beta, "proof_step_check");
  if (!report.bob_marginal)
    throw InputError("proof_step_check: report carries no B marginal");
  const DensityMatrix &tau = gibbs.tau;
  const DensityMatrix &rho_b = *report.bob_marginal;
  if (rho_b.dim() != tau.dim())
    throw InputError("proof_step_check: dimension mismatch");
  const double beta = gibbs.beta;
  const int d = tau.dim();

  ProofStepReport out;
  auto gm = max_rel_checks(rho_b, tau);
  out.smax_vs_rel_gap = gm.gap;
  out.operator_ineq_min_eig = gm.min_eig;

  for (const auto &o : report.outcomes) {
    if (!o.defined)
      continue;
    OutcomeSlack s;
    s.x = o.x;
    s.p = o.p;
    const double rel = relative_entropy(*o.rho, tau).nats;
    s.relent_bound_slack = rel / beta - o.energy;
    const DensityMatrix decoded =
        as_state(o.decoder * o.rho->matrix() * o.decoder.adjoint(), d);
    s.klein_slack = relative_entropy(decoded, tau).nats;
    out.reconstructed_slack += o.p * s.klein_slack;
    out.outcomes.push_back(s);

    const auto m = max_rel_checks(*o.rho, tau);
    out.smax_vs_rel_gap = std::min(out.smax_vs_rel_gap, m.gap);
    out.operator_ineq_min_eig = std::min(out.operator_ineq_min_eig, m.min_eig);
  }

  out.ensemble_identity_error = max_abs(report.ensemble_average() - rho_b.matrix());
  const double lhs = report.avg_S + beta * report.avg_E;
  const double s_b = von_neumann(rho_b).nats;
  out.reconstruction_residual =
      std::abs(s_b + relative_entropy(rho_b, tau).nats - lhs - out.reconstructed_slack);
  out.finite_n_chain_slack = s_b + max_relative_entropy(rho_b, tau).nats - lhs;
  return out;
}

void ProofSummary::add(const ProofStepReport &r) {
  ++checked;
  if (!r.passes())
    ++failures;
  worst_relent_slack = std::min(worst_relent_slack, r.worst_relent_slack());
  worst_klein_slack = std::min(worst_klein_slack, r.worst_klein_slack());
  worst_ensemble_error = std::max(worst_ensemble_error, r.ensemble_identity_error);
  worst_smax_gap = std::min(worst_smax_gap, r.smax_vs_rel_gap);
  worst_operator_eig = std::min(worst_operator_eig, r.operator_ineq_min_eig);
  worst_reconstruction_residual =
      std::max(worst_reconstruction_residual, r.reconstruction_residual);
  worst_chain_slack = std::min(worst_chain_slack, r.finite_n_chain_slack);
}

namespace {

// JSON has no infinity; unbounded slacks are written as null.
nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

nlohmann::json ProofSummary::to_json() const {
  return {{"checked", checked},
          {"failures", failures},
          {"worst_relent_bound_slack", finite_or_null(worst_relent_slack)},
          {"worst_klein_slack", finite_or_null(worst_klein_slack)},
          {"worst_ensemble_identity_error", worst_ensemble_error},
          {"worst_smax_vs_rel_gap", finite_or_null(worst_smax_gap)},
          {"worst_operator_ineq_min_eig", finite_or_null(worst_operator_eig)},
          {"worst_reconstruction_residual", worst_reconstruction_residual},
          {"worst_finite_n_chain_slack", finite_or_null(worst_chain_slack)}};
}

bool Theorem1SweepSummary::passes(double tol) const {
  return violations == 0 && proof.failures == 0 && bell.holds(tol) &&
         product.holds(tol);
}

nlohmann::json Theorem1SweepSummary::to_json() const {
  return {{"samples", samples},
          {"passed", samples - violations},
          {"failed", violations},
          {"worst_slack", finite_or_null(worst_slack)},
          {"worst_seed", worst_seed},
          {"bound", bound},
          {"log_Z", log_Z},
          {"bell_slack", bell.slack},
          {"product_slack", product.slack},
          {"proof_steps", proof.to_json()}};
}

namespace {

Hamiltonian ladder(int d) {
  std::vector<double> e(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k)
    e[static_cast<std::size_t>(k)] = k;
  return Hamiltonian::diagonal(e);
}

struct SweepSample {
  TradeoffPoint point;
  ProofStepReport proof;
};

} // namespace

Theorem1SweepSummary theorem1_sweep(const Theorem1SweepConfig &config) {
  if (config.samples < 0)
    throw InputError("theorem1_sweep: negative sample count");
  const Hamiltonian h = config.hamiltonian ? *config.hamiltonian : ladder(config.dim);
  if (h.dim() != config.dim)
    throw InputError("theorem1_sweep: Hamiltonian dimension differs from dim");
  const GibbsData gibbs = gibbs_state(h, config.beta);
  const TFDState tfd = tfd_state(h, config.beta);

  Theorem1SweepSummary sum;
  sum.log_Z = gibbs.log_Z;
  sum.bound = von_neumann(gibbs.tau).nats;
  sum.bell = theorem1_check(run_protocol(tfd, bell_measurement(config.dim)), gibbs,
                            {"bell"});
  sum.product = theorem1_check(run_protocol(tfd, product_measurement(config.dim)),
                               gibbs, {"product"});

  const auto count = static_cast<std::size_t>(config.samples);
  std::vector<SweepSample> results(count);
  parallel_for(count, config.threads, [&](std::size_t k) {
    const std::uint64_t seed = split_seed(config.seed, k);
    const auto rep = run_protocol(tfd, haar_measurement(config.dim, seed));
    ProtocolTag tag{"haar"};
    tag.seed = seed;
    tag.has_seed = true;
    results[k] = {theorem1_check(rep, gibbs, tag), proof_step_check(rep, gibbs)};
  });

  sum.samples = count;
  for (const auto &r : results) {
    if (!r.point.holds(config.tolerance))
      ++sum.violations;
    if (r.point.slack < sum.worst_slack) {
      sum.worst_slack = r.point.slack;
      sum.worst_seed = r.point.tag.seed;
    }
    sum.proof.add(r.proof);
  }
  return sum;
}

// ---------------------------------------------------------------------------

nlohmann::json Theorem2Record::to_json() const {
  nlohmann::json j{{"n", n},
                   {"beta_star", finite_or_null(beta_star)},
                   {"bound", bound},
                   {"tensor_ergotropy_per_copy", tensor_ergotropy_per_copy},
                   {"regularized_ergotropy", regularized_ergotropy},
                   {"samples", samples},
                   {"violations", violations},
                   {"worst_slack", finite_or_null(worst_slack)},
                   {"worst_S_per_copy", worst_S_per_copy},
                   {"worst_energy_term", worst_energy_term},
                   {"holds", holds()}};
  if (!degenerate.empty())
    j["degenerate_beta"] = degenerate;
  if (proof.checked > 0)
    j["proof_steps"] = proof.to_json();
  return j;
}

std::vector<Theorem2Record> theorem2_finite_n(const PureResource &resource,
                                              const Hamiltonian &h, int n_max,
                                              const Theorem2Options &options) {
  if (n_max < 1)
    throw InputError("theorem2_finite_n: n_max must be positive");
  if (resource.dim_a != resource.dim_b || h.dim() != resource.dim_b)
    throw InputError("theorem2_finite_n: needs d_A = d_B = dim H");
  double meas = 1.0;
  for (int i = 0; i < 2 * n_max; ++i)
    meas *= resource.dim_a;
  if (meas > 256.0)
    throw InputError("theorem2_finite_n: d^{2 n_max} exceeds 256");
  if (options.family == MeasurementFamily::interpolated)
    throw InputError("theorem2_finite_n: use haar, bell or product schemes");

  const DensityMatrix rho_b = resource.bob_marginal();
  const double beta_star = effective_beta(rho_b, h);
  const double bound = von_neumann(rho_b).nats;
  std::string degenerate;
  if (beta_star == 0.0)
    degenerate = "zero";
  else if (std::isinf(beta_star))
    degenerate = "infinite";
  const double reg = regularized_ergotropy(rho_b, h);

  std::vector<Theorem2Record> records;
  for (int n = 1; n <= n_max; ++n) {
    Theorem2Record rec;
    rec.n = n;
    rec.beta_star = beta_star;
    rec.degenerate = degenerate;
    rec.bound = bound;
    rec.regularized_ergotropy = reg;
    rec.tensor_ergotropy_per_copy = tensor_power_ergotropy_per_copy(rho_b, h, n);

    int d_n = 1;
    for (int i = 0; i < n; ++i)
      d_n *= resource.dim_a;
    const Hamiltonian hn = n == 1 ? h : h.tensor_sum(n);
    std::optional<GibbsData> gibbs;
    if (degenerate.empty())
      gibbs = gibbs_state(hn, beta_star);

    std::size_t count = 1;
    if (options.family == MeasurementFamily::haar)
      count = static_cast<std::size_t>(std::max(options.samples, 0));
    struct Sample {
      double s = 0.0;
      double energy_term = 0.0;
      std::optional<ProofStepReport> proof;
    };
    std::vector<Sample> samples(count);
    parallel_for(count, options.threads, [&](std::size_t k) {
      MeasurementScheme m = [&] {
        switch (options.family) {
        case MeasurementFamily::bell:
          return tensor_scheme(bell_measurement(resource.dim_a), n);
        case MeasurementFamily::product:
          return product_measurement(d_n);
        default:
          return haar_measurement(
              d_n, split_seed(options.seed,
                              static_cast<std::uint64_t>(n) * 1000003u + k));
        }
      }();
      const auto rep = run_tensor_protocol(resource, h, n, m);
      Sample s;
      s.s = rep.per_copy_S();
      if (degenerate.empty())
        s.energy_term = beta_star * (rep.per_copy_E() - rec.tensor_ergotropy_per_copy);
      if (gibbs)
        s.proof = proof_step_check(rep, *gibbs);
      samples[k] = std::move(s);
    });

    rec.samples = count;
    for (const auto &s : samples) {
      const double slack = bound - s.s - s.energy_term;
      if (slack < -options.tolerance)
        ++rec.violations;
      if (slack < rec.worst_slack) {
        rec.worst_slack = slack;
        rec.worst_S_per_copy = s.s;
        rec.worst_energy_term = s.energy_term;
      }
      if (s.proof)
        rec.proof.add(*s.proof);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------

ParetoResult pareto_sweep(const ParetoConfig &config) {
  const Hamiltonian &h = config.hamiltonian;
  const int d = h.dim();
  const GibbsData gibbs = gibbs_state(h, config.beta);
  const TFDState tfd = tfd_state(h, config.beta);

  ParetoResult res;
  res.bound = von_neumann(gibbs.tau).nats;
  res.max_beta_E = config.beta * gibbs.tau.expectation(h.matrix());
  res.log_Z = gibbs.log_Z;

  struct Job {
    MeasurementSpec spec;
    ProtocolTag tag;
  };
  std::vector<Job> jobs;
  jobs.push_back({{MeasurementFamily::bell}, {"bell"}});
  jobs.push_back({{MeasurementFamily::product}, {"product"}});
  const int samples = std::max(config.samples, 0);
  for (auto fam : config.families) {
    switch (fam) {
    case MeasurementFamily::bell:
    case MeasurementFamily::product:
      break; // already present as endpoints
    case MeasurementFamily::interpolated:
      for (int k = 0; k < samples; ++k) {
        const double theta =
            samples == 1 ? 0.0 : (std::numbers::pi / 2) * k / (samples - 1);
        ProtocolTag tag{"interpolated"};
        tag.theta = theta;
        jobs.push_back({{fam, theta, 0}, tag});
      }
      break;
    case MeasurementFamily::haar:
      for (int k = 0; k < samples; ++k) {
        const std::uint64_t seed = split_seed(config.seed, static_cast<std::uint64_t>(k));
        ProtocolTag tag{"haar"};
        tag.seed = seed;
        tag.has_seed = true;
        jobs.push_back({{fam, 0.0, seed}, tag});
      }
      break;
    }
  }

  res.points.resize(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t k) {
    const auto rep = run_protocol(tfd, make_measurement(jobs[k].spec, d));
    res.points[k] = theorem1_check(rep, gibbs, jobs[k].tag);
  });
  for (const auto &p : res.points) {
    if (!p.holds())
      ++res.violations;
    res.worst_slack = std::min(res.worst_slack, p.slack);
  }
  return res;
}

EfVariantRecord ef_variant_check(const ProtocolReport &report, const GibbsData &gibbs) {
  if (report.dim_b != 2 || report.dim_r != 2)
    throw InputError("ef_variant_check: needs a qubit pair R B");
  Matrix mix = Matrix::Zero(4, 4);
  const Matrix id = Matrix::Identity(2, 2);
  for (const auto &o : report.outcomes) {
    if (!o.defined)
      continue;
    const Matrix u = kron(id, o.decoder);
    mix += o.p * u * o.rb_density() * u.adjoint();
  }
  const DensityMatrix rho_bar = as_state(mix, 4);
  EfVariantRecord r;
  r.ef = two_qubit_ef(rho_bar).nats;
  r.avg_S = report.avg_S;
  r.beta_E = gibbs.beta * report.avg_E;
  r.bound = von_neumann(gibbs.tau).nats;
  r.entropy_slack = r.avg_S - r.ef;
  r.bound_slack = r.bound - r.ef - r.beta_E;
  return r;
}

std::vector<ErgotropyScalingRow> ergotropy_scaling(const DensityMatrix &rho,
                                                   const Hamiltonian &h, int n_max) {
  if (n_max < 1)
    throw InputError("ergotropy_scaling: n_max must be positive");
  const double reg = regularized_ergotropy(rho, h);
  std::vector<ErgotropyScalingRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    const double w = tensor_power_ergotropy_per_copy(rho, h, n);
    rows.push_back({n, w, reg, reg - w});
  }
  return rows;
}

} // namespace qet
