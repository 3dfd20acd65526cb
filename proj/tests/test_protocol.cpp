#include "qetlab/entropy.hpp"
#include "qetlab/protocol.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qet;

namespace {

Hamiltonian qubit() { return Hamiltonian::diagonal({0.0, 1.0}); }

// X^a Z^b on C^d.
Matrix weyl(int d, int a, int b) {
  Matrix m = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k)
    m((k + a) % d, k) = std::exp(cplx(0.0, 2.0 * std::numbers::pi * b * k / d));
  return m;
}

double overlap_abs(const Vector &u, const Vector &v) { return std::abs(u.dot(v)); }

} // namespace

TEST(Measurement, FamiliesAreComplete) {
  for (int d : {2, 3}) {
    EXPECT_LT(bell_measurement(d).completeness_error(), 1e-12);
    EXPECT_LT(product_measurement(d).completeness_error(), 1e-12);
    EXPECT_LT(interpolated_measurement(d, 0.4).completeness_error(), 1e-12);
    EXPECT_LT(haar_measurement(d, 17).completeness_error(), 1e-12);
    EXPECT_EQ(bell_measurement(d).size(), static_cast<std::size_t>(d * d));
  }
}

TEST(Measurement, RejectsIncompleteSet) {
  std::vector<Vector> v{Vector::Unit(4, 0), Vector::Unit(4, 1)};
  EXPECT_THROW(MeasurementScheme::rank_one(v, 2, 2), InputError);
  EXPECT_THROW(interpolated_measurement(2, 2.0), InputError);
  EXPECT_THROW(family_from_string("nope"), InputError);
}

TEST(Measurement, BellVectorsAreMaximallyEntangled) {
  const auto m = bell_measurement(3);
  for (const auto &v : m.vectors()) {
    const auto r = DensityMatrix::from_pure(v, {3, 3}).reduce(std::vector<int>{0});
    EXPECT_LT(max_abs(r.matrix() - Matrix::Identity(3, 3) / 3.0), 1e-14);
  }
}

TEST(Measurement, InterpolationHitsBothEndpoints) {
  for (int d : {2, 3}) {
    const auto bell = bell_measurement(d);
    const auto start = interpolated_measurement(d, 0.0);
    for (std::size_t k = 0; k < bell.size(); ++k)
      EXPECT_NEAR(overlap_abs(bell.vectors()[k], start.vectors()[k]), 1.0, 1e-12);
    // At pi/2 every vector is a computational basis state up to phase.
    const auto end = interpolated_measurement(d, std::numbers::pi / 2);
    for (const auto &v : end.vectors())
      EXPECT_NEAR(v.cwiseAbs().maxCoeff(), 1.0, 1e-10);
  }
}

TEST(Measurement, GeneratorIsHermitian) {
  const Matrix g = interpolation_generator(2);
  EXPECT_LT(max_abs(g - g.adjoint()), 1e-14);
}

TEST(SchmidtSplit, RoundTripAndCompleteness) {
  const auto m = haar_measurement(3, 5);
  Matrix total = Matrix::Zero(3, 3);
  for (const auto &v : m.vectors()) {
    const auto s = schmidt_split(v, 3, 3);
    EXPECT_LT(unitarity_error(s.u), 1e-12);
    EXPECT_LT((schmidt_join(s) - v).norm(), 1e-12);
    total += s.sigma;
  }
  // Summing the local parts of a complete basis gives d times identity.
  EXPECT_LT(max_abs(total - 3.0 * Matrix::Identity(3, 3)), 1e-12);
}

TEST(Protocol, BellMeasurementOnQubitTfdLeavesMarginal) {
  const auto tfd = tfd_state(qubit(), 1.0);
  const auto rep = run_protocol(tfd, bell_measurement(2));
  ASSERT_EQ(rep.outcomes.size(), 4u);
  const auto tau = gibbs_state(qubit(), 1.0).tau;
  for (const auto &o : rep.outcomes) {
    EXPECT_NEAR(o.p, 0.25, 1e-14);
    EXPECT_LT(max_abs(o.rho->matrix() - tau.matrix()), 1e-13);
  }
  EXPECT_NEAR(rep.avg_E, 0.0, 1e-13);
  EXPECT_NEAR(rep.avg_S, 0.5822, 5e-5);
  EXPECT_EQ(rep.beta_used, 1.0);
}

TEST(Protocol, ProductMeasurementOnQubitTfdCollapses) {
  const auto tfd = tfd_state(qubit(), 1.0);
  const auto rep = run_protocol(tfd, product_measurement(2));
  const double p1 = std::exp(-1.0) / (1.0 + std::exp(-1.0));
  // Outcome |a a'>: probability tau_a / 2, Bob left in |a>.
  EXPECT_NEAR(rep.outcomes[0].p, (1 - p1) / 2, 1e-14);
  EXPECT_NEAR(rep.outcomes[3].p, p1 / 2, 1e-14);
  EXPECT_NEAR(rep.avg_S, 0.0, 1e-12);
  EXPECT_NEAR(rep.avg_E, p1, 1e-13);
  EXPECT_NEAR(rep.avg_E, 0.2689, 5e-5);
}

TEST(Protocol, MatchesSteeringFromReducedPovm) {
  const PureResource res{random_pure_state(9, 3), 3, 3};
  const Hamiltonian h(random_hermitian(3, 4));
  for (const auto &m : {haar_measurement(3, 8), bell_measurement(3),
                        coarse_grain(haar_measurement(3, 9), {{0, 1, 2}, {3, 4}, {5}, {6, 7, 8}})}) {
    const auto rep = run_protocol(res, h, m);
    const auto st = steer_via_povm(res, m);
    ASSERT_EQ(st.p.size(), rep.outcomes.size());
    for (std::size_t x = 0; x < st.p.size(); ++x) {
      EXPECT_NEAR(rep.outcomes[x].p, st.p[x], 1e-12);
      if (rep.outcomes[x].defined)
        EXPECT_LT(max_abs(rep.outcomes[x].p * rep.outcomes[x].rho->matrix() -
                          st.weighted_states[x]),
                  1e-12);
    }
    EXPECT_NEAR(rep.total_probability(), 1.0, 1e-12);
    EXPECT_LT(max_abs(rep.ensemble_average() - rep.bob_marginal->matrix()), 1e-12);
  }
}

TEST(Protocol, CoarseGrainingAddsProbabilities) {
  const PureResource res{random_pure_state(4, 21), 2, 2};
  const auto fine = haar_measurement(2, 22);
  const auto coarse = coarse_grain(fine, {{0, 1}, {2, 3}});
  const auto a = run_protocol(res, qubit(), fine);
  const auto b = run_protocol(res, qubit(), coarse);
  EXPECT_NEAR(b.outcomes[0].p, a.outcomes[0].p + a.outcomes[1].p, 1e-13);
  EXPECT_NEAR(b.outcomes[1].p, a.outcomes[2].p + a.outcomes[3].p, 1e-13);
  EXPECT_THROW(coarse_grain(fine, {{0, 0}}), InputError);
}

TEST(Protocol, TeleportationCorrectedByWeylOperators) {
  const auto res = schmidt_resource({1.0, 1.0, 1.0});
  const Hamiltonian h = Hamiltonian::diagonal({0.0, 1.0, 2.0});
  const auto m = bell_measurement(3);
  Decoder none;
  none.kind = DecoderKind::none;
  const auto raw = run_protocol(res, h, m, none);
  const Vector phi = bell_state(3);
  // Each conditional state on R B is a Weyl rotation of the reference pair.
  Decoder fix;
  fix.kind = DecoderKind::explicit_unitaries;
  for (const auto &o : raw.outcomes) {
    Matrix best;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const Matrix w = weyl(3, a, b);
        if (overlap_abs(phi, kron(Matrix::Identity(3, 3), w) * o.rb_state) > 1 - 1e-10)
          best = w;
      }
    ASSERT_EQ(best.rows(), 3);
    fix.unitaries.push_back(best);
  }
  EXPECT_NEAR(raw.entanglement_fidelity, 1.0 / 9.0, 1e-12);
  EXPECT_NEAR(run_protocol(res, h, m, fix).entanglement_fidelity, 1.0, 1e-12);
}

TEST(Protocol, NoDecoderExtractsNothing) {
  const PureResource res{random_pure_state(4, 31), 2, 2};
  Decoder none;
  none.kind = DecoderKind::none;
  EXPECT_EQ(run_protocol(res, qubit(), haar_measurement(2, 1), none).avg_E, 0.0);
}

TEST(Protocol, ErgotropyDecoderIsOptimalAmongExplicit) {
  const PureResource res{random_pure_state(4, 41), 2, 2};
  const auto m = haar_measurement(2, 42);
  const auto best = run_protocol(res, qubit(), m);
  for (std::uint64_t s = 0; s < 10; ++s) {
    Decoder d;
    d.kind = DecoderKind::explicit_unitaries;
    for (std::size_t x = 0; x < m.size(); ++x)
      d.unitaries.push_back(haar_unitary(2, 100 * s + x));
    EXPECT_LE(run_protocol(res, qubit(), m, d).avg_E, best.avg_E + 1e-12);
  }
}

TEST(Protocol, TensorPowerMarginalIsProduct) {
  const auto tfd = tfd_state(qubit(), 0.8);
  const auto r2 = tensor_power(as_resource(tfd), 2);
  EXPECT_EQ(r2.dim_a, 4);
  const auto tau = gibbs_state(qubit(), 0.8).tau.matrix();
  EXPECT_LT(max_abs(r2.bob_marginal().matrix() - kron(tau, tau)), 1e-13);
}

TEST(Protocol, TensorBellSchemeIsAdditive) {
  const auto tfd = tfd_state(qubit(), 1.0);
  const auto one = run_protocol(tfd, bell_measurement(2));
  const auto two = run_tensor_protocol(as_resource(tfd), qubit(), 2,
                                       tensor_scheme(bell_measurement(2), 2));
  EXPECT_EQ(two.copies, 2);
  EXPECT_NEAR(two.per_copy_S(), one.avg_S, 1e-12);
  EXPECT_NEAR(two.total_probability(), 1.0, 1e-12);
}

TEST(Protocol, ReportJsonCarriesAverages) {
  const auto rep = run_protocol(tfd_state(qubit(), 1.0), product_measurement(2));
  const auto j = report_to_json(rep);
  EXPECT_DOUBLE_EQ(j.at("avg_E").get<double>(), rep.avg_E);
  EXPECT_EQ(j.at("outcomes").size(), 4u);
  EXPECT_EQ(j.at("metadata").at("resource"), "tfd");
}
