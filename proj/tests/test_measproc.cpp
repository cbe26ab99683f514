#include <gtest/gtest.h>

#include <functional>

#include "qmtherm/error.hpp"
#include "qmtherm/measproc.hpp"
#include "qmtherm/random.hpp"
#include "qmtherm/thermo.hpp"
#include "support.hpp"

namespace qmtherm {
namespace {

using testing::diag2;
using testing::fixture_observable;
using testing::max_entry;
using testing::ref_apply;
using testing::ref_kron;
using testing::ref_partial_trace;
using testing::z_projectors;

ErrorKind error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected qmtherm::Error";
  return ErrorKind::InternalInconsistency;
}

/// Unnormalized (id ⊗ J_x)(E(ρ ⊗ ξ)) computed from the raw Kraus families.
ComplexMatrix ref_outcome_block(const MeasurementProcess& proc, std::size_t x, const ComplexMatrix& rho) {
  const ComplexMatrix joint = ref_apply(proc.premeasurement().kraus(), ref_kron(rho, proc.xi().matrix()));
  const ComplexMatrix id = identity_matrix(proc.sys_dim());
  std::vector<ComplexMatrix> lifted;
  for (const auto& k : proc.objectification().operation(x).kraus()) lifted.push_back(ref_kron(id, k));
  return ref_apply(lifted, joint);
}

/// max over outcomes and matrix-unit inputs of the distance between the
/// induced instrument and the oracle I_x(ρ) = tr_A[block].
double ref_induced_distance(const MeasurementProcess& proc, const Instrument& induced) {
  double worst = 0.0;
  const std::size_t d = proc.sys_dim();
  for (std::size_t x = 0; x < induced.size(); ++x) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const ComplexMatrix e = matrix_unit(d, i, j);
        const ComplexMatrix expected = ref_partial_trace(ref_outcome_block(proc, x, e), d, proc.app_dim(), true);
        worst = std::max(worst, max_entry(ref_apply(induced.operation(x).kraus(), e) - expected));
      }
    }
  }
  return worst;
}

MeasurementProcess trivial_process(const State& xi) {
  return MeasurementProcess(2, 2, xi, QuantumOperation::identity(4), luders_instrument(z_projectors()));
}

MeasurementProcess fixture_thermo(std::vector<ComplexMatrix> us = {identity_matrix(2), identity_matrix(2)}) {
  return thermo_construction(fixture_observable(), us, State::maximally_mixed(2));
}

TEST(MeasurementProcess, Invariants) {
  const State xi = State::maximally_mixed(2);
  const Instrument z = luders_instrument(z_projectors());
  EXPECT_EQ(error_kind([&] { MeasurementProcess(2, 3, xi, QuantumOperation::identity(6), z); }),
            ErrorKind::MalformedProcess);
  EXPECT_EQ(error_kind([&] { MeasurementProcess(2, 2, xi, QuantumOperation::identity(6), z); }),
            ErrorKind::MalformedProcess);
  EXPECT_EQ(error_kind([&] { MeasurementProcess(2, 2, xi, QuantumOperation(4, 4, {kron(diag2(1, 0), identity_matrix(2))}), z); }),
            ErrorKind::MalformedProcess);
  const MeasurementProcess p = trivial_process(xi);
  EXPECT_LE(max_entry(p.pointer().effect(1).matrix() - diag2(0, 1)), 1e-12);
  EXPECT_TRUE(p.decomposable);
}

TEST(RestrictionMap, ProductFactorizationAndUnitality) {
  Rng rng(16);
  const ComplexMatrix a = random_gaussian_matrix(2, 2, rng);
  const ComplexMatrix b = random_gaussian_matrix(3, 3, rng);
  const State xi = random_state(3, rng);
  const ComplexMatrix g = restriction_map(kron(a, b), xi, {2, 3}, Subsystem::Second);
  EXPECT_LE(max_entry(g - (b * xi.matrix()).trace() * a), 1e-12);
  EXPECT_LE(max_entry(restriction_map(identity_matrix(6), xi, {2, 3}, Subsystem::Second) - identity_matrix(2)), 1e-12);
  const State rho = random_state(2, rng);
  EXPECT_LE(max_entry(restriction_map(kron(a, b), rho, {2, 3}, Subsystem::First) - (a * rho.matrix()).trace() * b),
            1e-12);
  EXPECT_EQ(error_kind([&] { restriction_map(identity_matrix(5), xi, {2, 3}, Subsystem::Second); }),
            ErrorKind::InvalidInput);
  EXPECT_EQ(error_kind([&] { restriction_map(identity_matrix(6), rho, {2, 3}, Subsystem::Second); }),
            ErrorKind::InvalidInput);
}

TEST(RestrictionMap, DualityOnSeededInputs) {
  Rng rng(17);
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix m = random_gaussian_matrix(6, 6, rng);
    const State rho = random_state(2, rng);
    const State xi = random_state(3, rng);
    const Complex lhs = (restriction_map(m, xi, {2, 3}, Subsystem::Second) * rho.matrix()).trace();
    const Complex rhs = (m * ref_kron(rho.matrix(), xi.matrix())).trace();
    EXPECT_LE(std::abs(lhs - rhs), 1e-10);
  }
}

TEST(InducedInstrument, OzawaDilationOfLudersFixture) {
  const Instrument lud = luders_instrument(fixture_observable());
  const MeasurementProcess proc = ozawa_dilation(lud);
  EXPECT_EQ(proc.app_dim(), 2u);
  const Instrument back = induced_instrument(proc);
  EXPECT_LE(instrument_distance(back, lud), 1e-9);
  EXPECT_LE(ref_induced_distance(proc, back), 1e-10);
  EXPECT_EQ(back.labels(), lud.labels());
}

TEST(InducedInstrument, ThermoConstructionRecoversLuders) {
  const MeasurementProcess proc = fixture_thermo();
  const Instrument back = induced_instrument(proc);
  EXPECT_LE(instrument_distance(back, luders_instrument(fixture_observable())), 1e-9);
  EXPECT_LE(ref_induced_distance(proc, back), 1e-10);
}

TEST(InducedInstrument, TrivialPremeasurementScalesIdentity) {
  Rng rng(4);
  const State xi = random_state(2, rng);
  const Instrument back = induced_instrument(trivial_process(xi));
  for (std::size_t x = 0; x < 2; ++x) {
    const double weight = xi.matrix()(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)).real();
    const QuantumOperation expected(2, 2, {std::sqrt(weight) * identity_matrix(2)});
    EXPECT_LE(choi_distance(back.operation(x), expected), 1e-9);
  }
}

TEST(InducedInstrument, DilationRoundTripOnSeededInstruments) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t d = 2 + seed % 2;
    const std::size_t n = 2 + (seed / 2) % 2;
    const Instrument inst = random_instrument(d, n, 1 + seed % 2, rng);
    const MeasurementProcess proc = ozawa_dilation(inst);
    const Instrument back = induced_instrument(proc);
    EXPECT_LE(instrument_distance(back, inst), 1e-9) << "seed " << seed;
    EXPECT_LE(ref_induced_distance(proc, back), 1e-9) << "seed " << seed;
  }
}

TEST(InducedInstrument, ObjectificationWithSamePointerGivesSameInstrument) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Instrument inst = random_instrument(2, 2, 2, rng);
    MeasurementProcess proc = ozawa_dilation(inst).with_xi(mix_with_identity(State::pure(testing::unit(4, 0)), 0.05));
    const Instrument before = induced_instrument(proc);
    // Same pointer Z, different instrument: Z_x then a random unitary.
    std::vector<ComplexMatrix> us;
    for (std::size_t x = 0; x < proc.pointer().size(); ++x) us.push_back(random_unitary(proc.app_dim(), rng));
    const Instrument other = efficient_instrument(proc.pointer(), us);
    const Instrument after = induced_instrument(proc.with_objectification(other));
    EXPECT_LE(instrument_distance(before, after), 1e-9);
  }
}

TEST(OzawaDilation, UnitaryChannelIsDegenerate) {
  Rng rng(8);
  const ComplexMatrix u = random_unitary(3, rng);
  const Instrument single({"only"}, {QuantumOperation::unitary(u)});
  const MeasurementProcess proc = ozawa_dilation(single);
  EXPECT_EQ(proc.app_dim(), 1u);
  EXPECT_LE(choi_distance(proc.premeasurement(), QuantumOperation::unitary(u)), 1e-9);
}

TEST(OzawaDilation, UnitaryPremeasurementAndPureXi) {
  const MeasurementProcess proc = ozawa_dilation(luders_instrument(fixture_observable()));
  ASSERT_EQ(proc.premeasurement().kraus().size(), 1u);
  EXPECT_LE(unitarity_residual(proc.premeasurement().kraus()[0]), 1e-10);
  EXPECT_TRUE(classify_channel(proc.premeasurement()).bistochastic);
  EXPECT_FALSE(third_law_audit(proc).compatible);
  EXPECT_NEAR(third_law_audit(proc).xi_min_eigenvalue, 0.0, 1e-12);
  EXPECT_TRUE(proc.metadata.count("unitary_completion"));
  EXPECT_TRUE(classify_observable(proc.pointer()).projective);
}

TEST(OzawaDilation, LeftoverPointerVectorsGoToFirstOutcome) {
  // Three Kraus operators across two outcomes in d = 2: app_dim 3.
  Rng rng(12);
  const Instrument inst = random_instrument(2, 3, 1, rng);
  const MeasurementProcess proc = ozawa_dilation(inst);
  EXPECT_EQ(proc.app_dim(), 3u);
  double total = 0.0;
  for (const auto& e : proc.pointer().effects()) total += trace(e.matrix()).real();
  EXPECT_NEAR(total, 3.0, 1e-12);
  EXPECT_TRUE(proc.metadata.count("leftover_pointer_vectors"));
}

TEST(PointerFactorization, ThermoConstructionPointerFactorizes) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const std::size_t d = 2 + seed % 2;
    const std::size_t n = 2 + (seed / 2) % 2;
    const Observable obs = mix_observable_with_identity(random_povm(d, n, rng), 0.1);
    std::vector<ComplexMatrix> us;
    for (std::size_t x = 0; x < n; ++x) us.push_back(random_unitary(d, rng));
    const MeasurementProcess proc = thermo_construction(obs, us, random_full_rank_state(n, rng));
    EXPECT_LE(pointer_factorization_residual(proc, induced_instrument(proc)), 1e-9) << "seed " << seed;
  }
}

TEST(PointerFactorization, OzawaDilationDoesNotFactorize) {
  const MeasurementProcess proc = ozawa_dilation(luders_instrument(fixture_observable()));
  EXPECT_GT(pointer_factorization_residual(proc, induced_instrument(proc)), 1e-3);
}

TEST(NoGoWitness, SmoothedXiForcesTwoKrausOperators) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const std::size_t d = 2 + seed % 2;
    const Observable obs = random_povm(d, 2, rng);
    std::vector<ComplexMatrix> us;
    for (std::size_t x = 0; x < obs.size(); ++x) us.push_back(random_unitary(d, rng));
    const MeasurementProcess dil = ozawa_dilation(efficient_instrument(obs, us));
    const MeasurementProcess smooth = dil.with_xi(mix_with_identity(dil.xi(), 0.05));
    const Instrument induced = induced_instrument(smooth);
    const auto c = classify_instrument(induced);
    EXPECT_FALSE(c.quasicomplete);
    for (std::size_t x = 0; x < induced.size(); ++x) {
      if (c.trivial_effect[x]) continue;
      EXPECT_GE(classify_channel(induced.operation(x)).min_kraus_count, 2u) << "seed " << seed << " x " << x;
    }
  }
}

TEST(PosteriorBundle, OzawaFixtureOnMaximallyMixed) {
  const MeasurementProcess proc = ozawa_dilation(luders_instrument(fixture_observable()));
  const PosteriorBundle b = posterior_bundle(proc, State::maximally_mixed(2));
  EXPECT_NEAR(b.outcomes[0].probability, 0.5, 1e-12);
  EXPECT_NEAR(b.outcomes[1].probability, 0.5, 1e-12);
}

TEST(PosteriorBundle, ThermoPosteriorsAreProducts) {
  Rng rng(5);
  const MeasurementProcess proc = fixture_thermo({random_unitary(2, rng), random_unitary(2, rng)});
  const State rho = random_state(2, rng);
  const PosteriorBundle b = posterior_bundle(proc, rho);
  for (const auto& o : b.outcomes) {
    EXPECT_LE(max_entry(o.joint.matrix() - ref_kron(o.system.matrix(), identity_matrix(2) / 2.0)), 1e-10);
  }
}

TEST(PosteriorBundle, MarginalsAndProbabilitiesAreConsistent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Instrument inst = random_instrument(2, 3, 2, rng);
    const MeasurementProcess proc = ozawa_dilation(inst).with_xi(random_full_rank_state(6, rng));
    const State rho = random_state(2, rng);
    const PosteriorBundle b = posterior_bundle(proc, rho);
    const OutcomeDistribution born = born_probability(induced_observable(induced_instrument(proc)), rho);
    double total = 0.0;
    for (std::size_t x = 0; x < b.outcomes.size(); ++x) {
      const auto& o = b.outcomes[x];
      EXPECT_NEAR(o.probability, born[x], 1e-10);
      const ComplexMatrix block = ref_outcome_block(proc, x, rho.matrix());
      EXPECT_NEAR(o.probability, block.trace().real(), 1e-10);
      total += o.probability;
      if (o.degenerate) continue;
      EXPECT_LE(max_entry(o.joint.matrix() - block / o.probability), 1e-9);
      EXPECT_LE(max_entry(o.system.matrix() - ref_partial_trace(o.joint.matrix(), 2, 6, true)), 1e-10);
      EXPECT_LE(max_entry(o.apparatus.matrix() - ref_partial_trace(o.joint.matrix(), 2, 6, false)), 1e-10);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(PosteriorBundle, ZeroProbabilityOutcomesAreDegenerate) {
  const MeasurementProcess proc = ozawa_dilation(luders_instrument(z_projectors()));
  const PosteriorBundle b = posterior_bundle(proc, State::pure(testing::unit(2, 0)));
  EXPECT_FALSE(b.outcomes[0].degenerate);
  EXPECT_TRUE(b.outcomes[1].degenerate);
  EXPECT_LE(max_entry(b.outcomes[1].joint.matrix() - identity_matrix(4) / 4.0), 1e-15);
}

TEST(EffectiveApparatusInstrument, ThermoIsTraceAndPrepare) {
  const MeasurementProcess proc = fixture_thermo();
  const State rho = State::pure(testing::unit(2, 0));
  const Instrument phi = effective_apparatus_instrument(proc, rho);
  const double p[2] = {0.7, 0.3};
  Rng rng(9);
  const ComplexMatrix m = random_gaussian_matrix(2, 2, rng);
  for (std::size_t x = 0; x < 2; ++x) {
    EXPECT_LE(max_entry(qmtherm::apply(phi.operation(x), m) - p[x] * m.trace() * identity_matrix(2) / 2.0), 1e-10);
  }
}

TEST(EffectiveApparatusInstrument, TrivialPremeasurementIsObjectification) {
  Rng rng(10);
  const MeasurementProcess proc = trivial_process(random_full_rank_state(2, rng));
  const Instrument phi = effective_apparatus_instrument(proc, random_state(2, rng));
  EXPECT_LE(instrument_distance(phi, proc.objectification()), 1e-9);
}

TEST(EffectiveApparatusInstrument, MarginalsMatchPosteriors) {
  Rng rng(19);
  const MeasurementProcess proc = ozawa_dilation(random_instrument(2, 2, 2, rng)).with_xi(random_full_rank_state(4, rng));
  const State rho = random_state(2, rng);
  const Instrument phi = effective_apparatus_instrument(proc, rho);
  EXPECT_TRUE(classify_channel(total_channel(phi)).trace_preserving);
  const PosteriorBundle b = posterior_bundle(proc, rho);
  for (std::size_t x = 0; x < phi.size(); ++x) {
    const ComplexMatrix out = qmtherm::apply(phi.operation(x), proc.xi().matrix());
    EXPECT_LE(max_entry(out / b.outcomes[x].probability - b.outcomes[x].apparatus.matrix()), 1e-9);
  }
}

TEST(ApparatusObservableG, TrivialPremeasurementIsPointer) {
  Rng rng(20);
  const MeasurementProcess proc = trivial_process(random_full_rank_state(2, rng));
  const Observable g = apparatus_observable_G(proc, random_state(2, rng));
  EXPECT_LE(max_entry(g.effect(0).matrix() - diag2(1, 0)), 1e-12);
  EXPECT_LE(max_entry(g.effect(1).matrix() - diag2(0, 1)), 1e-12);
}

TEST(ApparatusObservableG, ThermoFixtureProbabilities) {
  const MeasurementProcess proc = fixture_thermo();
  const Observable g = apparatus_observable_G(proc, State::pure(testing::unit(2, 0)));
  EXPECT_NEAR((g.effect(0).matrix() * proc.xi().matrix()).trace().real(), 0.7, 1e-9);
  EXPECT_NEAR((g.effect(1).matrix() * proc.xi().matrix()).trace().real(), 0.3, 1e-9);
}

TEST(ApparatusObservableG, NormalizedAndReproducesProbabilities) {
  Rng rng(21);
  const MeasurementProcess proc = ozawa_dilation(random_instrument(2, 3, 1, rng)).with_xi(random_full_rank_state(3, rng));
  const State rho = random_state(2, rng);
  const Observable g = apparatus_observable_G(proc, rho);
  ComplexMatrix total = ComplexMatrix::Zero(3, 3);
  const PosteriorBundle b = posterior_bundle(proc, rho);
  for (std::size_t x = 0; x < g.size(); ++x) {
    total += g.effect(x).matrix();
    EXPECT_NEAR((g.effect(x).matrix() * proc.xi().matrix()).trace().real(), b.outcomes[x].probability, 1e-9);
  }
  EXPECT_LE(max_entry(total - identity_matrix(3)), 1e-9);
}

TEST(ThermoConstruction, PremeasurementIsStrictlyPositiveButNotUnital) {
  const MeasurementProcess proc = fixture_thermo();
  const auto c = classify_channel(proc.premeasurement());
  EXPECT_TRUE(c.trace_preserving);
  EXPECT_TRUE(c.strictly_positive);
  EXPECT_FALSE(c.bistochastic);
  // E(𝟙⊗𝟙) = N Σ_x U_x E_x U_x† ⊗ |x⟩⟨x|.
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  const Observable obs = fixture_observable();
  for (std::size_t x = 0; x < 2; ++x) expected += 2.0 * ref_kron(obs.effect(x).matrix(), matrix_unit(2, x, x));
  EXPECT_LE(max_entry(ref_apply(proc.premeasurement().kraus(), identity_matrix(4)) - expected), 1e-12);
}

TEST(ThermoConstruction, EqualUnitariesGiveBistochasticComposite) {
  Rng rng(22);
  const ComplexMatrix u = random_unitary(2, rng);
  EXPECT_TRUE(classify_channel(composed_channel(fixture_thermo({u, u}))).bistochastic);
}

TEST(ThermoConstruction, MutualInformationVanishes) {
  const MeasurementProcess proc = fixture_thermo();
  for (const State& rho : state_panel(2, 10, 1)) {
    const PosteriorBundle b = posterior_bundle(proc, rho);
    for (const auto& o : b.outcomes) {
      if (!o.degenerate) EXPECT_LE(mutual_information(o.joint, proc.dims()), 1e-9);
    }
  }
}

TEST(ThermoConstruction, RejectsNonStrictlyPositiveInputs) {
  EXPECT_EQ(error_kind([] {
              thermo_construction(z_projectors(), {identity_matrix(2), identity_matrix(2)}, State::maximally_mixed(2));
            }),
            ErrorKind::ThirdLawObstruction);
  EXPECT_EQ(error_kind([] {
              thermo_construction(fixture_observable(), {identity_matrix(2), identity_matrix(2)},
                                  State::pure(testing::unit(2, 0)));
            }),
            ErrorKind::ThirdLawObstruction);
  EXPECT_EQ(error_kind([] {
              thermo_construction(fixture_observable(), {identity_matrix(2)}, State::maximally_mixed(2));
            }),
            ErrorKind::InvalidInput);
  EXPECT_EQ(error_kind([] {
              thermo_construction(fixture_observable(), {identity_matrix(2), identity_matrix(2)},
                                  State::maximally_mixed(3));
            }),
            ErrorKind::InvalidInput);
}

TEST(ThermoConstruction, ReproducesEfficientInstrumentOnSeededInputs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    const std::size_t d = 2 + seed % 2;
    const std::size_t n = 2 + (seed / 2) % 2;
    const Observable obs = mix_observable_with_identity(random_povm(d, n, rng), 0.1);
    std::vector<ComplexMatrix> us;
    for (std::size_t x = 0; x < n; ++x) us.push_back(random_unitary(d, rng));
    const MeasurementProcess proc = thermo_construction(obs, us, random_full_rank_state(n, rng));
    const Instrument back = induced_instrument(proc);
    EXPECT_LE(instrument_distance(back, efficient_instrument(obs, us)), 1e-9);
    EXPECT_LE(ref_induced_distance(proc, back), 1e-9);
    EXPECT_TRUE(third_law_audit(proc).compatible);
  }
}

}  // namespace
}  // namespace qmtherm
