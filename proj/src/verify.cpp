#include "qmtherm/verify.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "qmtherm/random.hpp"
#include "qmtherm/thermo.hpp"

namespace qmtherm {

namespace {

constexpr double kNoGoMix = 0.05;
constexpr double kStrictPositiveMix = 0.1;
constexpr double kNonUnitalFloor = 1e-3;
constexpr double kClosureTol = 1e-9;
constexpr std::size_t kIdentityStates = 10;
constexpr std::size_t kClosurePanel = 50;

std::vector<ComplexMatrix> random_unitaries(std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<ComplexMatrix> us;
  for (std::size_t k = 0; k < count; ++k) us.push_back(random_unitary(dim, rng));
  return us;
}

Observable strictly_positive_povm(std::size_t dim, std::size_t outcomes, Rng& rng, const Tolerances& tol) {
  return mix_observable_with_identity(random_povm(dim, outcomes, rng), kStrictPositiveMix, tol);
}

std::vector<Check> nogo_trial(const SuiteParams& p, Rng& rng, const Tolerances& tol) {
  const Observable obs = random_povm(p.dim, p.outcomes, rng);
  const Instrument target = efficient_instrument(obs, random_unitaries(p.outcomes, p.dim, rng), tol);
  const MeasurementProcess pure = ozawa_dilation(target, tol);
  const MeasurementProcess proc = pure.with_xi(mix_with_identity(pure.xi(), kNoGoMix), tol);
  const Instrument induced = induced_instrument(proc, tol);
  const auto cls = classify_instrument(induced, tol);

  double min_rank = std::numeric_limits<double>::infinity();
  double single_kraus = 0.0;
  for (std::size_t x = 0; x < induced.size(); ++x) {
    if (cls.trivial_effect[x]) continue;
    min_rank = std::min(min_rank, static_cast<double>(kraus_rank(induced.operation(x), tol.rank)));
    if (cls.per_outcome[x].tag != PurityTag::NotPurityPreserving) single_kraus += 1.0;
  }
  return {lower_check("min_kraus_count", min_rank, 2.0),
          upper_check("purity_preserving_outcomes", single_kraus, 0.0),
          lower_check("xi_min_eigenvalue", min_eigenvalue(proc.xi().hermitian()), tol.strict)};
}

MeasurementProcess random_process(std::size_t kind, const SuiteParams& p, Rng& rng, const Tolerances& tol) {
  switch (kind % 3) {
    case 0: {
      const Instrument inst = random_instrument(p.dim, p.outcomes, 2, rng);
      const MeasurementProcess pure = ozawa_dilation(inst, tol);
      return pure.with_xi(random_full_rank_state(pure.app_dim(), rng, tol), tol);
    }
    case 1: {
      const Observable obs = strictly_positive_povm(p.dim, p.outcomes, rng, tol);
      return thermo_construction(obs, random_unitaries(p.outcomes, p.dim, rng),
                                 random_full_rank_state(p.outcomes, rng, tol), tol);
    }
    default: {
      const std::size_t da = p.outcomes;
      const QuantumOperation e = QuantumOperation::unitary(random_unitary(p.dim * da, rng), tol);
      const Instrument j = random_instrument(da, p.outcomes, 2, rng);
      return MeasurementProcess(p.dim, da, random_state(da, rng), e, j, tol);
    }
  }
}

std::vector<Check> lemma2_trial(const SuiteParams& p, std::size_t index, Rng& rng, const Tolerances& tol) {
  const MeasurementProcess proc = random_process(index, p, rng, tol);
  double worst = 0.0;
  for (const auto& rho : state_panel(p.dim, kIdentityStates, subseed(rng.bits(), 0))) {
    worst = std::max(worst, second_law_audit(proc, rho, tol).identity_residual);
  }
  return {upper_check("identity_residual", worst, kEntropyIdentityTol)};
}

std::vector<Check> lemma3_trial(const SuiteParams& p, Rng& rng, const Tolerances& tol) {
  const Observable obs = strictly_positive_povm(p.dim, p.outcomes, rng, tol);
  const MeasurementProcess proc = thermo_construction(obs, random_unitaries(p.outcomes, p.dim, rng),
                                                      random_full_rank_state(p.outcomes, rng, tol), tol);
  return {upper_check("factorization_residual",
                      pointer_factorization_residual(proc, induced_instrument(proc, tol)), kClosureTol)};
}

std::vector<Check> theorem2_trial(const SuiteParams& p, Rng& rng, const Tolerances& tol) {
  const Observable obs = strictly_positive_povm(p.dim, p.outcomes, rng, tol);
  const auto us = random_unitaries(p.outcomes, p.dim, rng);
  const State xi = random_full_rank_state(p.outcomes, rng, tol);
  const MeasurementProcess proc = thermo_construction(obs, us, xi, tol);
  std::vector<Check> checks;

  checks.push_back(upper_check("target_instrument_distance",
                               instrument_distance(induced_instrument(proc, tol),
                                                   efficient_instrument(obs, us, tol)),
                               kClosureTol));
  const auto third = third_law_audit(proc, tol);
  checks.push_back(lower_check("third_law_min_eigenvalue",
                               std::min(third.xi_min_eigenvalue, third.premeasurement_min_output_eigenvalue),
                               tol.strict));
  if (classify_observable(obs, tol).nontrivial) {
    const std::size_t n = proc.sys_dim() * proc.app_dim();
    checks.push_back(lower_check(
        "premeasurement_unital_residual",
        max_abs(qmtherm::apply(proc.premeasurement(), identity_matrix(n)) - identity_matrix(n)),
        kNonUnitalFloor));
  }
  const std::vector<ComplexMatrix> equal(p.outcomes, us.front());
  const auto composed = classify_channel(composed_channel(thermo_construction(obs, equal, xi, tol)), tol);
  checks.push_back(upper_check("equal_unitaries_bistochastic_residual",
                               std::max(composed.trace_residual, composed.unital_residual), kClosureTol));

  double worst_mi = -std::numeric_limits<double>::infinity();
  double worst_glo_app = -std::numeric_limits<double>::infinity();
  double worst_ds = std::numeric_limits<double>::infinity();
  for (const auto& rho : state_panel(p.dim, kClosurePanel, subseed(rng.bits(), 0))) {
    const ThermoReport r = second_law_audit(proc, rho, tol);
    for (double mi : r.per_outcome_mutual_info) worst_mi = std::max(worst_mi, mi);
    worst_glo_app = std::max(worst_glo_app, r.glo_apparatus);
    worst_ds = std::min(worst_ds, r.delta_S_total);
  }
  checks.push_back(upper_check("max_mutual_information", worst_mi, kClosureTol));
  checks.push_back(upper_check("max_apparatus_glo", worst_glo_app, kClosureTol));
  checks.push_back(lower_check("min_delta_S", worst_ds, -kSecondLawSlack));
  return checks;
}

ComplexMatrix random_contraction(std::size_t dim, Rng& rng) {
  const ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
  const double top = std::sqrt(max_eigenvalue(HermitianMatrix::symmetrized(g.adjoint() * g)));
  return g / (top * 1.01);
}

std::vector<Check> davies_trial(const SuiteParams& p, Rng& rng, const Tolerances& tol) {
  const std::size_t d = p.dim;
  double misclassified = 0.0;
  double worst_margin_single = 0.0;

  const QuantumOperation single(d, d, {random_contraction(d, rng)}, tol);
  const PurityClass a = purity_class(single, tol);
  if (a.tag != PurityTag::SingleKraus) misclassified += 1.0;
  worst_margin_single = std::max(worst_margin_single, a.margin);

  const Effect e = random_povm(d, 2, rng).effect(0);
  const ComplexVector phi = random_gaussian_vector(d, rng).normalized();
  const auto eig = hermitian_eig(e.hermitian());
  std::vector<ComplexMatrix> prep;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double w = std::max(eig.values(k), 0.0);
    prep.push_back(std::sqrt(w) * phi * eig.vectors.col(k).adjoint());
  }
  const PurityClass b = purity_class(QuantumOperation(d, d, std::move(prep), tol), tol);
  if (b.tag != PurityTag::PurePrepare) misclassified += 1.0;

  const Instrument mixture = random_instrument(d, 1, 2, rng);
  const PurityClass c = purity_class(mixture.operation(0), tol);
  if (c.tag != PurityTag::NotPurityPreserving) misclassified += 1.0;

  return {upper_check("misclassified", misclassified, 0.0),
          upper_check("single_kraus_margin", worst_margin_single, tol.rank),
          lower_check("mixture_margin", c.margin, tol.rank)};
}

}  // namespace

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::Nogo: return "nogo";
    case Suite::Lemma2Identity: return "lemma2_identity";
    case Suite::Lemma3: return "lemma3";
    case Suite::Theorem2: return "theorem2";
    case Suite::Davies: return "davies";
  }
  return "unknown";
}

std::optional<Suite> parse_suite(std::string_view name) {
  for (Suite s : {Suite::Nogo, Suite::Lemma2Identity, Suite::Lemma3, Suite::Theorem2, Suite::Davies}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

Check upper_check(std::string name, double value, double bound) {
  return {std::move(name), value, bound, true, value <= bound};
}

Check lower_check(std::string name, double value, double bound) {
  return {std::move(name), value, bound, false, value >= bound};
}

SuiteReport run_suite(const SuiteParams& params, const Tolerances& tol) {
  if (params.dim < 2 || params.dim > kMaxSuiteDim) {
    fail(ErrorKind::InvalidInput, "--dim must lie in [2, " + std::to_string(kMaxSuiteDim) + "]");
  }
  if (params.outcomes < 2 || params.outcomes > kMaxSuiteOutcomes) {
    fail(ErrorKind::InvalidInput, "--outcomes must lie in [2, " + std::to_string(kMaxSuiteOutcomes) + "]");
  }
  if (params.trials < 1 || params.trials > kMaxSuiteTrials) {
    fail(ErrorKind::InvalidInput, "--trials must lie in [1, " + std::to_string(kMaxSuiteTrials) + "]");
  }

  SuiteReport report;
  report.params = params;
  report.trials.resize(params.trials);
  const auto n = static_cast<std::int64_t>(params.trials);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < n; ++t) {
    const auto index = static_cast<std::size_t>(t);
    TrialResult& tr = report.trials[index];
    tr.index = index;
    tr.subseed = subseed(params.seed, index);
    Rng rng(tr.subseed);
    try {
      switch (params.suite) {
        case Suite::Nogo: tr.checks = nogo_trial(params, rng, tol); break;
        case Suite::Lemma2Identity: tr.checks = lemma2_trial(params, index, rng, tol); break;
        case Suite::Lemma3: tr.checks = lemma3_trial(params, rng, tol); break;
        case Suite::Theorem2: tr.checks = theorem2_trial(params, rng, tol); break;
        case Suite::Davies: tr.checks = davies_trial(params, rng, tol); break;
      }
      tr.pass = std::all_of(tr.checks.begin(), tr.checks.end(), [](const Check& c) { return c.pass; });
    } catch (const Error& e) {
      tr.error_kind = e.kind();
      tr.error = e.what();
    } catch (const std::exception& e) {
      tr.error_kind = ErrorKind::InternalInconsistency;
      tr.error = e.what();
    }
  }

  for (const auto& tr : report.trials) {
    if (!tr.pass) ++report.failed_trials;
    if (tr.error_kind == ErrorKind::InternalInconsistency) report.internal_inconsistency = true;
    for (const auto& c : tr.checks) {
      auto it = std::find_if(report.worst.begin(), report.worst.end(),
                             [&](const Check& w) { return w.name == c.name; });
      if (it == report.worst.end()) {
        report.worst.push_back(c);
      } else if (c.upper ? c.value > it->value : c.value < it->value) {
        *it = c;
      }
    }
  }
  report.pass = report.failed_trials == 0;
  return report;
}

}  // namespace qmtherm
