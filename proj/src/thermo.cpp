#include "qmtherm/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmtherm/error.hpp"
#include "qmtherm/random.hpp"

namespace qmtherm {

namespace {

double entropy_of_spectrum(const RealVector& values) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const double v = values(k);
    if (v > 0.0) s -= v * std::log(v);
  }
  return s;
}

double entropy_of(const ComplexMatrix& m) {
  return entropy_of_spectrum(hermitian_eig(HermitianMatrix::symmetrized(m)).values);
}

std::optional<double> glo_value(const Instrument& inst, const State& rho, const Tolerances& tol) {
  double average = 0.0;
  for (const auto& op : inst.operations()) {
    const ComplexMatrix out = qmtherm::apply(op, rho.matrix());
    const double p = trace(out).real();
    if (p <= tol.p_floor) continue;
    average += p * entropy_of(out / p);
  }
  return von_neumann_entropy(rho) - average;
}

}  // namespace

double shannon_entropy(const OutcomeDistribution& p) {
  double h = 0.0;
  for (double v : p.values()) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double von_neumann_entropy(const State& rho) {
  return entropy_of_spectrum(hermitian_eig(rho.hermitian()).values);
}

double relative_entropy(const State& rho, const HermitianMatrix& sigma, const Tolerances& tol) {
  if (rho.dim() != sigma.dim()) fail(ErrorKind::InvalidInput, "relative_entropy: dimension mismatch");
  const auto eig = hermitian_eig(sigma);
  double kernel_weight = 0.0;
  double cross = 0.0;  // tr ρ ln σ on the support of σ
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const ComplexVector v = eig.vectors.col(k);
    const double weight = (v.adjoint() * rho.matrix() * v)(0, 0).real();
    if (eig.values(k) <= tol.psd) {
      kernel_weight += weight;
    } else {
      cross += weight * std::log(eig.values(k));
    }
  }
  if (kernel_weight > tol.rank) return std::numeric_limits<double>::infinity();
  return -von_neumann_entropy(rho) - cross;
}

double glo_info_gain(const PosteriorBundle& bundle, Subsystem side) {
  const bool system = side == Subsystem::First;
  double average = 0.0;
  for (const auto& o : bundle.outcomes) {
    if (o.degenerate) continue;
    average += o.probability * von_neumann_entropy(system ? o.system : o.apparatus);
  }
  return von_neumann_entropy(system ? bundle.prior : bundle.xi) - average;
}

double glo_info_gain(const Instrument& inst, const State& rho, const Tolerances& tol) {
  if (inst.in_dim() != rho.dim()) fail(ErrorKind::InvalidInput, "glo_info_gain: dimension mismatch");
  return *glo_value(inst, rho, tol);
}

double mutual_information(const State& joint, Dims dims, const Tolerances& tol) {
  if (joint.dim() != dims.total()) fail(ErrorKind::InvalidInput, "mutual_information: dimension mismatch");
  const State a = State::from_matrix(partial_trace(joint.matrix(), dims, Subsystem::First), tol);
  const State b = State::from_matrix(partial_trace(joint.matrix(), dims, Subsystem::Second), tol);
  const double entropic =
      von_neumann_entropy(a) + von_neumann_entropy(b) - von_neumann_entropy(joint);
  const double divergence =
      relative_entropy(joint, HermitianMatrix::symmetrized(kron(a.matrix(), b.matrix())), tol);
  if (std::isfinite(divergence) && std::abs(entropic - divergence) > kEntropyIdentityTol) {
    fail(ErrorKind::InternalInconsistency,
         "mutual information formulas disagree: " + std::to_string(entropic) + " vs " +
             std::to_string(divergence));
  }
  return entropic;
}

ThermoReport second_law_audit(const MeasurementProcess& proc, const State& rho,
                              const Tolerances& tol, std::optional<double> beta) {
  const PosteriorBundle bundle = posterior_bundle(proc, rho, tol);
  ThermoReport r;
  r.labels = bundle.labels;
  for (const auto& o : bundle.outcomes) {
    r.probabilities.push_back(o.probability);
    r.degenerate.push_back(o.degenerate);
  }
  r.prior_entropy = von_neumann_entropy(rho);
  r.xi_entropy = von_neumann_entropy(proc.xi());
  r.shannon = shannon_entropy(bundle.distribution());
  r.glo_system = glo_info_gain(bundle, Subsystem::First);
  r.glo_apparatus = glo_info_gain(bundle, Subsystem::Second);
  for (const auto& o : bundle.outcomes) {
    const double mi = o.degenerate ? 0.0 : mutual_information(o.joint, bundle.dims, tol);
    r.per_outcome_mutual_info.push_back(mi);
    r.avg_mutual_info += o.probability * mi;
  }
  r.eq5_lhs = r.shannon;
  r.eq5_rhs = r.glo_system + r.glo_apparatus + r.avg_mutual_info;

  // S(σ_SAK): the register state is block diagonal with blocks p(x)σ_SA^x.
  double register_entropy = 0.0;
  for (const auto& o : bundle.outcomes) {
    if (o.degenerate) continue;
    register_entropy += entropy_of(o.probability * o.joint.matrix());
  }
  const double initial = entropy_of(kron(rho.matrix(), proc.xi().matrix()));
  r.delta_S_total = register_entropy - initial;
  r.identity_residual = std::abs(r.delta_S_total - (r.eq5_lhs - r.eq5_rhs));
  if (!(r.identity_residual <= kEntropyIdentityTol)) {
    fail(ErrorKind::InternalInconsistency,
         "entropy identity broken: dS = " + std::to_string(r.delta_S_total) + ", H - rhs = " +
             std::to_string(r.eq5_lhs - r.eq5_rhs));
  }
  r.second_law_pass = r.delta_S_total >= -kSecondLawSlack;
  if (beta) {
    r.beta = *beta;
    r.net_cycle_work = net_cycle_work(r.delta_S_total, *beta);
  }
  return r;
}

ThirdLawReport third_law_audit(const MeasurementProcess& proc, const Tolerances& tol) {
  ThirdLawReport r;
  r.xi_min_eigenvalue = min_eigenvalue(proc.xi().hermitian());
  const auto c = classify_channel(proc.premeasurement(), tol);
  r.premeasurement_strictly_positive = c.strictly_positive;
  r.premeasurement_min_output_eigenvalue = c.min_output_eigenvalue;
  r.compatible = r.xi_min_eigenvalue > tol.strict && c.strictly_positive;
  return r;
}

EnergyAccount energy_accounting(const State& rho, const HermitianMatrix& h, double beta) {
  if (!(beta > 0.0)) fail(ErrorKind::InvalidInput, "beta must be positive");
  if (h.dim() != rho.dim()) fail(ErrorKind::InvalidInput, "Hamiltonian dimension mismatch");
  EnergyAccount e;
  e.internal_energy = (h.matrix() * rho.matrix()).trace().real();
  e.free_energy = e.internal_energy - von_neumann_entropy(rho) / beta;
  return e;
}

double net_cycle_work(double delta_s, double beta) {
  if (!(beta > 0.0)) fail(ErrorKind::InvalidInput, "beta must be positive");
  return -delta_s / beta;
}

double holevo_chi(const OutcomeDistribution& weights, const std::vector<State>& states) {
  if (weights.size() != states.size() || states.empty()) {
    fail(ErrorKind::InvalidInput, "holevo_chi: weights and states differ in length");
  }
  const std::size_t d = states.front().dim();
  ComplexMatrix average = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  double mean_entropy = 0.0;
  for (std::size_t x = 0; x < states.size(); ++x) {
    if (states[x].dim() != d) fail(ErrorKind::InvalidInput, "holevo_chi: states differ in dimension");
    average += weights[x] * states[x].matrix();
    mean_entropy += weights[x] * von_neumann_entropy(states[x]);
  }
  return entropy_of(average) - mean_entropy;
}

std::vector<State> state_panel(std::size_t dim, std::size_t count, std::uint64_t seed) {
  std::vector<State> panel;
  panel.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(subseed(seed, k));
    switch (k % 3) {
      case 0: panel.push_back(random_state(dim, rng)); break;
      case 1: panel.push_back(random_pure_state(dim, rng)); break;
      default: panel.push_back(random_full_rank_state(dim, rng)); break;
    }
  }
  return panel;
}

GloSearchResult search_negative_glo(const Instrument& inst, std::size_t trials, std::uint64_t seed,
                                    const Tolerances& tol) {
  if (trials < 1) fail(ErrorKind::InvalidInput, "search_negative_glo needs at least one trial");
  const std::size_t d = inst.in_dim();
  auto state_for = [&](std::size_t t) {
    if (t == 0) return State::maximally_mixed(d);
    Rng rng(subseed(seed, t));
    return t % 2 == 1 ? random_pure_state(d, rng) : random_full_rank_state(d, rng, tol);
  };

  std::vector<double> values(trials, std::numeric_limits<double>::infinity());
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(static) if (trials >= 64)
  for (std::int64_t t = 0; t < n; ++t) {
    try {
      values[static_cast<std::size_t>(t)] = *glo_value(inst, state_for(static_cast<std::size_t>(t)), tol);
    } catch (...) {
      // Left at +inf; never selected unless every trial failed.
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  if (!std::isfinite(values[best])) {
    fail(ErrorKind::InternalInconsistency, "search_negative_glo: every trial failed");
  }
  return {state_for(best), values[best], best, trials};
}

std::string_view to_string(SecondLawEvidence e) {
  switch (e) {
    case SecondLawEvidence::Certificate: return "certificate";
    case SecondLawEvidence::Panel: return "panel";
    case SecondLawEvidence::Violated: return "violated";
  }
  return "unknown";
}

TrilemmaVerdict trilemma_classify(const MeasurementProcess& proc, const Tolerances& tol,
                                  std::size_t panel_size, std::uint64_t panel_seed) {
  TrilemmaVerdict v;
  const Instrument induced = induced_instrument(proc, tol);
  v.vacuous = !classify_observable(induced_observable(induced, tol), tol).nontrivial;

  v.third_law = third_law_audit(proc, tol).compatible;
  v.composed_bistochastic = classify_channel(composed_channel(proc), tol).bistochastic;
  if (v.composed_bistochastic) {
    v.second_law = SecondLawEvidence::Certificate;
  } else {
    v.panel_size = panel_size;
    v.panel_worst_delta_s = std::numeric_limits<double>::infinity();
    for (const auto& rho : state_panel(proc.sys_dim(), panel_size, panel_seed)) {
      v.panel_worst_delta_s =
          std::min(v.panel_worst_delta_s, second_law_audit(proc, rho, tol).delta_S_total);
    }
    v.second_law = v.panel_worst_delta_s >= -kSecondLawSlack ? SecondLawEvidence::Panel
                                                               : SecondLawEvidence::Violated;
  }
  v.law_compatible = v.third_law && v.second_law != SecondLawEvidence::Violated;

  v.premeasurement_autonomous_ok = classify_channel(proc.premeasurement(), tol).bistochastic;
  v.arm_ii_reading = "premeasurement channel E is bistochastic";

  v.quasicomplete = classify_instrument(induced, tol).quasicomplete;

  if (!v.law_compatible) v.failed_arms.emplace_back("i");
  if (!v.premeasurement_autonomous_ok) v.failed_arms.emplace_back("ii");
  if (!v.quasicomplete) v.failed_arms.emplace_back("iii");
  if (v.failed_arms.empty() && !v.vacuous) {
    fail(ErrorKind::InternalInconsistency,
         "all three trilemma arms hold for a nontrivial induced observable");
  }
  return v;
}

}  // namespace qmtherm
