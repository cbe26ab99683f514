#include "qmtherm/measproc.hpp"

#include <algorithm>
#include <cmath>

#include "qmtherm/error.hpp"

namespace qmtherm {

namespace {

// Unitary completion residual allowed before the dilation is declared broken.
constexpr double kDilationUnitarity = 1e-10;

std::vector<QuantumOperation> lift_objectification(std::size_t sys_dim, const Instrument& j) {
  std::vector<QuantumOperation> lifted;
  lifted.reserve(j.size());
  const auto id = QuantumOperation::identity(sys_dim);
  for (const auto& op : j.operations()) lifted.push_back(tensor(id, op));
  return lifted;
}

Observable pointer_of(const Instrument& j, const Tolerances& tol) {
  try {
    return induced_observable(j, tol);
  } catch (const Error& e) {
    fail(ErrorKind::MalformedProcess, std::string("objectification instrument: ") + e.what());
  }
}

}  // namespace

MeasurementProcess::MeasurementProcess(std::size_t sys_dim, std::size_t app_dim, State xi,
                                       QuantumOperation premeasurement, Instrument objectification,
                                       const Tolerances& tol)
    : sys_dim_(sys_dim),
      app_dim_(app_dim),
      xi_(std::move(xi)),
      premeasurement_(std::move(premeasurement)),
      objectification_(std::move(objectification)),
      pointer_(pointer_of(objectification_, tol)) {
  if (sys_dim_ < 1 || app_dim_ < 1) fail(ErrorKind::MalformedProcess, "dimensions must be >= 1");
  if (xi_.dim() != app_dim_) {
    fail(ErrorKind::MalformedProcess, "apparatus state has dim " + std::to_string(xi_.dim()) +
                                          ", expected " + std::to_string(app_dim_));
  }
  const std::size_t joint = sys_dim_ * app_dim_;
  if (premeasurement_.in_dim() != joint || premeasurement_.out_dim() != joint) {
    fail(ErrorKind::MalformedProcess, "premeasurement must act on the joint space of dim " +
                                          std::to_string(joint));
  }
  const double tp = max_abs(dual_apply(premeasurement_, identity_matrix(joint)) - identity_matrix(joint));
  if (tp > tol.equality) {
    fail(ErrorKind::MalformedProcess,
         "premeasurement is not trace preserving (residual " + std::to_string(tp) + ")");
  }
  if (objectification_.in_dim() != app_dim_ || objectification_.out_dim() != app_dim_) {
    fail(ErrorKind::MalformedProcess, "objectification must act in the apparatus space");
  }
  lifted_ = lift_objectification(sys_dim_, objectification_);
}

MeasurementProcess MeasurementProcess::with_xi(State xi, const Tolerances& tol) const {
  MeasurementProcess p(sys_dim_, app_dim_, std::move(xi), premeasurement_, objectification_, tol);
  p.metadata = metadata;
  p.decomposable = decomposable;
  return p;
}

MeasurementProcess MeasurementProcess::with_objectification(Instrument objectification,
                                                            const Tolerances& tol) const {
  MeasurementProcess p(sys_dim_, app_dim_, xi_, premeasurement_, std::move(objectification), tol);
  p.metadata = metadata;
  p.decomposable = decomposable;
  return p;
}

ComplexMatrix restriction_map(const ComplexMatrix& joint, const State& anchor, Dims dims,
                              Subsystem traced) {
  const std::size_t expected = traced == Subsystem::Second ? dims.second : dims.first;
  if (anchor.dim() != expected) {
    fail(ErrorKind::InvalidInput, "restriction_map: anchor dim " + std::to_string(anchor.dim()) +
                                      " does not match traced factor " + std::to_string(expected));
  }
  if (static_cast<std::size_t>(joint.rows()) != dims.total() || joint.rows() != joint.cols()) {
    fail(ErrorKind::InvalidInput, "restriction_map: joint operator has wrong dimension");
  }
  if (traced == Subsystem::Second) {
    const ComplexMatrix weight = kron(identity_matrix(dims.first), anchor.matrix());
    return partial_trace(joint * weight, dims, Subsystem::First);
  }
  const ComplexMatrix weight = kron(anchor.matrix(), identity_matrix(dims.second));
  return partial_trace(joint * weight, dims, Subsystem::Second);
}

Instrument induced_instrument(const MeasurementProcess& proc, const Tolerances& tol) {
  const std::size_t d = proc.sys_dim();
  const std::size_t n = proc.objectification().size();
  const Dims dims = proc.dims();
  const auto bd = static_cast<Eigen::Index>(d);

  std::vector<ComplexMatrix> chois(n, ComplexMatrix::Zero(bd * bd, bd * bd));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const ComplexMatrix joint =
          qmtherm::apply(proc.premeasurement(), kron(matrix_unit(d, i, j), proc.xi().matrix()));
      for (std::size_t x = 0; x < n; ++x) {
        const ComplexMatrix out =
            partial_trace(qmtherm::apply(proc.lifted_objectification()[x], joint), dims, Subsystem::First);
        chois[x].block(static_cast<Eigen::Index>(i) * bd, static_cast<Eigen::Index>(j) * bd, bd, bd) = out;
      }
    }
  }

  std::vector<QuantumOperation> ops;
  ops.reserve(n);
  try {
    for (std::size_t x = 0; x < n; ++x) {
      ops.push_back(kraus_from_choi(ChoiMatrix(d, d, HermitianMatrix::symmetrized(chois[x])), tol));
    }
  } catch (const Error& e) {
    fail(ErrorKind::MalformedProcess, std::string("induced operation: ") + e.what());
  }

  // Dual-form check: E_x = Γ_ξ(E*(𝟙 ⊗ Z_x)).
  for (std::size_t x = 0; x < n; ++x) {
    const ComplexMatrix lifted = kron(identity_matrix(d), proc.pointer().effect(x).matrix());
    const ComplexMatrix dual_form =
        restriction_map(dual_apply(proc.premeasurement(), lifted), proc.xi(), dims, Subsystem::Second);
    const ComplexMatrix effect = dual_apply(ops[x], identity_matrix(d));
    const double residual = max_abs(dual_form - effect);
    if (residual > tol.equality) {
      fail(ErrorKind::MalformedProcess, "induced effect for outcome '" +
                                            proc.objectification().labels()[x] +
                                            "' disagrees with the dual form (residual " +
                                            std::to_string(residual) + ")");
    }
  }
  try {
    return Instrument(proc.objectification().labels(), std::move(ops), tol);
  } catch (const Error& e) {
    fail(ErrorKind::MalformedProcess, std::string("induced instrument: ") + e.what());
  }
}

QuantumOperation composed_channel(const MeasurementProcess& proc) {
  const auto lifted_total =
      tensor(QuantumOperation::identity(proc.sys_dim()), total_channel(proc.objectification()));
  return compose(lifted_total, proc.premeasurement());
}

OutcomeDistribution PosteriorBundle::distribution() const {
  std::vector<double> p;
  p.reserve(outcomes.size());
  for (const auto& o : outcomes) p.push_back(o.probability);
  return OutcomeDistribution(std::move(p));
}

PosteriorBundle posterior_bundle(const MeasurementProcess& proc, const State& rho,
                                 const Tolerances& tol) {
  if (rho.dim() != proc.sys_dim()) {
    fail(ErrorKind::InvalidInput, "posterior_bundle: prior state has wrong dimension");
  }
  const Dims dims = proc.dims();
  const ComplexMatrix joint = qmtherm::apply(proc.premeasurement(), kron(rho.matrix(), proc.xi().matrix()));
  PosteriorBundle bundle{dims, rho, proc.xi(), proc.objectification().labels(), {}};
  bundle.outcomes.reserve(proc.objectification().size());
  for (const auto& lifted : proc.lifted_objectification()) {
    const ComplexMatrix unnormalized = qmtherm::apply(lifted, joint);
    const double p = std::clamp(trace(unnormalized).real(), 0.0, 1.0);
    if (p <= tol.p_floor) {
      bundle.outcomes.push_back({p, true, State::maximally_mixed(dims.total()),
                                 State::maximally_mixed(dims.first),
                                 State::maximally_mixed(dims.second)});
      continue;
    }
    const ComplexMatrix sigma = unnormalized / trace(unnormalized).real();
    bundle.outcomes.push_back({p, false, State::from_matrix(sigma, tol),
                               State::from_matrix(partial_trace(sigma, dims, Subsystem::First), tol),
                               State::from_matrix(partial_trace(sigma, dims, Subsystem::Second), tol)});
  }
  return bundle;
}

Instrument effective_apparatus_instrument(const MeasurementProcess& proc, const State& rho,
                                          const Tolerances& tol) {
  const std::size_t da = proc.app_dim();
  const Dims dims = proc.dims();
  const auto ba = static_cast<Eigen::Index>(da);
  const std::size_t n = proc.objectification().size();
  std::vector<ComplexMatrix> chois(n, ComplexMatrix::Zero(ba * ba, ba * ba));
  for (std::size_t a = 0; a < da; ++a) {
    for (std::size_t b = 0; b < da; ++b) {
      const ComplexMatrix joint =
          qmtherm::apply(proc.premeasurement(), kron(rho.matrix(), matrix_unit(da, a, b)));
      const ComplexMatrix reduced = partial_trace(joint, dims, Subsystem::Second);
      for (std::size_t x = 0; x < n; ++x) {
        chois[x].block(static_cast<Eigen::Index>(a) * ba, static_cast<Eigen::Index>(b) * ba, ba, ba) =
            qmtherm::apply(proc.objectification().operation(x), reduced);
      }
    }
  }
  std::vector<QuantumOperation> ops;
  for (std::size_t x = 0; x < n; ++x) {
    ops.push_back(kraus_from_choi(ChoiMatrix(da, da, HermitianMatrix::symmetrized(chois[x])), tol));
  }
  return Instrument(proc.objectification().labels(), std::move(ops), tol);
}

Observable apparatus_observable_G(const MeasurementProcess& proc, const State& rho,
                                  const Tolerances& tol) {
  std::vector<Effect> effects;
  for (const auto& z : proc.pointer().effects()) {
    const ComplexMatrix lifted = kron(identity_matrix(proc.sys_dim()), z.matrix());
    const ComplexMatrix g = restriction_map(dual_apply(proc.premeasurement(), lifted), rho,
                                            proc.dims(), Subsystem::First);
    effects.push_back(Effect::from_matrix(g, tol));
  }
  return Observable(proc.pointer().labels(), std::move(effects), tol, ZeroEffects::Allow);
}

MeasurementProcess ozawa_dilation(const Instrument& inst, const Tolerances& tol) {
  if (inst.in_dim() != inst.out_dim()) {
    fail(ErrorKind::InvalidInput, "ozawa_dilation: instrument must act in one space");
  }
  const std::size_t d = inst.in_dim();
  std::vector<const ComplexMatrix*> flat;
  std::vector<std::size_t> owner;
  for (std::size_t x = 0; x < inst.size(); ++x) {
    for (const auto& k : inst.operation(x).kraus()) {
      flat.push_back(&k);
      owner.push_back(x);
    }
  }
  const std::size_t m = flat.size();
  const auto bm = static_cast<Eigen::Index>(m);
  const auto bd = static_cast<Eigen::Index>(d);
  const Eigen::Index joint = bd * bm;

  // V|s⟩ = Σ_k K_k|s⟩ ⊗ |k⟩.
  ComplexMatrix v = ComplexMatrix::Zero(joint, bd);
  for (Eigen::Index k = 0; k < bm; ++k) {
    const ComplexMatrix& kr = *flat[static_cast<std::size_t>(k)];
    for (Eigen::Index s = 0; s < bd; ++s) {
      for (Eigen::Index o = 0; o < bd; ++o) v(o * bm + k, s) = kr(o, s);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(v);
  const ComplexMatrix q = qr.householderQ();

  // Column (s, 0) carries V|s⟩; columns (s, a > 0) take the orthonormal
  // complement of range(V) in QR order.
  ComplexMatrix u(joint, joint);
  Eigen::Index next = bd;
  for (Eigen::Index s = 0; s < bd; ++s) {
    for (Eigen::Index a = 0; a < bm; ++a) {
      u.col(s * bm + a) = a == 0 ? ComplexVector(v.col(s)) : ComplexVector(q.col(next++));
    }
  }
  const double residual = unitarity_residual(u);
  if (residual > kDilationUnitarity) {
    fail(ErrorKind::InternalInconsistency,
         "dilation unitary completion failed (residual " + std::to_string(residual) + ")");
  }

  std::vector<QuantumOperation> j_ops;
  for (std::size_t x = 0; x < inst.size(); ++x) {
    ComplexMatrix z = ComplexMatrix::Zero(bm, bm);
    for (std::size_t k = 0; k < m; ++k) {
      if (owner[k] == x) z(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    }
    j_ops.emplace_back(m, m, std::vector<ComplexMatrix>{z}, tol);
  }
  Instrument objectification(inst.labels(), std::move(j_ops), tol);

  MeasurementProcess proc(d, m, State::pure(basis_vector(m, 0)),
                          QuantumOperation(d * m, d * m, {u}, tol), std::move(objectification), tol);
  proc.metadata["construction"] = "ozawa_dilation";
  proc.metadata["unitary_completion"] = "householder_qr_orthogonal_complement";
  proc.metadata["apparatus_basis"] = "one vector per Kraus operator (outcome-major)";
  proc.metadata["leftover_pointer_vectors"] = "0 (would be assigned to outcome '" +
                                              inst.labels().front() + "')";
  return proc;
}

MeasurementProcess thermo_construction(const Observable& obs,
                                       const std::vector<ComplexMatrix>& unitaries,
                                       const State& xi, const Tolerances& tol) {
  const std::size_t d = obs.dim();
  const std::size_t n = obs.size();
  if (!classify_observable(obs, tol).strictly_positive) {
    fail(ErrorKind::ThirdLawObstruction,
         "observable is not strictly positive; no third-law compatible efficient realization");
  }
  if (xi.dim() != n) {
    fail(ErrorKind::InvalidInput, "apparatus state must have dimension " + std::to_string(n) +
                                      " (one level per outcome)");
  }
  if (min_eigenvalue(xi.hermitian()) <= tol.strict) {
    fail(ErrorKind::ThirdLawObstruction, "apparatus state is not strictly positive");
  }
  if (unitaries.size() != n) fail(ErrorKind::InvalidInput, "need one unitary per outcome");
  for (const auto& u : unitaries) {
    if (static_cast<std::size_t>(u.rows()) != d || u.rows() != u.cols() ||
        unitarity_residual(u) > tol.equality) {
      fail(ErrorKind::InvalidInput, "thermo_construction: non-unitary or mis-sized U_x");
    }
  }

  std::vector<ComplexMatrix> roots;
  for (const auto& e : obs.effects()) roots.push_back(matrix_sqrt(e.hermitian(), tol.psd).matrix());

  std::vector<ComplexMatrix> first;
  for (std::size_t x = 0; x < n; ++x) {
    ComplexMatrix k = ComplexMatrix::Zero(static_cast<Eigen::Index>(d * n), static_cast<Eigen::Index>(d * n));
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t shifted = (x + a) % n;
      k += kron(roots[shifted], matrix_unit(n, shifted, a));
    }
    first.push_back(std::move(k));
  }
  std::vector<ComplexMatrix> second;
  for (std::size_t x = 0; x < n; ++x) second.push_back(kron(unitaries[x], matrix_unit(n, x, x)));

  const QuantumOperation e1(d * n, d * n, std::move(first), tol);
  const QuantumOperation e2(d * n, d * n, std::move(second), tol);
  const QuantumOperation premeasurement = compose(e2, e1).compressed(tol.rank);

  std::vector<QuantumOperation> j_ops;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<ComplexMatrix> kraus;
    for (std::size_t k = 0; k < n; ++k) kraus.push_back(scale * matrix_unit(n, k, x));
    j_ops.emplace_back(n, n, std::move(kraus), tol);
  }
  Instrument objectification(obs.labels(), std::move(j_ops), tol);

  MeasurementProcess proc(d, n, xi, premeasurement, std::move(objectification), tol);
  proc.metadata["construction"] = "thermo_construction";
  proc.metadata["premeasurement"] = "E2 o E1, Kraus set compressed to minimal rank";
  proc.metadata["objectification"] = "measure pointer basis, prepare maximally mixed apparatus";
  return proc;
}

double pointer_factorization_residual(const MeasurementProcess& proc, const Instrument& induced) {
  const std::size_t d = proc.sys_dim();
  const ComplexMatrix id_a = identity_matrix(proc.app_dim());
  double worst = 0.0;
  for (std::size_t x = 0; x < proc.pointer().size(); ++x) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const ComplexMatrix b = matrix_unit(d, i, j);
        const ComplexMatrix lhs =
            dual_apply(proc.premeasurement(), kron(b, proc.pointer().effect(x).matrix()));
        const ComplexMatrix rhs = kron(dual_apply(induced.operation(x), b), id_a);
        worst = std::max(worst, max_abs(lhs - rhs));
      }
    }
  }
  return worst;
}

}  // namespace qmtherm
