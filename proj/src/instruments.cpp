#include "qmtherm/instruments.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "qmtherm/error.hpp"

namespace qmtherm {

Instrument::Instrument(std::vector<std::string> labels, std::vector<QuantumOperation> operations,
                       const Tolerances& tol)
    : labels_(std::move(labels)), ops_(std::move(operations)) {
  if (ops_.empty()) fail(ErrorKind::MalformedInstrument, "instrument needs at least one outcome");
  if (labels_.size() != ops_.size()) {
    fail(ErrorKind::MalformedInstrument, "instrument label count does not match operations");
  }
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    fail(ErrorKind::MalformedInstrument, "instrument labels must be unique");
  }
  for (const auto& op : ops_) {
    if (op.in_dim() != ops_.front().in_dim() || op.out_dim() != ops_.front().out_dim()) {
      fail(ErrorKind::MalformedInstrument, "instrument operations differ in dimensions");
    }
  }
  ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(in_dim()),
                                            static_cast<Eigen::Index>(in_dim()));
  for (const auto& op : ops_) total += dual_apply(op, identity_matrix(out_dim()));
  const double residual = max_abs(total - identity_matrix(in_dim()));
  if (residual > tol.equality) {
    fail(ErrorKind::MalformedInstrument,
         "instrument total is not trace preserving (residual " + std::to_string(residual) + ")");
  }
}

Observable induced_observable(const Instrument& inst, const Tolerances& tol) {
  std::vector<Effect> effects;
  effects.reserve(inst.size());
  for (const auto& op : inst.operations()) {
    effects.push_back(Effect::from_matrix(dual_apply(op, identity_matrix(inst.out_dim())), tol));
  }
  try {
    return Observable(inst.labels(), std::move(effects), tol);
  } catch (const Error& e) {
    fail(ErrorKind::MalformedInstrument, std::string("induced observable invalid: ") + e.what());
  }
}

QuantumOperation total_channel(const Instrument& inst) {
  std::vector<ComplexMatrix> kraus;
  for (const auto& op : inst.operations()) {
    kraus.insert(kraus.end(), op.kraus().begin(), op.kraus().end());
  }
  return QuantumOperation(inst.in_dim(), inst.out_dim(), std::move(kraus));
}

InstrumentClassification classify_instrument(const Instrument& inst, const Tolerances& tol) {
  InstrumentClassification c;
  c.quasicomplete = true;
  c.efficient = true;
  c.strictly_positive = true;
  for (const auto& op : inst.operations()) {
    c.per_outcome.push_back(purity_class(op, tol));
    const PurityTag tag = c.per_outcome.back().tag;
    if (tag == PurityTag::NotPurityPreserving) c.quasicomplete = false;
    if (tag != PurityTag::SingleKraus) c.efficient = false;
    if (!classify_channel(op, tol).strictly_positive) c.strictly_positive = false;
    const Effect e = Effect::from_matrix(dual_apply(op, identity_matrix(inst.out_dim())), tol);
    c.trivial_effect.push_back(trivial_effect_scalar(e, tol.equality).has_value());
  }
  return c;
}

Instrument luders_instrument(const Observable& obs, const Tolerances& tol) {
  std::vector<ComplexMatrix> identities(obs.size(), identity_matrix(obs.dim()));
  return efficient_instrument(obs, identities, tol);
}

Instrument efficient_instrument(const Observable& obs, const std::vector<ComplexMatrix>& unitaries,
                                const Tolerances& tol) {
  if (unitaries.size() != obs.size()) {
    fail(ErrorKind::InvalidInput, "efficient_instrument: need one unitary per outcome");
  }
  std::vector<QuantumOperation> ops;
  ops.reserve(obs.size());
  for (std::size_t x = 0; x < obs.size(); ++x) {
    const ComplexMatrix& u = unitaries[x];
    if (static_cast<std::size_t>(u.rows()) != obs.dim() || u.rows() != u.cols() ||
        unitarity_residual(u) > tol.equality) {
      fail(ErrorKind::InvalidInput, "efficient_instrument: U for outcome '" + obs.labels()[x] +
                                        "' is not a unitary of dimension " +
                                        std::to_string(obs.dim()));
    }
    const ComplexMatrix root = matrix_sqrt(obs.effect(x).hermitian(), tol.psd).matrix();
    ops.emplace_back(obs.dim(), obs.dim(), std::vector<ComplexMatrix>{u * root}, tol);
  }
  return Instrument(obs.labels(), std::move(ops), tol);
}

Instrument random_instrument(std::size_t dim, std::size_t outcomes, std::size_t kraus_per_outcome,
                             Rng& rng) {
  if (dim < 1 || outcomes < 1 || kraus_per_outcome < 1) {
    fail(ErrorKind::InvalidInput, "random_instrument: all sizes must be >= 1");
  }
  std::vector<std::vector<ComplexMatrix>> ms(outcomes);
  ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (auto& group : ms) {
    for (std::size_t i = 0; i < kraus_per_outcome; ++i) {
      group.push_back(random_gaussian_matrix(dim, dim, rng));
      total += group.back().adjoint() * group.back();
    }
  }
  const ComplexMatrix s = matrix_inverse_sqrt(HermitianMatrix::symmetrized(total), 0.0).matrix();
  std::vector<QuantumOperation> ops;
  for (auto& group : ms) {
    for (auto& m : group) m = m * s;
    ops.emplace_back(dim, dim, std::move(group));
  }
  return Instrument(default_labels(outcomes), std::move(ops));
}

double instrument_distance(const Instrument& a, const Instrument& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    worst = std::max(worst, choi_distance(a.operation(x), b.operation(x)));
  }
  return worst;
}

}  // namespace qmtherm
