#include "qmtherm/qobjects.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qmtherm/error.hpp"

namespace qmtherm {

namespace {

constexpr double kStateTraceTol = 1e-10;
constexpr double kProbabilitySlack = 1e-10;
constexpr double kProbabilitySumTol = 1e-9;

}  // namespace

State::State(HermitianMatrix m, const Tolerances& tol) : m_(std::move(m)) {
  const double tr = trace(m_.matrix()).real();
  if (std::abs(tr - 1.0) > kStateTraceTol) {
    fail(ErrorKind::InvalidInput, "state trace is " + std::to_string(tr) + ", expected 1");
  }
  const double lo = min_eigenvalue(m_);
  if (lo < -tol.psd) {
    fail(ErrorKind::NotPositiveSemidefinite,
         "state has negative eigenvalue " + std::to_string(lo));
  }
}

State State::from_matrix(const ComplexMatrix& m, const Tolerances& tol) {
  return State(HermitianMatrix::symmetrized(m), tol);
}

State State::maximally_mixed(std::size_t dim) {
  if (dim < 1) fail(ErrorKind::InvalidInput, "dimension must be at least 1");
  return State(HermitianMatrix(identity_matrix(dim) / static_cast<double>(dim)));
}

State State::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (psi.size() < 1 || !(norm > 0.0)) fail(ErrorKind::InvalidInput, "pure state from null vector");
  const ComplexVector unit = psi / norm;
  return from_matrix(unit * unit.adjoint());
}

Effect::Effect(HermitianMatrix m, const Tolerances& tol) : m_(std::move(m)) {
  const auto eig = hermitian_eig(m_);
  const double lo = eig.values(0);
  const double hi = eig.values(eig.values.size() - 1);
  if (lo < -tol.psd || hi > 1.0 + tol.psd) {
    fail(ErrorKind::InvalidInput, "effect spectrum [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "] leaves [0, 1]");
  }
}

Effect Effect::from_matrix(const ComplexMatrix& m, const Tolerances& tol) {
  return Effect(HermitianMatrix::symmetrized(m), tol);
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t k = 0; k < n; ++k) labels.push_back(std::to_string(k));
  return labels;
}

Observable::Observable(std::vector<std::string> labels, std::vector<Effect> effects,
                       const Tolerances& tol, ZeroEffects zero)
    : labels_(std::move(labels)), effects_(std::move(effects)) {
  if (effects_.empty()) fail(ErrorKind::InvalidInput, "observable needs at least one outcome");
  if (labels_.size() != effects_.size()) {
    fail(ErrorKind::InvalidInput, "observable has " + std::to_string(labels_.size()) +
                                      " labels for " + std::to_string(effects_.size()) + " effects");
  }
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    fail(ErrorKind::InvalidInput, "observable labels must be unique");
  }
  const std::size_t d = effects_.front().dim();
  ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < effects_.size(); ++k) {
    if (effects_[k].dim() != d) fail(ErrorKind::InvalidInput, "observable effects differ in dimension");
    if (zero == ZeroEffects::Reject && max_abs(effects_[k].matrix()) <= tol.strict) {
      fail(ErrorKind::InvalidInput, "effect for outcome '" + labels_[k] +
                                        "' is the null operator; drop the outcome instead");
    }
    total += effects_[k].matrix();
  }
  const double residual = max_abs(total - identity_matrix(d));
  if (residual > tol.equality) {
    fail(ErrorKind::InvalidInput,
         "effects do not sum to identity (residual " + std::to_string(residual) + ")");
  }
}

Observable Observable::with_default_labels(std::vector<Effect> effects, const Tolerances& tol) {
  auto labels = default_labels(effects.size());
  return Observable(std::move(labels), std::move(effects), tol);
}

OutcomeDistribution::OutcomeDistribution(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) fail(ErrorKind::InvalidInput, "empty outcome distribution");
  double total = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < -kProbabilitySlack || v > 1.0 + kProbabilitySlack) {
      fail(ErrorKind::InvalidInput, "probability " + std::to_string(v) + " outside [0, 1]");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kProbabilitySumTol) {
    fail(ErrorKind::InvalidInput, "probabilities sum to " + std::to_string(total));
  }
}

State mix_with_identity(const State& s, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) fail(ErrorKind::InvalidInput, "mixing weight outside [0, 1]");
  const double d = static_cast<double>(s.dim());
  return State::from_matrix((1.0 - eps) * s.matrix() + eps * identity_matrix(s.dim()) / d);
}

Observable mix_observable_with_identity(const Observable& obs, double eps, const Tolerances& tol) {
  if (!(eps >= 0.0 && eps <= 1.0)) fail(ErrorKind::InvalidInput, "mixing weight outside [0, 1]");
  const ComplexMatrix floor = eps * identity_matrix(obs.dim()) / static_cast<double>(obs.size());
  std::vector<Effect> effects;
  for (const auto& e : obs.effects()) effects.push_back(Effect::from_matrix((1.0 - eps) * e.matrix() + floor, tol));
  return Observable(obs.labels(), std::move(effects), tol);
}

OutcomeDistribution born_probability(const Observable& obs, const State& rho) {
  if (obs.dim() != rho.dim()) {
    fail(ErrorKind::InvalidInput, "born_probability: observable dim " + std::to_string(obs.dim()) +
                                      " vs state dim " + std::to_string(rho.dim()));
  }
  std::vector<double> p;
  p.reserve(obs.size());
  for (const auto& e : obs.effects()) {
    const double v = (e.matrix() * rho.matrix()).trace().real();
    p.push_back(std::clamp(v, 0.0, 1.0));
  }
  return OutcomeDistribution(std::move(p));
}

std::optional<double> trivial_effect_scalar(const Effect& e, double tol) {
  const double alpha = trace(e.matrix()).real() / static_cast<double>(e.dim());
  if (max_abs(e.matrix() - alpha * identity_matrix(e.dim())) <= tol) return alpha;
  return std::nullopt;
}

ObservableClass classify_observable(const Observable& obs, const Tolerances& tol) {
  ObservableClass c;
  c.strictly_positive = true;
  for (const auto& e : obs.effects()) {
    if (!trivial_effect_scalar(e, tol.equality)) c.nontrivial = true;
    if (min_eigenvalue(e.hermitian()) <= tol.strict) c.strictly_positive = false;
  }
  c.projective = true;
  for (std::size_t x = 0; x < obs.size() && c.projective; ++x) {
    for (std::size_t y = 0; y < obs.size(); ++y) {
      const ComplexMatrix prod = obs.effect(x).matrix() * obs.effect(y).matrix();
      const ComplexMatrix expected = x == y ? obs.effect(x).matrix()
                                            : ComplexMatrix::Zero(prod.rows(), prod.cols());
      if (max_abs(prod - expected) > tol.equality) {
        c.projective = false;
        break;
      }
    }
  }
  return c;
}

}  // namespace qmtherm
