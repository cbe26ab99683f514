#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qmtherm/linop.hpp"
#include "qmtherm/tolerances.hpp"

namespace qmtherm {

/// Density matrix: positive semidefinite with unit trace.
class State {
 public:
  /// Trace must be 1 to 1e-10; min eigenvalue >= -tol.psd.
  explicit State(HermitianMatrix m, const Tolerances& tol = {});

  /// Hermitizes first, for matrices produced by arithmetic.
  static State from_matrix(const ComplexMatrix& m, const Tolerances& tol = {});
  static State maximally_mixed(std::size_t dim);
  /// |ψ⟩⟨ψ| for a (not necessarily normalized) nonzero vector.
  static State pure(const ComplexVector& psi);

  std::size_t dim() const { return m_.dim(); }
  const HermitianMatrix& hermitian() const { return m_; }
  const ComplexMatrix& matrix() const { return m_.matrix(); }

 private:
  HermitianMatrix m_;
};

/// Operator with spectrum in [0, 1].
class Effect {
 public:
  explicit Effect(HermitianMatrix m, const Tolerances& tol = {});
  static Effect from_matrix(const ComplexMatrix& m, const Tolerances& tol = {});

  std::size_t dim() const { return m_.dim(); }
  const HermitianMatrix& hermitian() const { return m_; }
  const ComplexMatrix& matrix() const { return m_.matrix(); }

 private:
  HermitianMatrix m_;
};

/// Whether an Observable may contain null effects. Only the state-dependent
/// apparatus observable G^ρ needs Allow; user-facing POVMs are always Reject.
enum class ZeroEffects { Reject, Allow };

/// Discrete POVM. Outcome labels are ordered; index k of `labels()` is the
/// integer outcome k used by modular constructions.
class Observable {
 public:
  Observable(std::vector<std::string> labels, std::vector<Effect> effects,
             const Tolerances& tol = {}, ZeroEffects zero = ZeroEffects::Reject);

  /// Labels "0", "1", ... in order.
  static Observable with_default_labels(std::vector<Effect> effects, const Tolerances& tol = {});

  std::size_t dim() const { return effects_.front().dim(); }
  std::size_t size() const { return effects_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Effect>& effects() const { return effects_; }
  const Effect& effect(std::size_t k) const { return effects_.at(k); }

 private:
  std::vector<std::string> labels_;
  std::vector<Effect> effects_;
};

/// p(x) per outcome, in observable order.
class OutcomeDistribution {
 public:
  explicit OutcomeDistribution(std::vector<double> p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t k) const { return p_[k]; }
  const std::vector<double>& values() const { return p_; }

 private:
  std::vector<double> p_;
};

std::vector<std::string> default_labels(std::size_t n);

/// (1 − ε)·s + ε·𝟙/d.
State mix_with_identity(const State& s, double eps);

/// E_x ↦ (1 − ε)·E_x + ε·𝟙/N. Strictly positive for ε > 0.
Observable mix_observable_with_identity(const Observable& obs, double eps, const Tolerances& tol = {});

/// Born rule tr[E_x ρ], clipped to [0, 1].
OutcomeDistribution born_probability(const Observable& obs, const State& rho);

/// α when ‖E − (tr E / d)𝟙‖_max <= tol, otherwise nullopt.
std::optional<double> trivial_effect_scalar(const Effect& e, double tol);

struct ObservableClass {
  bool nontrivial = false;
  bool projective = false;
  bool strictly_positive = false;
};

ObservableClass classify_observable(const Observable& obs, const Tolerances& tol = {});

}  // namespace qmtherm
