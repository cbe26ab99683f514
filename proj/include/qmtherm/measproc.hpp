#pragma once

// Measurement processes (H_A, ξ, E, J): an apparatus of dimension app_dim
// prepared in ξ, a premeasurement channel E on H_S ⊗ H_A (system factor
// first), and an objectification instrument J on H_A whose induced observable
// is the pointer Z.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qmtherm/instruments.hpp"

namespace qmtherm {

class MeasurementProcess {
 public:
  MeasurementProcess(std::size_t sys_dim, std::size_t app_dim, State xi,
                     QuantumOperation premeasurement, Instrument objectification,
                     const Tolerances& tol = {});

  std::size_t sys_dim() const { return sys_dim_; }
  std::size_t app_dim() const { return app_dim_; }
  Dims dims() const { return {sys_dim_, app_dim_}; }
  const State& xi() const { return xi_; }
  const QuantumOperation& premeasurement() const { return premeasurement_; }
  const Instrument& objectification() const { return objectification_; }
  const Observable& pointer() const { return pointer_; }
  /// id_S ⊗ J_x for every outcome, cached.
  const std::vector<QuantumOperation>& lifted_objectification() const { return lifted_; }

  /// Free-form construction notes (completion choices, seeds); serialized.
  std::map<std::string, std::string> metadata;
  /// User-declared: false marks an indecomposable process whose (E, J) split is
  /// only formal. Never inferred.
  bool decomposable = true;

  MeasurementProcess with_xi(State xi, const Tolerances& tol = {}) const;
  MeasurementProcess with_objectification(Instrument objectification,
                                          const Tolerances& tol = {}) const;

 private:
  std::size_t sys_dim_;
  std::size_t app_dim_;
  State xi_;
  QuantumOperation premeasurement_;
  Instrument objectification_;
  Observable pointer_;
  std::vector<QuantumOperation> lifted_;
};

/// Γ(M) with the anchor state on the traced factor:
///   traced = Second: tr_2[M (𝟙 ⊗ anchor)]
///   traced = First:  tr_1[M (anchor ⊗ 𝟙)]
ComplexMatrix restriction_map(const ComplexMatrix& joint, const State& anchor, Dims dims,
                              Subsystem traced);

/// I_x(ρ) = tr_A[(id ⊗ J_x)(E(ρ ⊗ ξ))], assembled per outcome from its Choi
/// matrix and cross-checked against the dual form Γ_ξ(E*(𝟙 ⊗ Z_x)).
Instrument induced_instrument(const MeasurementProcess& proc, const Tolerances& tol = {});

/// (id_S ⊗ J_X) ∘ E.
QuantumOperation composed_channel(const MeasurementProcess& proc);

struct OutcomePosterior {
  double probability = 0.0;
  /// p <= p_floor: joint and marginals are set to maximally mixed.
  bool degenerate = false;
  State joint;
  State system;
  State apparatus;
};

struct PosteriorBundle {
  Dims dims;
  State prior;
  State xi;
  std::vector<std::string> labels;
  std::vector<OutcomePosterior> outcomes;

  OutcomeDistribution distribution() const;
};

PosteriorBundle posterior_bundle(const MeasurementProcess& proc, const State& rho,
                                 const Tolerances& tol = {});

/// Φ_x^ρ(·) = J_x(tr_S[E(ρ ⊗ ·)]) as an instrument on the apparatus.
Instrument effective_apparatus_instrument(const MeasurementProcess& proc, const State& rho,
                                          const Tolerances& tol = {});

/// G_x^ρ = Γ_ρ(E*(𝟙 ⊗ Z_x)). May contain null effects for outcomes that ρ
/// never produces.
Observable apparatus_observable_G(const MeasurementProcess& proc, const State& rho,
                                  const Tolerances& tol = {});

/// Unitary dilation: apparatus indexes every Kraus operator (x, i), ξ = |0⟩⟨0|,
/// E is a unitary whose first apparatus column is the Stinespring isometry,
/// Z_x projects onto the Kraus indices of outcome x, J is Lüders in Z.
MeasurementProcess ozawa_dilation(const Instrument& inst, const Tolerances& tol = {});

/// Third-law compatible realization of the efficient instrument
/// U_x √E_x · √E_x U_x† for a strictly positive observable: apparatus of
/// dimension N, E = E₂ ∘ E₁ with
///   E₁ Kraus  K_x = Σ_a √E_{x⊕a} ⊗ |x⊕a⟩⟨a|   (⊕ mod N)
///   E₂ Kraus  U_x ⊗ |x⟩⟨x|
/// and J_x(·) = ⟨x|·|x⟩ 𝟙/N. Throws ThirdLawObstruction if the observable or
/// ξ is not strictly positive.
MeasurementProcess thermo_construction(const Observable& obs,
                                       const std::vector<ComplexMatrix>& unitaries,
                                       const State& xi, const Tolerances& tol = {});

/// max over outcomes x and matrix units B of ‖E*(B ⊗ Z_x) − I_x*(B) ⊗ 𝟙_A‖_max.
/// Vanishes for purity-preserving outcomes when ξ is strictly positive.
double pointer_factorization_residual(const MeasurementProcess& proc, const Instrument& induced);

}  // namespace qmtherm
