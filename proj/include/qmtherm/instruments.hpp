#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qmtherm/channels.hpp"
#include "qmtherm/qobjects.hpp"

namespace qmtherm {

/// Outcome-indexed family of operations with common dimensions whose sum is a
/// channel. Operations are stored per outcome, never pooled.
class Instrument {
 public:
  Instrument(std::vector<std::string> labels, std::vector<QuantumOperation> operations,
             const Tolerances& tol = {});

  std::size_t size() const { return ops_.size(); }
  std::size_t in_dim() const { return ops_.front().in_dim(); }
  std::size_t out_dim() const { return ops_.front().out_dim(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<QuantumOperation>& operations() const { return ops_; }
  const QuantumOperation& operation(std::size_t k) const { return ops_.at(k); }

 private:
  std::vector<std::string> labels_;
  std::vector<QuantumOperation> ops_;
};

struct InstrumentClassification {
  bool quasicomplete = false;
  bool efficient = false;
  bool strictly_positive = false;
  std::vector<PurityClass> per_outcome;
  /// Outcomes whose effect is a multiple of 𝟙. A purity-preserving operation
  /// on such an outcome is a scaled unitary; it is still tagged single_kraus.
  std::vector<bool> trivial_effect;
};

/// E_x = I_x*(𝟙).
Observable induced_observable(const Instrument& inst, const Tolerances& tol = {});

/// Σ_x I_x as one operation (union of Kraus sets).
QuantumOperation total_channel(const Instrument& inst);

InstrumentClassification classify_instrument(const Instrument& inst, const Tolerances& tol = {});

/// I_x(ρ) = √E_x ρ √E_x.
Instrument luders_instrument(const Observable& obs, const Tolerances& tol = {});

/// I_x(ρ) = U_x √E_x ρ √E_x U_x†.
Instrument efficient_instrument(const Observable& obs, const std::vector<ComplexMatrix>& unitaries,
                                const Tolerances& tol = {});

/// Random instrument with `kraus_per_outcome` Kraus operators per outcome:
/// M_{x,i} S^{-1/2} with S = Σ M†M.
Instrument random_instrument(std::size_t dim, std::size_t outcomes, std::size_t kraus_per_outcome,
                             Rng& rng);

/// Per-outcome Choi distance maximized over outcomes; infinity when the
/// instruments have different shapes.
double instrument_distance(const Instrument& a, const Instrument& b);

}  // namespace qmtherm
