#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qmtherm/linop.hpp"
#include "qmtherm/qobjects.hpp"
#include "qmtherm/random.hpp"
#include "qmtherm/tolerances.hpp"

namespace qmtherm {

/// Completely positive, trace non-increasing map L(H_in) -> L(H_out) in Kraus
/// form. Every Kraus operator is out_dim x in_dim.
class QuantumOperation {
 public:
  QuantumOperation(std::size_t in_dim, std::size_t out_dim, std::vector<ComplexMatrix> kraus,
                   const Tolerances& tol = {});

  static QuantumOperation identity(std::size_t dim);
  static QuantumOperation unitary(const ComplexMatrix& u, const Tolerances& tol = {});

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

  /// Equivalent Kraus set with Choi-rank many elements: the Gram matrix
  /// tr[K_i† K_j] is diagonalized and its null directions dropped.
  QuantumOperation compressed(double rank_tol) const;

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  std::vector<ComplexMatrix> kraus_;
};

/// Choi(Φ) = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|), input factor first. With this
/// convention Φ is trace preserving iff tracing out the output gives 𝟙.
class ChoiMatrix {
 public:
  ChoiMatrix(std::size_t in_dim, std::size_t out_dim, HermitianMatrix m);

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const HermitianMatrix& hermitian() const { return m_; }
  const ComplexMatrix& matrix() const { return m_.matrix(); }

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  HermitianMatrix m_;
};

ComplexMatrix apply(const QuantumOperation& op, const ComplexMatrix& m);
ComplexMatrix dual_apply(const QuantumOperation& op, const ComplexMatrix& m);

ChoiMatrix to_choi(const QuantumOperation& op);
/// One Kraus operator per Choi eigenvalue above rank_tol·λ_max.
/// Throws NotCompletelyPositive when the Choi matrix has an eigenvalue
/// below −tol.psd.
QuantumOperation kraus_from_choi(const ChoiMatrix& c, const Tolerances& tol = {});

/// ‖Choi(a) − Choi(b)‖_max.
double choi_distance(const QuantumOperation& a, const QuantumOperation& b);

/// after ∘ before; Kraus set {A_i B_j}.
QuantumOperation compose(const QuantumOperation& after, const QuantumOperation& before);
/// a ⊗ b; Kraus set {A_i ⊗ B_j}.
QuantumOperation tensor(const QuantumOperation& a, const QuantumOperation& b);

/// Number of Kraus operators in a minimal representation (= Choi rank).
std::size_t kraus_rank(const QuantumOperation& op, double rank_tol);

struct ChannelClassification {
  bool trace_preserving = false;
  bool trace_nonincreasing = false;
  bool unital = false;
  bool bistochastic = false;
  bool strictly_positive = false;
  std::size_t min_kraus_count = 0;
  double trace_residual = 0.0;   // ‖Σ K†K − 𝟙‖_max
  double unital_residual = 0.0;  // ‖Σ K K† − 𝟙‖_max (inf when not square)
  double min_output_eigenvalue = 0.0;  // of Φ(𝟙)
};

ChannelClassification classify_channel(const QuantumOperation& op, const Tolerances& tol = {});

/// The two purity-preserving forms: a single Kraus operator, or
/// ρ ↦ tr[Eρ]|φ⟩⟨φ|.
enum class PurityTag { SingleKraus, PurePrepare, NotPurityPreserving };

std::string_view to_string(PurityTag tag);

struct PurityClass {
  PurityTag tag = PurityTag::NotPurityPreserving;
  std::optional<ComplexMatrix> kraus;     // SingleKraus witness
  std::optional<ComplexMatrix> effect;    // PurePrepare witness E
  std::optional<ComplexVector> prepared;  // PurePrepare witness |φ⟩
  /// Second over largest Kraus-Gram eigenvalue. Values near tol.rank mean
  /// the tag sits at the edge of the numerical dichotomy.
  double margin = 0.0;
};

/// Tags by Choi rank and the factorization Choi ≈ Eᵀ ⊗ |φ⟩⟨φ|, then
/// cross-checks on 25 seeded random pure inputs. Disagreement between the two
/// tests throws AmbiguousClassification.
PurityClass purity_class(const QuantumOperation& op, const Tolerances& tol = {});

/// Random trace-preserving operation with `kraus_count` Kraus operators.
QuantumOperation random_channel(std::size_t in_dim, std::size_t out_dim, std::size_t kraus_count,
                                Rng& rng);

}  // namespace qmtherm
